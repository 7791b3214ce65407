"""Short runs of each theory suite; the acceptance tests use larger ones."""
from __future__ import annotations

from essc.harness import verify_theory

RUNS = [
    ("RATIO_MULT", dict(n=200, p=200, reps=30)),
    ("RATIO_GAP", dict(n=200, p=200, reps=30)),
    ("FLATNESS", dict(n=200, p=200, reps=30)),
    ("EXACT_RECOVERY", dict(n=300, p=300, reps=20)),
    ("TSOLVER", dict(reps=30)),
]

if __name__ == "__main__":
    for kind, params in RUNS:
        rep = verify_theory(kind, seed=5, **params)
        print(f"{kind:15s} frequency {rep.frequency:.3f} target {rep.target} "
              f"{'ok' if rep.passed else 'MISSED'}")
