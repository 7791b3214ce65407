"""Cluster one draw of a mixture with ESSC and every baseline."""
from __future__ import annotations

import sys

from essc import misclustering_rate, model_preset, sample_dataset
from essc.harness import METHOD_NAMES, run_method

if __name__ == "__main__":
    model, p = (int(a) for a in sys.argv[1:3]) if len(sys.argv) > 2 else (3, 400)
    spec = model_preset(model, p)
    X, y = sample_dataset(spec, seed=11)
    print(f"model {model}, p={p}, n={spec.n}")
    for name in METHOD_NAMES:
        res = run_method(name, X, seed=3, spec=spec)
        tag = f" [{res.branch}]" if res.branch else ""
        print(f"  {name:9s} {misclustering_rate(res.assignment, y):.3f}{tag}")
