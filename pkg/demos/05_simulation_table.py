"""A small Monte Carlo table in the harness's text format."""
from __future__ import annotations

from essc.harness import ExperimentConfig, run_simulation

if __name__ == "__main__":
    cfg = ExperimentConfig(model=3, grid=(100, 400), reps=10,
                           methods=("ESSC", "KMEANS", "SC1", "DEMEANED"), seed=7)
    print(run_simulation(cfg).table())
