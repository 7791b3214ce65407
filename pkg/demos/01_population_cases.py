"""Walk through the five population cases and what each eigenvector can see."""
from __future__ import annotations

from essc import PopulationConfig, classify_clustering_power, oracle_select
from essc.population import default_oracle_cn

CONFIGS = {
    "collinear means": PopulationConfig(4.0, 1.0, 2.0, 100, 100),
    "equal-energy orthogonal": PopulationConfig(1.0, 1.0, 0.0, 100, 100),
    "orthogonal, unequal": PopulationConfig(2.0, 1.0, 0.0, 100, 100),
    "one flat eigenvector": PopulationConfig(2.0, 2.0, 1.0, 100, 100),
    "generic": PopulationConfig(3.0, 1.0, 0.5, 120, 80),
}

if __name__ == "__main__":
    c_n = default_oracle_cn(200, 200)
    for name, cfg in CONFIGS.items():
        pe = classify_clustering_power(cfg)
        pick = oracle_select(pe, c_n)
        print(f"{name:26s} case={pe.case_label.value:9s} d1^2={pe.d1sq:8.2f} d2^2={pe.d2sq:8.2f} "
              f"power=({pe.power1:d},{pe.power2:d}) oracle picks {pick.value}")
