"""Experiment engine and command-line front end."""
from __future__ import annotations

from .config import ExperimentConfig, experiment_from_text, mixture_from_text, mixture_to_text
from .csvio import cluster_csv, read_csv, write_csv
from .methods import METHOD_NAMES, run_method
from .simulate import SimulationReport, run_simulation
from .theory import TheoryKind, TheoryReport, verify_theory
