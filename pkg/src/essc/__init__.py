"""Eigen-selected spectral clustering for two-class Gaussian mixtures."""
from __future__ import annotations

from .algorithm import (Branch, EigenSelection, ThresholdSchedule, default_thresholds,
                        essc_cluster, essc_select)
from .baselines import (bayes_oracle, demeaned_spectral, gaussian_affinity, kmeans_raw,
                        sc1, sc2, sign_cluster, sign_cluster_data)
from .datagen import (CovarianceSpec, CovKind, MixtureSpec, TheoryKind, build_covariance_factor,
                      model_preset, sample_dataset, theory_preset)
from .errors import DegenerateInput, InvalidArgument, NoRootError, NumericFailure
from .kmeans import ClusterResult, Init, KMeansConfig, kmeans
from .linalg import (DataMatrix, SpectralSummary, flatness, linearization_eigs,
                     linearization_matrix, top2_singular)
from .metrics import ReplicateSummary, misclustering_rate, summarize
from .population import (Case, PopulationConfig, PopulationEigen, Selection,
                         centered_leading_eigenvalue, classify_clustering_power,
                         oracle_select, population_eigenvalues)
from .resolvent import NoiseMoments, TSolverConfig, det_f, f_matrix, solve_t_values
from .screening import ScreeningResult, ks_scores, select_top

__version__ = "0.1.0"
