"""Two-class Gaussian mixture generators and simulation presets."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg

from .errors import InvalidArgument, NumericFailure
from .population import PopulationConfig

PSD_CLAMP = 1e-10


class CovKind(str, enum.Enum):
    IDENTITY_SCALED = "identity"
    AR1 = "ar1"
    DENSE = "dense"


@dataclass(frozen=True, eq=False)
class CovarianceSpec:
    """Noise covariance. ``param`` is the variance s for IDENTITY_SCALED
    (Sigma = s I) and rho for AR1 (Sigma_ij = rho^|i-j|)."""
    kind: CovKind
    p: int
    param: float = 1.0
    matrix: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CovKind(self.kind))
        if self.p < 1:
            raise InvalidArgument("p must be positive")
        if self.kind is CovKind.IDENTITY_SCALED and self.param < 0:
            raise InvalidArgument("identity scale must be >= 0")
        if self.kind is CovKind.AR1 and not -1 < self.param < 1:
            raise InvalidArgument("AR1 rho must lie in (-1, 1)")
        if self.kind is CovKind.DENSE:
            m = np.asarray(self.matrix, dtype=float)
            if m.shape != (self.p, self.p):
                raise InvalidArgument(f"dense covariance must be {self.p}x{self.p}")
            if not np.allclose(m, m.T, atol=1e-12, rtol=0):
                raise InvalidArgument("dense covariance must be symmetric")
            evals = np.linalg.eigvalsh(m)
            if evals[0] < -PSD_CLAMP:
                raise InvalidArgument(f"dense covariance not PSD (min eigenvalue {evals[0]:.3g})")
            m = 0.5 * (m + m.T)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, p: int, scale: float = 1.0) -> "CovarianceSpec":
        return cls(CovKind.IDENTITY_SCALED, p, float(scale))

    @classmethod
    def ar1(cls, p: int, rho: float) -> "CovarianceSpec":
        return cls(CovKind.AR1, p, float(rho))

    @classmethod
    def dense(cls, matrix) -> "CovarianceSpec":
        m = np.asarray(matrix, dtype=float)
        return cls(CovKind.DENSE, m.shape[0], 1.0, m)

    def dense_matrix(self) -> np.ndarray:
        if self.kind is CovKind.IDENTITY_SCALED:
            return self.param * np.eye(self.p)
        if self.kind is CovKind.AR1:
            idx = np.arange(self.p)
            return self.param ** np.abs(idx[:, None] - idx[None, :])
        return np.array(self.matrix)

    @cached_property
    def operator_norm(self) -> float:
        if self.kind is CovKind.IDENTITY_SCALED:
            return float(self.param)
        return float(np.linalg.eigvalsh(self.dense_matrix())[-1])

    @property
    def trace(self) -> float:
        if self.kind is CovKind.IDENTITY_SCALED:
            return self.param * self.p
        if self.kind is CovKind.AR1:
            return float(self.p)
        return float(np.trace(self.matrix))

    def apply_factor(self, Z: np.ndarray) -> np.ndarray:
        """F @ Z without forming F where a structured product exists."""
        if self.kind is CovKind.IDENTITY_SCALED:
            return math.sqrt(self.param) * Z
        if self.kind is CovKind.AR1:
            rho, c = self.param, math.sqrt(1.0 - self.param ** 2)
            out = np.empty_like(Z)
            out[0] = Z[0]
            for i in range(1, Z.shape[0]):
                out[i] = rho * out[i - 1] + c * Z[i]
            return out
        return build_covariance_factor(self) @ Z

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Sigma^{-1} b."""
        if self.kind is CovKind.IDENTITY_SCALED:
            if self.param == 0:
                raise NumericFailure("singular covariance")
            return b / self.param
        try:
            cho = linalg.cho_factor(self.dense_matrix(), lower=True)
        except linalg.LinAlgError as exc:
            raise NumericFailure(f"singular covariance: {exc}") from exc
        return linalg.cho_solve(cho, b)


def build_covariance_factor(spec: CovarianceSpec) -> np.ndarray:
    """Lower-triangular F with F F^T = Sigma."""
    p = spec.p
    if spec.kind is CovKind.IDENTITY_SCALED:
        return math.sqrt(spec.param) * np.eye(p)
    if spec.kind is CovKind.AR1:
        # closed form: F[i, 0] = rho^i, F[i, j] = rho^(i-j) sqrt(1 - rho^2) for j >= 1.
        # Its inverse is bidiagonal, which is what apply_factor's recursion uses.
        rho = spec.param
        idx = np.arange(p)
        lag = idx[:, None] - idx[None, :]
        F = np.where(lag >= 0, rho ** np.maximum(lag, 0), 0.0)
        F[:, 1:] *= math.sqrt(1.0 - rho ** 2)
        return F
    m = spec.matrix
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        # semidefinite input: factor through the clamped eigendecomposition
        evals, evecs = np.linalg.eigh(m)
        evals = np.clip(evals, 0.0, None)
        _, R = np.linalg.qr((evecs * np.sqrt(evals)).T)
        F = R.T
        return F * np.where(np.diag(F) < 0, -1.0, 1.0)[None, :]


@dataclass(frozen=True, eq=False)
class MixtureSpec:
    mu1: np.ndarray
    mu2: np.ndarray
    cov: CovarianceSpec
    pi: float
    n: int
    # "bernoulli": i.i.d. labels; "balanced": exactly round(pi n) class-1 samples
    label_mode: str = "bernoulli"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        mu1 = np.array(self.mu1, dtype=float).ravel()
        mu2 = np.array(self.mu2, dtype=float).ravel()
        if mu1.shape != mu2.shape or mu1.size != self.cov.p:
            raise InvalidArgument("mean vectors and covariance dimension disagree")
        if np.array_equal(mu1, mu2):
            raise InvalidArgument("mu_1 must differ from mu_2")
        if not 0 < self.pi < 1:
            raise InvalidArgument("pi must lie in (0, 1)")
        if self.n < 2:
            raise InvalidArgument("n must be >= 2")
        if self.label_mode not in ("bernoulli", "balanced"):
            raise InvalidArgument(f"unknown label_mode {self.label_mode!r}")
        mu1.setflags(write=False)
        mu2.setflags(write=False)
        object.__setattr__(self, "mu1", mu1)
        object.__setattr__(self, "mu2", mu2)

    @property
    def p(self) -> int:
        return self.cov.p

    @property
    def sigma_n(self) -> float:
        """||Sigma|| sqrt(n + p)."""
        return self.cov.operator_norm * math.sqrt(self.n + self.p)

    def class_sizes(self, labels=None) -> tuple[int, int]:
        if labels is not None:
            n1 = int(np.sum(labels))
            return n1, len(labels) - n1
        n1 = int(round(self.pi * self.n))
        return n1, self.n - n1

    def population_config(self, labels=None) -> PopulationConfig:
        n1, n2 = self.class_sizes(labels)
        return PopulationConfig.from_means(self.mu1, self.mu2, n1, n2)


def sample_labels(spec: MixtureSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.label_mode == "balanced":
        n1, _ = spec.class_sizes()
        y = np.zeros(spec.n, dtype=np.int64)
        y[:n1] = 1
        return rng.permutation(y)
    return (rng.random(spec.n) < spec.pi).astype(np.int64)


def sample_dataset(spec: MixtureSpec, seed, labels=None) -> tuple[np.ndarray, np.ndarray]:
    """Draw X (p x n, columns are samples) and the class labels (1 for mu_1).

    Labels are drawn before the noise from the same stream; passing
    ``labels`` fixes them instead.
    """
    rng = np.random.default_rng(seed)
    if labels is None:
        y = sample_labels(spec, rng)
    else:
        y = np.asarray(labels, dtype=np.int64)
        if y.shape != (spec.n,) or not np.all((y == 0) | (y == 1)):
            raise InvalidArgument("labels must be a 0/1 vector of length n")
    means = np.where(y[None, :] == 1, spec.mu1[:, None], spec.mu2[:, None])
    Z = rng.standard_normal((spec.p, spec.n))
    return means + spec.cov.apply_factor(Z), y


# p-grids for models 1-4, n-grid for model 5
MODEL_GRIDS = {
    1: (100, 200, 400, 600, 800, 1000, 1200),
    2: (100, 200, 400, 600, 800, 1000, 1200),
    3: (100, 200, 400, 600, 800, 1000, 1200),
    4: (30, 50, 100, 200, 400, 600, 800),
    5: (200, 400, 600, 800, 1000),
}


def _block(p: int, start: int, length: int, value: float) -> np.ndarray:
    v = np.zeros(p)
    v[start:start + length] = value
    return v


def model_preset(model: int, sweep_value: int, strict: bool = True) -> MixtureSpec:
    """Simulation models 1-5; ``sweep_value`` is p for models 1-4 and n for model 5."""
    if model not in MODEL_GRIDS:
        raise InvalidArgument(f"model must be one of 1..5, got {model!r}")
    grid = MODEL_GRIDS[model]
    if strict and sweep_value not in grid:
        raise InvalidArgument(f"model {model} sweep value {sweep_value} not in grid {list(grid)}")
    name = f"model{model}-{sweep_value}"
    if model == 1:
        p, n, l, r = sweep_value, 200, 15, 2.0
        mu1 = _block(p, 0, l, r)
        return MixtureSpec(mu1, np.zeros(p), CovarianceSpec.ar1(p, 0.8), 0.5, n, name=name)
    if model == 2:
        p, n, l, r = sweep_value, 100, 12, 2.0
        mu1 = _block(p, 0, l, r)
        mu2 = _block(p, p - l, l, r)
        return MixtureSpec(mu1, mu2, CovarianceSpec.identity(p, r ** 2), 0.5, n, name=name)
    if model in (3, 4):
        p, n, r = sweep_value, 200, 1.0
        l = 60 if model == 3 else 30
        mu1 = _block(p, 0, l, r)
        return MixtureSpec(mu1, mu1 / 2, CovarianceSpec.identity(p), 0.5, n, name=name)
    n, p, l, r = sweep_value, 400, 20, 1.0
    mu1 = _block(p, 0, l, r)
    mu2 = _block(p, 0, l // 2, 1.0 / r)
    return MixtureSpec(mu1, mu2, CovarianceSpec.identity(p, r ** 2), 0.5, n, name=name)


class TheoryKind(str, enum.Enum):
    EXACT_RECOVERY = "exact_recovery"
    LOWER_BOUND = "lower_bound"
    MULTIPLICITY = "multiplicity"
    GAP = "gap"
    FLAT = "flat"


def theory_preset(kind, n: int, p: int, *, eps: float = 0.25, scale: float = 0.01,
                  signal: float | None = None, ratio: float = 1.5,
                  separation: float = 0.5) -> MixtureSpec:
    """Mixtures in the regimes the concentration results describe. Sigma = I.

    EXACT_RECOVERY  mu_1 = -mu_2 spread evenly, ||mu_1||^2 = 2 (1 + eps) ln n
    LOWER_BOUND     mu_1 = -mu_2 spread evenly, ||mu_1||^2 = scale
    MULTIPLICITY    disjoint equal-norm means, balanced labels: d1 = d2 = signal * sigma_n
    GAP             disjoint means, balanced labels: d1 = signal * sigma_n, d1 / d2 = ratio
    FLAT            mu = m +/- delta with m orthogonal to delta, balanced labels;
                    the leading population eigenvector is constant, d1 = signal * sigma_n
    """
    kind = TheoryKind(kind)
    if n < 2 or p < 2:
        raise InvalidArgument("need n >= 2 and p >= 2")
    cov = CovarianceSpec.identity(p)
    sigma_n = math.sqrt(n + p)
    name = f"{kind.value}-n{n}-p{p}"
    if kind in (TheoryKind.EXACT_RECOVERY, TheoryKind.LOWER_BOUND):
        if kind is TheoryKind.EXACT_RECOVERY:
            if eps <= 0:
                raise InvalidArgument("eps must be positive")
            c11 = 2.0 * (1.0 + eps) * math.log(n)
        else:
            if scale <= 0:
                raise InvalidArgument("scale must be positive")
            c11 = scale
        mu1 = np.full(p, math.sqrt(c11 / p))
        return MixtureSpec(mu1, -mu1, cov, 0.5, n, name=name)

    if n % 2:
        raise InvalidArgument(f"{kind.value} preset needs an even n for balanced classes")
    half = p // 2
    if kind is TheoryKind.MULTIPLICITY:
        signal = 4.0 if signal is None else signal
        d = signal * sigma_n
        a = math.sqrt(2.0 * d ** 2 / (n * half))
        mu1 = _block(p, 0, half, a)
        mu2 = _block(p, half, half, a)
    elif kind is TheoryKind.GAP:
        signal = 4.0 if signal is None else signal
        if ratio <= 1:
            raise InvalidArgument("ratio must exceed 1")
        d1 = signal * sigma_n
        d2 = d1 / ratio
        mu1 = _block(p, 0, half, math.sqrt(2.0 * d1 ** 2 / (n * half)))
        mu2 = _block(p, half, half, math.sqrt(2.0 * d2 ** 2 / (n * half)))
    else:
        signal = 20.0 if signal is None else signal
        if not 0 < separation < 1:
            raise InvalidArgument("separation must lie in (0, 1)")
        d1 = signal * sigma_n
        # H = n ||m||^2 (1/n) 11^T + n ||delta||^2 (l l^T / n) for balanced labels
        m = _block(p, 0, half, d1 / math.sqrt(n * half))
        delta = _block(p, half, p - half, separation * d1 / math.sqrt(n * (p - half)))
        mu1, mu2 = m + delta, m - delta
    return MixtureSpec(mu1, mu2, cov, 0.5, n, label_mode="balanced", name=name)
