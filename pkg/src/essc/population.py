"""Noiseless eigen-structure of the two-class mean matrix.

H = (E X)^T (E X) has rank at most two. Its nonzero eigenvalues and the
two per-class values of its eigenvectors have closed forms in
(c11, c22, c12, n1, n2), which this module evaluates and classifies.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericFailure

log = logging.getLogger(__name__)

# relative tolerance for the equality tests separating the cases
CASE_RTOL = 1e-9


class Case(str, enum.Enum):
    A = "A"                 # mu_1, mu_2 collinear: d2 = 0
    B = "B"                 # multiplicity d1 = d2
    C = "C"                 # orthogonal means, distinct eigenvalues
    D_SINGLE = "D_single"   # one eigenvector constant over samples
    D_BOTH = "D_both"


class Selection(str, enum.Enum):
    FIRST = "FIRST"
    SECOND = "SECOND"
    BOTH = "BOTH"
    FIRST_AND_SECOND = "FIRST_AND_SECOND"


def _close(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= CASE_RTOL * max(scale, 1e-300)


@dataclass(frozen=True)
class PopulationConfig:
    c11: float
    c22: float
    c12: float
    n1: int
    n2: int
    allow_equal_means: bool = False

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise InvalidArgument("n1 and n2 must be positive")
        if self.c11 < 0 or self.c22 < 0:
            raise InvalidArgument("c11 and c22 are squared norms and must be >= 0")
        if self.c12 ** 2 > self.c11 * self.c22 * (1 + CASE_RTOL) + 1e-300:
            raise InvalidArgument("c12^2 <= c11*c22 violated (Cauchy-Schwarz)")
        if not self.allow_equal_means and self.equal_means:
            raise InvalidArgument("configuration encodes mu_1 = mu_2")

    @property
    def equal_means(self) -> bool:
        scale = max(self.c11, self.c22, abs(self.c12))
        return _close(self.c11, self.c22, scale) and _close(self.c11, self.c12, scale)

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @classmethod
    def from_means(cls, mu1, mu2, n1: int, n2: int, **kw) -> "PopulationConfig":
        mu1 = np.asarray(mu1, dtype=float)
        mu2 = np.asarray(mu2, dtype=float)
        return cls(float(mu1 @ mu1), float(mu2 @ mu2), float(mu1 @ mu2),
                   int(n1), int(n2), **kw)

    @property
    def delta_sq(self) -> float:
        """||mu_1 - mu_2||^2."""
        return self.c11 + self.c22 - 2.0 * self.c12


@dataclass(frozen=True)
class PopulationEigen:
    d1sq: float
    d2sq: float
    case_label: Case
    power1: bool
    power2: bool
    # per-class entries (class-1 value, class-2 value) of the unit eigenvectors
    values1: tuple[float, float]
    values2: tuple[float, float] | None
    identifiable: bool = True


def population_eigenvalues(cfg: PopulationConfig) -> tuple[float, float]:
    n1, n2 = cfg.n1, cfg.n2
    c11, c22, c12 = cfg.c11, cfg.c22, cfg.c12
    trace = n1 * c11 + n2 * c22
    # n1^2 c11^2 + n2^2 c22^2 + 4 n1 n2 c12^2 - 2 n1 n2 c11 c22, regrouped as a
    # sum of squares: the expanded form cancels to sqrt(eps) accuracy near d1 = d2
    disc = (n1 * c11 - n2 * c22) ** 2 + 4 * n1 * n2 * c12 ** 2
    root = math.sqrt(disc)
    d1sq = 0.5 * (trace + root)
    # product of the roots is n1 n2 (c11 c22 - c12^2); dividing avoids the
    # cancellation in (trace - root) / 2 when d2 is small
    det = max(n1 * n2 * (c11 * c22 - c12 ** 2), 0.0)
    d2sq = min(det / d1sq, d1sq) if d1sq > 0 else 0.0
    return d1sq, d2sq


def _class_values(cfg: PopulationConfig, dsq: float) -> tuple[float, float]:
    """Unit-normalised (v1, v2) solving the two-equation eigen system.

    (d^2 - n1 c11) v1 = n2 c12 v2 and n1 c12 v1 = (d^2 - n2 c22) v2; whichever
    equation is better conditioned fixes the direction.
    """
    n1, n2 = cfg.n1, cfg.n2
    a = np.array([cfg.n2 * cfg.c12, dsq - n1 * cfg.c11])
    b = np.array([dsq - n2 * cfg.c22, cfg.n1 * cfg.c12])
    vec = a if np.linalg.norm(a) >= np.linalg.norm(b) else b
    norm = math.sqrt(n1 * vec[0] ** 2 + n2 * vec[1] ** 2)
    if norm == 0.0:
        raise NumericFailure("eigen system is degenerate; no direction recovered")
    v1, v2 = vec / norm
    total = n1 * v1 + n2 * v2
    if total < 0 or (abs(total) <= CASE_RTOL * (n1 * abs(v1) + n2 * abs(v2)) and v1 < 0):
        v1, v2 = -v1, -v2
    return float(v1), float(v2)


def _distinct(values, scale: float) -> bool:
    return not _close(values[0], values[1], scale)


def classify_clustering_power(cfg: PopulationConfig) -> PopulationEigen:
    d1sq, d2sq = population_eigenvalues(cfg)
    n1, n2 = cfg.n1, cfg.n2
    c11, c22, c12 = cfg.c11, cfg.c22, cfg.c12
    vscale = 1.0 / math.sqrt(min(n1, n2))

    if _close(c12 ** 2, c11 * c22, max(c12 ** 2, c11 * c22)):
        v1 = _class_values(cfg, d1sq)
        return PopulationEigen(d1sq, 0.0, Case.A, True, False, v1, None)

    cscale = max(math.sqrt(c11 * c22), 0.5 * (c11 + c22))
    if abs(c12) <= CASE_RTOL * cscale:
        if _close(n1 * c11, n2 * c22, max(n1 * c11, n2 * c22)):
            # eigenspace is two-dimensional; report the class indicators
            return PopulationEigen(d1sq, d2sq, Case.B, True, True,
                                   (1.0 / math.sqrt(n1), 0.0),
                                   (0.0, 1.0 / math.sqrt(n2)), identifiable=False)
        v1 = _class_values(cfg, d1sq)
        v2 = _class_values(cfg, d2sq)
        return PopulationEigen(d1sq, d2sq, Case.C, True, True, v1, v2)

    v1 = _class_values(cfg, d1sq)
    v2 = _class_values(cfg, d2sq)
    lhs = n1 * c11 + n2 * c12
    rhs = n2 * c22 + n1 * c12
    if _close(lhs, rhs, n1 * c11 + n2 * abs(c12) + n2 * c22 + n1 * abs(c12)):
        # the constant eigenvector has eigenvalue lhs; it is the one closer to it
        flat_first = abs(d1sq - lhs) <= abs(d2sq - lhs)
        return PopulationEigen(d1sq, d2sq, Case.D_SINGLE,
                               not flat_first, flat_first, v1, v2)
    return PopulationEigen(d1sq, d2sq, Case.D_BOTH,
                           _distinct(v1, vscale), _distinct(v2, vscale), v1, v2)


def default_oracle_cn(n: int, p: int) -> float:
    return 1.0 / math.log(n + p)


def oracle_select(pe: PopulationEigen, c_n: float, procedure: int = 2) -> Selection:
    """Eigenvector selection with the population quantities known.

    ``procedure=2`` applies the ratio test d1^2/d2^2 < 1 + c_n before the
    two-value check; ``procedure=1`` builds the set from the two-value checks
    alone.
    """
    if c_n <= 0:
        raise InvalidArgument("c_n must be positive")
    vscale = max(abs(pe.values1[0]), abs(pe.values1[1]), 1e-300)
    u1_power = pe.d1sq > 0 and _distinct(pe.values1, vscale)
    if procedure == 1:
        if not u1_power:
            return Selection.SECOND
        if pe.d2sq > 0 and pe.values2 is not None and _distinct(pe.values2, vscale):
            return Selection.FIRST_AND_SECOND
        return Selection.FIRST
    if procedure != 2:
        raise InvalidArgument(f"unknown procedure {procedure!r}")
    if pe.d2sq == 0:
        log.info("d2^2 = 0: eigenvalue ratio treated as infinite")
    elif pe.d1sq / pe.d2sq < 1.0 + c_n:
        return Selection.BOTH
    return Selection.FIRST if u1_power else Selection.SECOND


def centered_leading_eigenvalue(cfg: PopulationConfig, delta_sq: float | None = None) -> float:
    """Leading eigenvalue after subtracting the expected sample mean.

    The centered mean matrix has rank one, so this is its only nonzero
    eigenvalue: n1 n2 ||mu_1 - mu_2||^2 / n.
    """
    implied = cfg.delta_sq
    if delta_sq is None:
        delta_sq = implied
    elif abs(delta_sq - implied) > 1e-10 * max(1.0, abs(implied)):
        raise InvalidArgument(f"delta_sq={delta_sq!r} inconsistent with c11+c22-2c12={implied!r}")
    return cfg.n1 * cfg.n2 * max(delta_sq, 0.0) / cfg.n


def population_singular(mu1, mu2, labels):
    """(d1, d2, U, W) for E X: population singular values, right (n x 2) and
    left (p x 2) singular vectors. ``labels`` is 1 for class mu_1."""
    mu1 = np.asarray(mu1, dtype=float)
    mu2 = np.asarray(mu2, dtype=float)
    y = np.asarray(labels).astype(bool)
    EX = np.where(y[None, :], mu1[:, None], mu2[:, None])
    Uf, s, Vt = np.linalg.svd(EX, full_matrices=False)
    return float(s[0]), float(s[1]), Vt[:2].T.copy(), Uf[:, :2].copy()
