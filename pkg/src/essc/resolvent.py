"""Population limits t_1, t_2 of the sample singular values.

t_1 >= t_2 are the zeros of det f(z) on [d2 - sigma_n, d1 + sigma_n], where
f is built from the resolvent series of the noise part W of the linearization
matrix, truncated after the second moment. Only Gaussian facts are used:
E W = 0, E W^3 = 0 and a closed form for E W^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import InvalidArgument, NoRootError, NumericFailure

# a minimum of det f at or below this is a tangent (double) root
TANGENT_ATOL = 1e-14


@dataclass(frozen=True)
class NoiseMoments:
    """Second-moment data of the noise needed by f(z).

    ``quad[k, l] = w_k^T Sigma w_l`` for the left population singular vectors
    w_1, w_2 of E X; ``trace = tr(Sigma)``; ``n`` is the sample size.
    """
    trace: float
    quad: np.ndarray
    n: int

    @classmethod
    def from_covariance(cls, Sigma, w1, w2, n: int) -> "NoiseMoments":
        Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
        Wl = np.column_stack([w1, w2])
        return cls(float(np.trace(Sigma)), Wl.T @ Sigma @ Wl, int(n))

    def blocks(self):
        """(P, M): v_k^T E W^2 v_l and v_k^T E W^2 v_{-l}.

        With W the noise of [[0, X^T], [X, 0]], E W^2 is block diagonal with
        tr(Sigma) I_n on the sample block and n Sigma on the feature block.
        The order follows from the block products E^T E and E E^T.
        """
        eye = np.eye(2)
        P = 0.5 * (self.trace * eye + self.n * self.quad)
        M = 0.5 * (self.trace * eye - self.n * self.quad)
        return P, M


@dataclass(frozen=True)
class TSolverConfig:
    sigma_n: float
    a_n: float
    b_n: float
    truncation_L: int = 2
    root_tolerance: float | None = None

    def __post_init__(self):
        if self.truncation_L < 2:
            raise InvalidArgument("truncation_L must be >= 2")
        if self.truncation_L > 3:
            # E W^4 would need fourth-moment quadratic forms
            raise InvalidArgument("only truncation_L in {2, 3} is supported")
        if not self.a_n < self.b_n:
            raise InvalidArgument(f"empty interval [{self.a_n}, {self.b_n}]")
        if self.a_n <= 0:
            raise InvalidArgument("a_n = d2 - sigma_n must be positive")

    @property
    def xtol(self) -> float:
        return self.root_tolerance if self.root_tolerance is not None else 1e-9 * self.b_n

    @classmethod
    def for_problem(cls, d1: float, d2: float, sigma_op: float, n: int, p: int,
                    **kw) -> "TSolverConfig":
        """sigma_n = ||Sigma|| sqrt(n + p), a_n = d2 - sigma_n, b_n = d1 + sigma_n."""
        sigma_n = sigma_op * math.sqrt(n + p)
        return cls(sigma_n=sigma_n, a_n=d2 - sigma_n, b_n=d1 + sigma_n, **kw)


def f_matrix(z: float, d1: float, d2: float, moments: NoiseMoments) -> np.ndarray:
    """f(z) = I + D (R(V,V) - R(V,V-) (-D + R(V-,V-))^{-1} R(V-,V)).

    R(M1, M2, z) = -(z^{-1} M1^T M2 + z^{-3} M1^T E W^2 M2); the l = 1 and
    l = 3 terms vanish for Gaussian noise.
    """
    eye = np.eye(2)
    D = np.diag([d1, d2])
    P, M = moments.blocks()
    r_vv = -(eye / z + P / z ** 3)
    r_vm = -M / z ** 3
    r_mm = -(eye / z + P / z ** 3)
    inner = r_vv - r_vm @ np.linalg.solve(-D + r_mm, r_vm.T)
    return eye + D @ inner


def det_f(z: float, d1: float, d2: float, moments: NoiseMoments) -> float:
    return float(np.linalg.det(f_matrix(z, d1, d2, moments)))


def det_f_convex(d1, d2, moments: NoiseMoments, cfg: TSolverConfig, points: int = 100) -> bool:
    """Positive second differences of det f on a uniform grid of the interval."""
    grid = np.linspace(cfg.a_n, cfg.b_n, points)
    vals = np.array([det_f(z, d1, d2, moments) for z in grid])
    return bool(np.all(np.diff(vals, 2) > 0))


def solve_t_values(d1: float, d2: float, moments: NoiseMoments,
                   cfg: TSolverConfig) -> tuple[float, float]:
    """Zeros t_1 >= t_2 of det f on [a_n, b_n].

    det f is convex there, so its minimiser splits the interval into two
    brackets with at most one zero each. A minimum that touches zero is a
    double root and is returned as t_1 = t_2.
    """
    if not (d1 >= d2 > 0):
        raise InvalidArgument("need d1 >= d2 > 0")
    a, b = cfg.a_n, cfg.b_n

    def h(z):
        return det_f(z, d1, d2, moments)

    res = optimize.minimize_scalar(h, bounds=(a, b), method="bounded",
                                   options={"xatol": cfg.xtol})
    z_min, h_min = float(res.x), float(res.fun)
    if h_min > TANGENT_ATOL:
        raise NoRootError(f"det f stays positive on [{a:.6g}, {b:.6g}] (min {h_min:.3g} at "
                          f"{z_min:.6g}); signal-strength assumptions likely violated",
                          iterations=int(res.nfev))
    if h_min >= 0.0:
        t1 = t2 = z_min
    else:
        ha, hb = h(a), h(b)
        t2 = optimize.brentq(h, a, z_min, xtol=cfg.xtol) if ha > 0 else None
        t1 = optimize.brentq(h, z_min, b, xtol=cfg.xtol) if hb > 0 else None
        if t1 is None and t2 is None:
            raise NoRootError("det f is not positive at either end of the interval")
        # a single sign change leaves one root; report it twice
        t1 = t2 if t1 is None else t1
        t2 = t1 if t2 is None else t2

    bound = 10.0 * cfg.sigma_n ** 2 / d2 + 10.0 * cfg.xtol
    if abs(t1 - d1) > bound or abs(t2 - d2) > bound:
        raise NumericFailure(f"roots ({t1:.6g}, {t2:.6g}) violate |t_k - d_k| <= {bound:.6g}")
    return t1, t2


def second_order_t(d: float, p_entry: float) -> float:
    """d + v^T E W^2 v / d, the second-order location of a root."""
    return d + p_entry / d


def realized_quadforms(E: np.ndarray, U: np.ndarray, Wl: np.ndarray) -> np.ndarray:
    """V^T W V for the realised noise E = X - E X.

    v_k = (u_k, w_k) / sqrt(2), so v_i^T W v_j = (u_i^T E^T w_j + w_i^T E u_j) / 2.
    """
    B = Wl.T @ E @ U  # B[i, j] = w_i^T E u_j
    return 0.5 * (B.T + B)


def g_matrix_diagnostic(z: float, vwv: np.ndarray, f_at_z: np.ndarray, D) -> np.ndarray:
    """g(z) = z^2 D^{-1} f(z) - V^T W V."""
    D = np.asarray(D, dtype=float)
    if D.ndim == 1:
        D = np.diag(D)
    d = np.diag(D)
    if np.any(d == 0):
        raise InvalidArgument("D must have nonzero diagonal")
    return z ** 2 * np.diag(1.0 / d) @ np.asarray(f_at_z) - np.asarray(vwv)
