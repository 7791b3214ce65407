import math

import numpy as np
import pytest

from essc.datagen import CovarianceSpec
from essc.errors import InvalidArgument, NoRootError
from essc.resolvent import (NoiseMoments, TSolverConfig, det_f, det_f_convex, f_matrix,
                            g_matrix_diagnostic, realized_quadforms, second_order_t,
                            solve_t_values)


def _setup(n=40, p=30, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.standard_normal((n, 2)))
    Wl, _ = np.linalg.qr(rng.standard_normal((p, 2)))
    A = rng.standard_normal((p, p)) / math.sqrt(p)
    Sigma = scale * (A @ A.T + 0.5 * np.eye(p))
    return U, Wl, Sigma


def _f_full(z, d1, d2, U, Wl, Sigma):
    """f(z) assembled in R^{n+p} with E W^2 as an explicit block matrix."""
    n, p = U.shape[0], Wl.shape[0]
    EW2 = np.zeros((n + p, n + p))
    EW2[:n, :n] = np.trace(Sigma) * np.eye(n)
    EW2[n:, n:] = n * Sigma
    V = np.vstack([U, Wl]) / math.sqrt(2)
    Vm = np.vstack([U, -Wl]) / math.sqrt(2)

    def R(M1, M2):
        return -(M1.T @ M2 / z + M1.T @ EW2 @ M2 / z ** 3)

    D = np.diag([d1, d2])
    inner = R(V, V) - R(V, Vm) @ np.linalg.inv(-D + R(Vm, Vm)) @ R(Vm, V)
    return np.eye(2) + D @ inner


def test_f_matches_full_assembly():
    U, Wl, Sigma = _setup()
    m = NoiseMoments.from_covariance(Sigma, Wl[:, 0], Wl[:, 1], U.shape[0])
    for z in (20.0, 55.5, 140.0):
        assert np.allclose(f_matrix(z, 60.0, 50.0, m), _f_full(z, 60.0, 50.0, U, Wl, Sigma),
                           rtol=1e-12, atol=1e-12)


def test_second_moment_block_order():
    # E[E^T E] = tr(Sigma) I_n and E[E E^T] = n Sigma, by Monte Carlo
    n, p, reps = 6, 4, 20000
    cov = CovarianceSpec.ar1(p, 0.6)
    rng = np.random.default_rng(5)
    acc_n, acc_p = np.zeros((n, n)), np.zeros((p, p))
    for _ in range(reps):
        E = cov.apply_factor(rng.standard_normal((p, n)))
        acc_n += E.T @ E
        acc_p += E @ E.T
    assert np.allclose(acc_n / reps, cov.trace * np.eye(n), atol=0.15)
    assert np.allclose(acc_p / reps, n * cov.dense_matrix(), atol=0.2)


def test_zero_noise_roots_are_the_signal():
    m = NoiseMoments(0.0, np.zeros((2, 2)), 50)
    cfg = TSolverConfig(sigma_n=1.0, a_n=5.0, b_n=20.0)
    t1, t2 = solve_t_values(15.0, 10.0, m, cfg)
    assert t1 == pytest.approx(15.0, abs=10 * cfg.xtol)
    assert t2 == pytest.approx(10.0, abs=10 * cfg.xtol)


def test_roots_against_grid_scan():
    U, Wl, Sigma = _setup(n=120, p=80, seed=2)
    op = np.linalg.eigvalsh(Sigma)[-1]
    n, p = 120, 80
    sigma_n = op * math.sqrt(n + p)
    d2 = 4.0 * sigma_n ** (4 / 3)
    d1 = d2 + 0.3 * math.sqrt(d2)
    m = NoiseMoments.from_covariance(Sigma, Wl[:, 0], Wl[:, 1], n)
    cfg = TSolverConfig.for_problem(d1, d2, op, n, p)
    t1, t2 = solve_t_values(d1, d2, m, cfg)
    grid = np.linspace(cfg.a_n, cfg.b_n, 4001)
    vals = np.array([np.linalg.det(_f_full(z, d1, d2, U, Wl, Sigma)) for z in grid])
    crossings = grid[1:][np.sign(vals[1:]) != np.sign(vals[:-1])]
    step = grid[1] - grid[0]
    assert len(crossings) == 2
    assert t2 == pytest.approx(crossings[0], abs=step)
    assert t1 == pytest.approx(crossings[1], abs=step)
    assert det_f_convex(d1, d2, m, cfg)
    assert abs(t1 - d1) <= 10 * sigma_n ** 2 / d2


def test_second_order_location():
    n = p = 400
    Sigma = np.eye(p)
    Wl = np.eye(p)[:, :2]
    m = NoiseMoments.from_covariance(Sigma, Wl[:, 0], Wl[:, 1], n)
    sigma_n = math.sqrt(n + p)
    d = 5.0 * sigma_n ** (4 / 3)
    t1, t2 = solve_t_values(d * 1.01, d, m, TSolverConfig.for_problem(d * 1.01, d, 1.0, n, p))
    P, _ = m.blocks()
    assert t2 == pytest.approx(second_order_t(d, P[1, 1]), rel=1e-4)


def test_equal_signals_give_a_double_root():
    n = p = 200
    m = NoiseMoments.from_covariance(np.eye(p), np.eye(p)[:, 0], np.eye(p)[:, 1], n)
    d = 6.0 * math.sqrt(n + p) ** (4 / 3)
    t1, t2 = solve_t_values(d, d, m, TSolverConfig.for_problem(d, d, 1.0, n, p))
    assert t1 == pytest.approx(t2, rel=1e-6)


def test_no_root_in_interval():
    m = NoiseMoments(10.0, np.eye(2), 10)
    with pytest.raises(NoRootError):
        solve_t_values(30.0, 20.0, m, TSolverConfig(sigma_n=1.0, a_n=50.0, b_n=60.0))


def test_config_validation():
    with pytest.raises(InvalidArgument):
        TSolverConfig(1.0, 1.0, 2.0, truncation_L=4)
    with pytest.raises(InvalidArgument):
        TSolverConfig(1.0, 3.0, 2.0)
    with pytest.raises(InvalidArgument):
        TSolverConfig.for_problem(10.0, 1.0, 1.0, 50, 50)  # d2 below sigma_n


def test_realized_quadforms_and_g():
    rng = np.random.default_rng(3)
    n, p = 12, 9
    E = rng.standard_normal((p, n))
    U, _ = np.linalg.qr(rng.standard_normal((n, 2)))
    Wl, _ = np.linalg.qr(rng.standard_normal((p, 2)))
    W = np.zeros((n + p, n + p))
    W[:n, n:], W[n:, :n] = E.T, E
    V = np.vstack([U, Wl]) / math.sqrt(2)
    vwv = realized_quadforms(E, U, Wl)
    assert np.allclose(vwv, V.T @ W @ V)
    f = np.eye(2) * 0.5
    g = g_matrix_diagnostic(3.0, vwv, f, [2.0, 4.0])
    assert np.allclose(g, 9.0 * np.diag([0.25, 0.125]) - vwv)


def test_det_f_tends_to_one_far_out():
    m = NoiseMoments(5.0, np.eye(2), 10)
    assert det_f(1e8, 3.0, 2.0, m) == pytest.approx(1.0, abs=1e-6)
