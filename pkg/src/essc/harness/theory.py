"""Monte Carlo checks of the concentration results behind the selection rule."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import svds

from ..algorithm import default_thresholds
from ..baselines import sign_cluster_data
from ..datagen import CovarianceSpec, sample_dataset, theory_preset
from ..errors import InvalidArgument, NumericFailure
from ..linalg import top2_singular
from ..metrics import hamming_errors
from ..population import population_singular
from ..resolvent import NoiseMoments, TSolverConfig, det_f_convex, solve_t_values
from ..seeding import child
from .methods import METHOD_NAMES, parse_methods, run_method


class TheoryKind(str, enum.Enum):
    RATIO_MULT = "RATIO_MULT"
    RATIO_GAP = "RATIO_GAP"
    FLATNESS = "FLATNESS"
    EXACT_RECOVERY = "EXACT_RECOVERY"
    LOWER_BOUND = "LOWER_BOUND"
    TSOLVER = "TSOLVER"
    FLUCTUATION = "FLUCTUATION"


@dataclass
class TheoryReport:
    kind: TheoryKind
    params: dict
    # fraction of replicates in which the checked event held
    frequency: float | None
    target: float | None
    passed: bool
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "params": self.params, "frequency": self.frequency,
                "target": self.target, "passed": self.passed, "stats": self.stats}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=float)


def _quantiles(v) -> dict:
    q = np.quantile(np.asarray(v, dtype=float), [0.0, 0.05, 0.5, 0.95, 1.0])
    return dict(zip(("min", "q05", "median", "q95", "max"), map(float, q)))


def _frequency_report(kind, params, events, target, **stats) -> TheoryReport:
    freq = float(np.mean(events))
    return TheoryReport(kind, params, freq, target, freq >= target, stats)


def _require(params, *names):
    for k in names:
        if k not in params:
            raise InvalidArgument(f"{k!r} is required")
    if params.get("reps", 1) < 1:
        raise InvalidArgument("reps must be >= 1")


def _ratio_mult(p):
    _require(p, "n", "p", "reps")
    spec = theory_preset("multiplicity", p["n"], p["p"], signal=p.get("signal"))
    tau = default_thresholds(p["n"], p["p"]).tau
    ratios = [top2_singular(sample_dataset(spec, child(p["seed"], 0, r))[0]).ratio
              for r in range(p["reps"])]
    return _frequency_report(TheoryKind.RATIO_MULT, p, [x < 1 + tau for x in ratios],
                             p.get("target", 0.9), tau=tau, ratio=_quantiles(ratios))


def _ratio_gap(p):
    _require(p, "n", "p", "reps")
    ratio, c = p.get("ratio", 1.5), p.get("c", 0.5)
    if not ratio >= 1 + c:
        raise InvalidArgument("need ratio >= 1 + c for the gap regime")
    spec = theory_preset("gap", p["n"], p["p"], signal=p.get("signal"), ratio=ratio)
    ratios = [top2_singular(sample_dataset(spec, child(p["seed"], 0, r))[0]).ratio
              for r in range(p["reps"])]
    return _frequency_report(TheoryKind.RATIO_GAP, p, [x >= 1 + c / 2 for x in ratios],
                             p.get("target", 0.95), threshold=1 + c / 2, ratio=_quantiles(ratios))


def _flatness(p):
    _require(p, "n", "p", "reps")
    spec = theory_preset("flat", p["n"], p["p"], signal=p.get("signal"))
    fs, d1s = [], []
    for r in range(p["reps"]):
        X, y = sample_dataset(spec, child(p["seed"], 0, r))
        d1s.append(population_singular(spec.mu1, spec.mu2, y)[0])
        fs.append(abs(top2_singular(X).fstat))
    bounds = np.sqrt(2.0 * spec.sigma_n / np.array(d1s))
    return _frequency_report(TheoryKind.FLATNESS, p, np.array(fs) <= bounds,
                             p.get("target", 0.9), bound=float(bounds.mean()),
                             d1_over_sigma_n=float(np.mean(d1s) / spec.sigma_n),
                             fstat_abs=_quantiles(fs))


def _exact(p):
    _require(p, "n", "p", "reps")
    spec = theory_preset("exact_recovery", p["n"], p["p"], eps=p.get("eps", 0.25))
    errs = []
    for r in range(p["reps"]):
        X, y = sample_dataset(spec, child(p["seed"], 0, r))
        errs.append(hamming_errors(sign_cluster_data(X).assignment, y))
    counts = {str(k): int(v) for k, v in zip(*np.unique(errs, return_counts=True))}
    return _frequency_report(TheoryKind.EXACT_RECOVERY, p, [e == 0 for e in errs],
                             p.get("target", 0.9), error_counts=counts)


def _lower(p):
    _require(p, "n", "p", "reps")
    methods = parse_methods(p.get("methods", METHOD_NAMES))
    floor = p.get("floor", 0.4)
    spec = theory_preset("lower_bound", p["n"], p["p"], scale=p.get("scale", 0.01))
    rates = {m: [] for m in methods}
    for r in range(p["reps"]):
        X, y = sample_dataset(spec, child(p["seed"], 0, r, 0))
        for m in methods:
            res = run_method(m, X, seed=child(p["seed"], 0, r, 1), spec=spec)
            rates[m].append(hamming_errors(res.assignment, y) / y.size)
    means = {m: float(np.mean(v)) for m, v in rates.items()}
    return TheoryReport(TheoryKind.LOWER_BOUND, p, None, floor,
                        all(v >= floor for v in means.values()), {"mean_rate": means})


def _admissible_config(rng):
    n, p = (int(v) for v in rng.integers(50, 400, size=2))
    kind = rng.integers(3)
    if kind == 0:
        cov = CovarianceSpec.identity(p, float(rng.uniform(0.5, 3.0)))
    elif kind == 1:
        cov = CovarianceSpec.ar1(p, float(rng.uniform(-0.9, 0.9)))
    else:
        A = rng.standard_normal((p, p)) / math.sqrt(p)
        cov = CovarianceSpec.dense(A @ A.T + 0.1 * np.eye(p))
    sigma_n = cov.operator_norm * math.sqrt(n + p)
    # d2 well above sigma_n^{4/3}, d1 - d2 a fraction of sqrt(d2)
    d2 = float(rng.uniform(2.0, 6.0)) * sigma_n ** (4.0 / 3.0)
    d1 = d2 + float(rng.uniform(0.0, 0.5)) * math.sqrt(d2)
    Wl, _ = np.linalg.qr(rng.standard_normal((p, 2)))
    return n, p, cov, d1, d2, Wl


def _tsolver(p):
    _require(p, "reps")
    rng = np.random.default_rng(child(p["seed"], 0))
    ok_root = ok_convex = ok_rate = 0
    worst = 0.0
    failures = []
    for i in range(p["reps"]):
        n, pp, cov, d1, d2, Wl = _admissible_config(rng)
        m = NoiseMoments.from_covariance(cov.dense_matrix(), Wl[:, 0], Wl[:, 1], n)
        cfg = TSolverConfig.for_problem(d1, d2, cov.operator_norm, n, pp)
        try:
            t1, t2 = solve_t_values(d1, d2, m, cfg)
        except NumericFailure as exc:
            failures.append(f"config {i}: {exc}")
            continue
        ok_root += cfg.a_n <= t2 <= t1 <= cfg.b_n
        ok_convex += det_f_convex(d1, d2, m, cfg)
        scaled = max(abs(t1 - d1), abs(t2 - d2)) / (cfg.sigma_n ** 2 / d2)
        worst = max(worst, scaled)
        ok_rate += scaled <= 10.0
    reps = p["reps"]
    freq = min(ok_root, ok_convex, ok_rate) / reps
    return TheoryReport(TheoryKind.TSOLVER, p, freq, 1.0, freq >= 1.0,
                        {"roots_in_interval": ok_root, "convex": ok_convex, "rate_ok": ok_rate,
                         "max_scaled_error": worst, "failures": failures})


def _fluctuation(p):
    _require(p, "reps")
    ns = tuple(p.get("ns", (200, 400, 800)))
    if len(ns) < 2:
        raise InvalidArgument("ns needs at least two sizes")
    sds, norms = {}, {}
    for gi, n in enumerate(ns):
        spec = theory_preset("gap", n, n, signal=p.get("signal"), ratio=p.get("ratio", 1.5))
        y0 = np.zeros(n, dtype=np.int64)
        y0[: n // 2] = 1
        d1, d2, _, Wl = population_singular(spec.mu1, spec.mu2, y0)
        mom = NoiseMoments.from_covariance(spec.cov.dense_matrix(), Wl[:, 0], Wl[:, 1], n)
        t1, _ = solve_t_values(d1, d2, mom, TSolverConfig.for_problem(d1, d2, 1.0, n, n))
        diffs, wn = [], []
        for r in range(p["reps"]):
            X, y = sample_dataset(spec, child(p["seed"], gi, r))
            diffs.append(top2_singular(X).t1 - t1)
            E = X - np.where(y[None, :] == 1, spec.mu1[:, None], spec.mu2[:, None])
            wn.append(float(svds(E, k=1, v0=np.ones(n), return_singular_vectors=False)[0]))
        sds[n] = float(np.std(diffs, ddof=1))
        norms[n] = float(np.mean(wn))
    sd_growth = max(sds.values()) / min(sds.values())
    norm_growth = norms[ns[-1]] / norms[ns[0]]
    expected = math.sqrt(ns[-1] / ns[0])
    passed = sd_growth < 2.0 and abs(norm_growth / expected - 1.0) < 0.25
    return TheoryReport(TheoryKind.FLUCTUATION, p, None, 2.0, passed,
                        {"sd_t1_error": sds, "mean_noise_norm": norms, "sd_growth": sd_growth,
                         "noise_norm_growth": norm_growth, "sqrt_n_growth": expected})


_DISPATCH = {
    TheoryKind.RATIO_MULT: _ratio_mult,
    TheoryKind.RATIO_GAP: _ratio_gap,
    TheoryKind.FLATNESS: _flatness,
    TheoryKind.EXACT_RECOVERY: _exact,
    TheoryKind.LOWER_BOUND: _lower,
    TheoryKind.TSOLVER: _tsolver,
    TheoryKind.FLUCTUATION: _fluctuation,
}


def verify_theory(kind, **params) -> TheoryReport:
    """Run one verification suite. Common params: n, p, reps, seed."""
    try:
        kind = TheoryKind(str(kind).upper())
    except ValueError:
        raise InvalidArgument(f"unknown kind {kind!r}; choose from "
                              f"{', '.join(k.value for k in TheoryKind)}") from None
    params = {k: v for k, v in params.items() if v is not None}
    params.setdefault("seed", 0)
    return _DISPATCH[kind](params)
