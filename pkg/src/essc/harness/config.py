"""Plain-text key-value configuration.

One ``key = value`` pair per line; ``#`` starts a comment. Experiment keys:

    model           preset id 1-5, or a path to a mixture spec file
    grid            comma list of sweep values (p for models 1-4, n for 5;
                    n for an inline mixture)
    reps            replicates per grid value
    methods         comma list from ESSC, KMEANS, SC1, SC2, DEMEANED, SIGN, ORACLE
    seed            master seed
    tau, delta      optional threshold override (both or neither)
    jobs            worker processes (results do not depend on it)
    kmeans.restarts, kmeans.max_iters, kmeans.tol, kmeans.init

Mixture spec keys:

    n, pi           sample size and class-1 probability
    mu1, mu2        comma list; ``v*k`` repeats v k times
    cov             ``identity <s>``, ``ar1 <rho>`` or ``dense <file>`` (.npy or text)
    label_mode      bernoulli (default) or balanced
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ..algorithm import ThresholdSchedule
from ..datagen import CovarianceSpec, CovKind, MixtureSpec, model_preset
from ..errors import InvalidArgument
from ..kmeans import KMeansConfig
from .methods import parse_methods


class ConfigError(InvalidArgument):
    pass


def parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _num(value: str, key: str, kind=float):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as {kind.__name__}") from None


def parse_vector(text: str, key: str = "vector") -> np.ndarray:
    parts = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "*" in tok:
            v, k = tok.split("*", 1)
            parts.extend([_num(v, key)] * _num(k, key, int))
        else:
            parts.append(_num(tok, key))
    if not parts:
        raise ConfigError(f"{key}: empty vector")
    return np.array(parts)


def format_vector(v) -> str:
    """Run-length form accepted by :func:`parse_vector`."""
    v = np.asarray(v, dtype=float)
    runs, i = [], 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[j + 1] == v[i]:
            j += 1
        x = repr(float(v[i]))
        runs.append(f"{x}*{j - i + 1}" if j > i else x)
        i = j + 1
    return ", ".join(runs)


def _load_matrix(path: str) -> np.ndarray:
    if path.endswith(".npy"):
        return np.load(path)
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    return np.loadtxt(path, delimiter="," if "," in first else None)


def mixture_from_text(text: str, base_dir: str = ".") -> MixtureSpec:
    kv = parse_kv(text)
    for key in ("n", "mu1", "mu2", "cov"):
        if key not in kv:
            raise ConfigError(f"mixture spec is missing {key!r}")
    mu1 = parse_vector(kv["mu1"], "mu1")
    mu2 = parse_vector(kv["mu2"], "mu2")
    p = mu1.size
    kind, _, arg = kv["cov"].partition(" ")
    kind, arg = kind.strip().lower(), arg.strip()
    if kind == "identity":
        cov = CovarianceSpec.identity(p, _num(arg or "1", "cov"))
    elif kind == "ar1":
        cov = CovarianceSpec.ar1(p, _num(arg, "cov"))
    elif kind == "dense":
        path = arg if os.path.isabs(arg) else os.path.join(base_dir, arg)
        cov = CovarianceSpec.dense(_load_matrix(path))
    else:
        raise ConfigError(f"cov: unknown kind {kind!r}")
    return MixtureSpec(mu1, mu2, cov, _num(kv.get("pi", "0.5"), "pi"), _num(kv["n"], "n", int),
                       label_mode=kv.get("label_mode", "bernoulli"), name=kv.get("name", "inline"))


def mixture_to_text(spec: MixtureSpec, dense_path: str | None = None) -> str:
    c = spec.cov
    if c.kind is CovKind.IDENTITY_SCALED:
        cov = f"identity {c.param!r}"
    elif c.kind is CovKind.AR1:
        cov = f"ar1 {c.param!r}"
    else:
        if dense_path is None:
            raise ConfigError("a dense covariance needs a file path")
        np.save(dense_path, c.matrix)
        cov = f"dense {dense_path}"
    lines = [f"name = {spec.name or 'inline'}", f"n = {spec.n}", f"pi = {spec.pi!r}",
             f"mu1 = {format_vector(spec.mu1)}", f"mu2 = {format_vector(spec.mu2)}",
             f"cov = {cov}", f"label_mode = {spec.label_mode}"]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExperimentConfig:
    model: int | MixtureSpec
    grid: tuple[int, ...]
    reps: int
    methods: tuple[str, ...] = ("ESSC", "KMEANS")
    seed: int = 0
    kmeans: KMeansConfig = field(default_factory=KMeansConfig)
    thresholds: ThresholdSchedule | None = None
    jobs: int = 1
    source_text: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(int(g) for g in self.grid))
        object.__setattr__(self, "methods", parse_methods(self.methods))
        if self.reps < 1:
            raise InvalidArgument("reps must be >= 1")
        if not self.grid:
            raise InvalidArgument("grid must be non-empty")
        if self.jobs < 1:
            raise InvalidArgument("jobs must be >= 1")
        if isinstance(self.model, int):
            for g in self.grid:
                model_preset(self.model, g)  # validates against the preset grid

    def spec_for(self, value: int) -> MixtureSpec:
        if isinstance(self.model, MixtureSpec):
            m = self.model
            return MixtureSpec(m.mu1, m.mu2, m.cov, m.pi, value, m.label_mode, m.name)
        return model_preset(self.model, value)

    def to_text(self) -> str:
        if self.source_text is not None:
            return self.source_text
        model = self.model if isinstance(self.model, int) else f"<inline {self.model.name}>"
        k = self.kmeans
        lines = [f"model = {model}", f"grid = {', '.join(map(str, self.grid))}",
                 f"reps = {self.reps}", f"methods = {', '.join(self.methods)}",
                 f"seed = {self.seed}", f"kmeans.restarts = {k.restarts}",
                 f"kmeans.max_iters = {k.max_iters}", f"kmeans.tol = {k.tol!r}",
                 f"kmeans.init = {k.init.value}"]
        if self.thresholds is not None:
            lines += [f"tau = {self.thresholds.tau!r}", f"delta = {self.thresholds.delta!r}"]
        return "\n".join(lines) + "\n"


KNOWN_KEYS = {"model", "grid", "reps", "methods", "seed", "tau", "delta", "jobs",
              "kmeans.restarts", "kmeans.max_iters", "kmeans.tol", "kmeans.init"}


def experiment_from_text(text: str, base_dir: str = ".") -> ExperimentConfig:
    kv = parse_kv(text)
    unknown = set(kv) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    for key in ("model", "grid", "reps"):
        if key not in kv:
            raise ConfigError(f"experiment config is missing {key!r}")
    model = resolve_model(kv["model"], base_dir)
    km = KMeansConfig(restarts=_num(kv.get("kmeans.restarts", "30"), "kmeans.restarts", int),
                      max_iters=_num(kv.get("kmeans.max_iters", "300"), "kmeans.max_iters", int),
                      tol=_num(kv.get("kmeans.tol", "1e-9"), "kmeans.tol"),
                      init=kv.get("kmeans.init", "kmeans++"))
    th = None
    if ("tau" in kv) != ("delta" in kv):
        raise ConfigError("tau and delta must be given together")
    if "tau" in kv:
        th = ThresholdSchedule(_num(kv["tau"], "tau"), _num(kv["delta"], "delta"))
    grid = tuple(_num(g.strip(), "grid", int) for g in kv["grid"].split(",") if g.strip())
    return ExperimentConfig(model=model, grid=grid, reps=_num(kv["reps"], "reps", int),
                            methods=kv.get("methods", "ESSC,KMEANS"),
                            seed=_num(kv.get("seed", "0"), "seed", int), kmeans=km,
                            thresholds=th, jobs=_num(kv.get("jobs", "1"), "jobs", int),
                            source_text=text)


def resolve_model(value: str, base_dir: str = "."):
    """Preset id, or the MixtureSpec stored in the named file."""
    value = value.strip()
    if value.isdigit():
        return int(value)
    path = value if os.path.isabs(value) else os.path.join(base_dir, value)
    if not os.path.exists(path):
        raise ConfigError(f"model {value!r} is neither a preset id nor a readable spec file")
    with open(path, encoding="utf-8") as fh:
        return mixture_from_text(fh.read(), os.path.dirname(path) or ".")
