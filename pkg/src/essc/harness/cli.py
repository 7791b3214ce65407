"""Command-line entry point: simulate, verify, cluster."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from ..algorithm import ThresholdSchedule
from ..errors import InvalidArgument, NumericFailure
from ..kmeans import KMeansConfig
from .config import ExperimentConfig, experiment_from_text, resolve_model
from .csvio import cluster_csv
from .simulate import build_id, run_simulation
from .theory import TheoryKind, verify_theory


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from None


def _thresholds(args):
    if (args.tau is None) != (args.delta is None):
        raise InvalidArgument("--tau and --delta must be given together")
    return None if args.tau is None else ThresholdSchedule(args.tau, args.delta)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="essc", description="Eigen-selected spectral clustering tools")
    ap.add_argument("--version", action="version", version=build_id())
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo sweep over a model grid")
    sim.add_argument("--config", help="key-value experiment file; flags override its values")
    sim.add_argument("--model", help="preset id 1-5 or a mixture spec file")
    sim.add_argument("--grid", type=_ints)
    sim.add_argument("--reps", type=int)
    sim.add_argument("--methods")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--jobs", type=int)
    sim.add_argument("--restarts", type=int, help="k-means restarts")
    sim.add_argument("--tau", type=float)
    sim.add_argument("--delta", type=float)
    sim.add_argument("--out", required=True)

    ver = sub.add_parser("verify", help="theory verification suites")
    ver.add_argument("--kind", required=True, choices=[k.value for k in TheoryKind])
    ver.add_argument("--n", type=int)
    ver.add_argument("--p", type=int)
    ver.add_argument("--reps", type=int, default=100)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--eps", type=float)
    ver.add_argument("--scale", type=float)
    ver.add_argument("--signal", type=float)
    ver.add_argument("--ratio", type=float)
    ver.add_argument("--ns", type=_ints, help="sample sizes for FLUCTUATION")
    ver.add_argument("--out", help="write the JSON report here instead of stdout")

    clu = sub.add_parser("cluster", help="cluster the rows of a CSV file")
    clu.add_argument("--input", required=True)
    clu.add_argument("--method", default="ESSC")
    clu.add_argument("--screen-keep", type=int)
    clu.add_argument("--raw-scores", action="store_true", help="screen on unnormalised KS scores")
    clu.add_argument("--subsample-target", type=int,
                     help="keep each row with probability target/n")
    clu.add_argument("--tau", type=float)
    clu.add_argument("--delta", type=float)
    clu.add_argument("--seed", type=int, default=0)
    clu.add_argument("--out", required=True)
    return ap


def _simulate(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        cfg = experiment_from_text(text, os.path.dirname(args.config) or ".")
    elif args.model is None or args.grid is None or args.reps is None:
        raise InvalidArgument("simulate needs --config or all of --model, --grid, --reps")
    else:
        cfg = None
    th = _thresholds(args)
    fields = {} if cfg is None else {
        "model": cfg.model, "grid": cfg.grid, "reps": cfg.reps, "methods": cfg.methods,
        "seed": cfg.seed, "kmeans": cfg.kmeans, "thresholds": cfg.thresholds, "jobs": cfg.jobs}
    overrides = {
        "model": resolve_model(args.model) if args.model else None,
        "grid": args.grid, "reps": args.reps, "methods": args.methods, "seed": args.seed,
        "kmeans": KMeansConfig(restarts=args.restarts) if args.restarts else None,
        "thresholds": th, "jobs": args.jobs}
    changed = {k: v for k, v in overrides.items() if v is not None}
    fields.update(changed)
    fields.setdefault("methods", ("ESSC", "KMEANS"))
    source = cfg.source_text if cfg is not None and not changed else None
    cfg = ExperimentConfig(source_text=source, **fields)
    report = run_simulation(cfg)
    report.write(args.out)
    sys.stdout.write(report.table())
    return 0


def _verify(args) -> int:
    params = {"n": args.n, "p": args.p, "reps": args.reps, "seed": args.seed, "eps": args.eps,
              "scale": args.scale, "signal": args.signal, "ratio": args.ratio,
              "ns": tuple(args.ns) if args.ns else None}
    rep = verify_theory(args.kind, **params)
    text = rep.to_json() + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{rep.kind.value}: {'PASS' if rep.passed else 'FAIL'}")
    else:
        sys.stdout.write(text)
    return 0 if rep.passed else 1


def _cluster(args) -> int:
    diag = cluster_csv(args.input, args.method, args.out, screen_keep=args.screen_keep,
                       seed=args.seed, thresholds=_thresholds(args),
                       subsample_target=args.subsample_target, raw_scores=args.raw_scores)
    line = f"method={diag['method']} n={diag['n']} p={diag['p']} branch={diag['branch']}"
    if "misclustering" in diag:
        line += f" misclustering={diag['misclustering']:.4f}"
    print(line)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"simulate": _simulate, "verify": _verify, "cluster": _cluster}[args.command](args)
    except (InvalidArgument, NumericFailure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
