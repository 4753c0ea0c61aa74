"""Command line entry point (``ccb``)."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from ..discovery import InitObservationLog, bglm_ancestors, discover, nogap_blm_ancestors
from ..instances import pe_arms
from ..model import ActionSet, CausalModel, Intervention, sample_many
from ..pure_exploration import DEFAULT_CAP, EssentialGraph, causal_pe_unknown, pure_lucb, true_means
from ..regret import ALGORITHMS
from .config import ConfigError, ExperimentSpec, load_model, load_spec
from .plot import emit_plot
from .presets import EXPERIMENTS, INSTANCES, experiment, instance
from .runner import output_dir, read_aggregate, run_experiment


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ConfigError(message)


def _positive_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1 or v != float(text):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--model", help="model file (YAML)")
    g.add_argument("--preset", choices=sorted(INSTANCES), help="built-in instance")


def _load(args) -> CausalModel:
    if args.model:
        return load_model(args.model)
    return instance(args.preset or "appendix-e")


def _write_text(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------------
def cmd_simulate(args) -> int:
    model = _load(args)
    if args.samples < 1:
        raise ConfigError("--samples must be at least 1")
    a = Intervention.parse(args.do or "do()")
    model.check_intervention(a)
    rng = np.random.default_rng(args.seed)
    X = sample_many(model, a, rng, args.samples)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("action",) + model.nodes)
        label = a.label()
        for row in X:
            w.writerow((label,) + tuple(repr(float(v)) if model.continuous else int(v) for v in row))
    finally:
        if args.out:
            out.close()
    print(f"mean {model.y}: {X[:, -1].mean():.6f}", file=sys.stderr)
    return 0


def _read_log(path: str, model: CausalModel) -> InitObservationLog:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0] != "action" or tuple(header[1:]) != model.nodes:
            raise ConfigError("log must have columns action," + ",".join(model.nodes))
        acts, rows = [], []
        for rec in reader:
            acts.append(Intervention.parse(rec[0]))
            rows.append([float(v) for v in rec[1:]])
    return InitObservationLog(acts, np.array(rows).reshape(len(rows), model.N), model.nodes)


def cmd_discover(args) -> int:
    model = _load(args)
    if args.log:
        log = _read_log(args.log, model)
        test = bglm_ancestors if args.mode == "sqrt" else nogap_blm_ancestors
        rel = test(log, args.c0, args.c1, args.T, args.scope)
    else:
        rel, _ = discover(model, args.c0, args.c1, args.T, args.mode, np.random.default_rng(args.seed), args.scope)
    _write_text("\n".join(rel.to_lines()) + "\n", args.out)
    return 0


def _spec_from_args(args) -> ExperimentSpec:
    if args.config:
        spec = load_spec(args.config)
    else:
        spec = ExperimentSpec(preset=None if args.model else (args.preset or "appendix-e"), model_file=args.model)
    over = {
        "algorithms": [a for chunk in args.algo for a in chunk.split(",")] if args.algo else None,
        "horizons": args.T,
        "runs": args.runs,
        "seed": args.seed,
        "rho_scale": args.rho_scale,
        "c0": args.c0,
        "c1": args.c1,
        "scope": args.scope,
        "trace_stride": args.trace_stride,
        "out": args.out,
    }
    for k, v in over.items():
        if v is not None:
            setattr(spec, k, v)
    if args.skip_second_init:
        spec.skip_second_init = True
    spec.validate()
    return spec


def cmd_regret(args) -> int:
    spec = _spec_from_args(args)
    rows = run_experiment(spec, workers=args.workers)
    for r in rows:
        print(f"{r.algorithm:>18s}  T={r.T:<7d} mean={r.mean_cum_regret:.3f}  se={r.stderr:.3f}")
    print(f"wrote {output_dir(spec)}", file=sys.stderr)
    return 0


def cmd_reproduce(args) -> int:
    name = "appendix-e-small" if args.small else "appendix-e"
    spec = experiment(name, runs=args.runs, seed=args.seed, out=args.out)
    rows = run_experiment(spec, workers=args.workers)
    out = output_dir(spec)
    emit_plot(rows, out / "regret.svg")
    for r in rows:
        print(f"{r.algorithm:>18s}  T={r.T:<7d} mean={r.mean_cum_regret:.3f}  se={r.stderr:.3f}")
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_plot(args) -> int:
    rows = read_aggregate(args.inp)
    if not rows:
        raise ConfigError("aggregate file has no rows")
    emit_plot(rows, args.out)
    return 0


def cmd_pure_explore(args) -> int:
    model = _load(args)
    if not args.eps > 0 or not 0 < args.delta < 1:
        raise ConfigError("need --eps > 0 and 0 < --delta < 1")
    arms = pe_arms(model) if args.arms == "pe" else list(ActionSet.atomic(model))
    if args.baseline:
        res = pure_lucb(model, args.eps, args.delta, args.cap, args.seed, arms, trace=bool(args.trace))
    else:
        eg = EssentialGraph.fully_oriented(model) if args.oriented else EssentialGraph.from_model(model)
        res = causal_pe_unknown(model, eg, args.eps, args.delta, args.cap, args.seed, arms, trace=bool(args.trace))
    report = {
        "algorithm": "pure-lucb" if args.baseline else "causal-pe-unknown",
        "arm": res.arm.label(),
        "samples": res.samples,
        "rounds": res.rounds,
        "certified": res.certified,
        "bounds": {a.label(): [float(s.L), float(s.U)] for a, s in zip(res.arms, res.states)},
    }
    if res.graph is not None:
        report["oriented"] = sorted(f"{a}->{b}" for a, b in res.graph.directed)
        report["undirected"] = sorted("-".join(sorted(e)) for e in res.graph.undirected)
    if args.truth:
        mu = true_means(model, arms)
        report["true_means"] = {a.label(): float(m) for a, m in zip(arms, mu)}
        report["eps_optimal"] = bool(mu[res.index] >= mu.max() - args.eps)
    _write_text(yaml.safe_dump(report, sort_keys=False), args.out)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            cols = ["t", "samples", "a_h", "a_l", "L_h", "U_l", "undirected"]
            w = csv.DictWriter(fh, cols, lineterminator="\n")
            w.writeheader()
            w.writerows(res.trace)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ccb", description="Causal bandit simulations, regret experiments and pure exploration.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="sample a model under an intervention")
    _model_args(s)
    s.add_argument("--do", help="intervention, e.g. X2=1,X3=0 (default: none)")
    s.add_argument("--samples", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="CSV file (default: stdout)")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("discover", help="run interventional ancestor discovery")
    _model_args(d)
    d.add_argument("--T", type=_positive_int, required=True)
    d.add_argument("--c0", type=float, default=0.1)
    d.add_argument("--c1", type=float, default=0.1)
    d.add_argument("--mode", choices=("sqrt", "two-thirds"), default="sqrt")
    d.add_argument("--scope", choices=("all", "y-only"), default="all")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--log", help="initialization log CSV (as written by simulate) instead of sampling")
    d.add_argument("--out", help="adjacency list file (default: stdout)")
    d.set_defaults(func=cmd_discover)

    r = sub.add_parser("regret", help="regret experiment over algorithms and horizons")
    _model_args(r)
    r.add_argument("--config", help="experiment spec file (YAML); flags override it")
    r.add_argument("--algo", action="append", help=f"algorithm id(s): {', '.join(ALGORITHMS)}")
    r.add_argument("--T", type=_positive_int, nargs="+")
    r.add_argument("--runs", type=_positive_int)
    r.add_argument("--seed", type=int)
    r.add_argument("--rho-scale", type=float)
    r.add_argument("--c0", type=float)
    r.add_argument("--c1", type=float)
    r.add_argument("--scope", choices=("all", "y-only"))
    r.add_argument("--skip-second-init", action="store_true")
    r.add_argument("--trace-stride", type=_positive_int)
    r.add_argument("--workers", type=_positive_int)
    r.add_argument("--out")
    r.set_defaults(func=cmd_regret)

    e = sub.add_parser("pure-explore", help="best-arm identification over atomic interventions")
    _model_args(e)
    e.add_argument("--eps", type=float, default=0.05)
    e.add_argument("--delta", type=float, default=0.05)
    e.add_argument("--cap", type=_positive_int, default=DEFAULT_CAP)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--arms", choices=("atomic", "pe"), default="atomic", help="'pe' leaves out do(X1=x)")
    e.add_argument("--oriented", action="store_true", help="give the learner every edge orientation")
    e.add_argument("--baseline", action="store_true", help="run the pure-LUCB baseline instead")
    e.add_argument("--truth", action="store_true", help="report true means by enumeration")
    e.add_argument("--trace", help="per-round trace CSV")
    e.add_argument("--out", help="report file (default: stdout)")
    e.set_defaults(func=cmd_pure_explore)

    a = sub.add_parser("reproduce-appendix-e", help="full regret sweep on the seven-node BLM, with plot")
    a.add_argument("--small", action="store_true", help=f"desk-scale preset ({EXPERIMENTS['appendix-e-small']['runs']} runs)")
    a.add_argument("--runs", type=_positive_int)
    a.add_argument("--seed", type=int)
    a.add_argument("--workers", type=_positive_int)
    a.add_argument("--out")
    a.set_defaults(func=cmd_reproduce)

    pl = sub.add_parser("plot", help="SVG of mean cumulative regret against T")
    pl.add_argument("--in", dest="inp", required=True, help="aggregate CSV")
    pl.add_argument("--out", required=True, help="SVG file")
    pl.set_defaults(func=cmd_plot)
    return p


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"ccb: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
