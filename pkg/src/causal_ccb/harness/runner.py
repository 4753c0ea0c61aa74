"""Replication runner: regret experiments to CSV."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .. import __version__
from ..model import CausalModel
from ..regret import RegretTrace, RunConfig, run_batch
from ..rng import derive_seed
from .config import ConfigError, ExperimentSpec, load_model, model_to_dict
from .presets import instance

OUTPUT_ENV = "CCB_OUTPUT_DIR"
TRACE_COLUMNS = ("run_id", "t", "action_id", "y", "expected_reward", "inst_regret", "cum_regret")
AGGREGATE_COLUMNS = ("T", "algorithm", "mean_cum_regret", "stderr")


@dataclass
class AggregateRow:
    T: int
    algorithm: str
    mean_cum_regret: float
    stderr: float


def resolve_model(spec: ExperimentSpec) -> CausalModel:
    if spec.model_file is not None:
        return load_model(spec.model_file)
    return instance(spec.preset)


def output_dir(spec: ExperimentSpec) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or spec.out)


def _config(spec: ExperimentSpec, algorithm: str, T: int) -> RunConfig:
    return RunConfig(
        algorithm=algorithm,
        T=int(T),
        c0=spec.c0,
        c1=spec.c1,
        rho_scale=spec.rho_scale,
        scope=spec.scope,
        skip_second_init=spec.skip_second_init,
        action_budget=spec.action_budget,
        epsilon=spec.epsilon,
        seed=spec.seed,
    )


def run_seeds_for(spec: ExperimentSpec, algorithm: str) -> list[int]:
    """Per-run seeds ``derive_seed(base, run, algorithm)``; shared across horizons."""
    return [derive_seed(spec.seed, r, algorithm) for r in range(spec.runs)]


def _job(args) -> tuple[str, int, list[RegretTrace]]:
    spec, model, algorithm, T = args
    seeds = run_seeds_for(spec, algorithm)
    return algorithm, T, run_batch(model, _config(spec, algorithm, T), seeds)


def aggregate(totals: dict[tuple[str, int], list[float]]) -> list[AggregateRow]:
    rows = []
    for (algo, T), vals in sorted(totals.items()):
        v = np.asarray(vals, dtype=float)
        se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
        rows.append(AggregateRow(T, algo, float(v.mean()), se))
    rows.sort(key=lambda r: (r.algorithm, r.T))
    return rows


def _fmt(x: float) -> str:
    return repr(float(x))


def write_trace(path: Path, traces: list[RegretTrace], stride: int) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for run_id, tr in enumerate(traces):
            n = len(tr)
            cum = tr.cum_regret
            inst = tr.inst_regret
            keep = [k for k in range(n) if (k + 1) % stride == 0 or k == n - 1]
            for k in keep:
                w.writerow(
                    (run_id, k + 1, tr.catalog[tr.actions[k]], _fmt(tr.y[k]), _fmt(tr.expected[k]), _fmt(inst[k]), _fmt(cum[k]))
                )


def write_aggregate(path: Path, rows: list[AggregateRow]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_COLUMNS)
        for r in rows:
            w.writerow((r.T, r.algorithm, _fmt(r.mean_cum_regret), _fmt(r.stderr)))


def read_aggregate(path: str | Path) -> list[AggregateRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != AGGREGATE_COLUMNS:
            raise ConfigError(f"{path}: expected columns {','.join(AGGREGATE_COLUMNS)}")
        return [AggregateRow(int(r["T"]), r["algorithm"], float(r["mean_cum_regret"]), float(r["stderr"])) for r in reader]


def run_experiment(spec: ExperimentSpec, workers: int | None = None, write: bool = True) -> list[AggregateRow]:
    """Run every (algorithm, horizon) pair; write traces, aggregate and metadata.

    Jobs go to a process pool of ``workers`` (default: available CPUs);
    output order does not depend on completion order.
    """
    spec.validate()
    model = resolve_model(spec)
    jobs = [(spec, model, a, int(T)) for a in spec.algorithms for T in spec.horizons]
    workers = workers or os.cpu_count() or 1
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    if workers == 1 or len(jobs) == 1:
        results = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_job, jobs))
    results.sort(key=lambda r: (r[0], r[1]))
    totals = {(a, T): [tr.total_regret for tr in traces] for a, T, traces in results}
    rows = aggregate(totals)
    if write:
        out = output_dir(spec)
        (out / "traces").mkdir(parents=True, exist_ok=True)
        for a, T, traces in results:
            write_trace(out / "traces" / f"{a}_T{T}.csv", traces, spec.trace_stride)
        write_aggregate(out / "aggregate.csv", rows)
        meta = {
            "version": __version__,
            "spec": spec.as_dict(),
            "model": model_to_dict(model),
            "workers": workers,
            "jobs": [
                {
                    "algorithm": a,
                    "T": T,
                    "seeds": run_seeds_for(spec, a),
                    "init_rounds": traces[0].init_rounds if traces else 0,
                    "wall_time_per_run": traces[0].wall_time if traces else 0.0,
                }
                for a, T, traces in results
            ],
        }
        (out / "metadata.yaml").write_text(yaml.safe_dump(meta, sort_keys=False))
    return rows
