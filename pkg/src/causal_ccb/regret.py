"""Regret minimization: the three causal bandit algorithms and two baselines.

All algorithms share one protocol: every round an intervention is played on
the ground-truth model, the full node vector is observed, and regret is
measured against the best expected reward.  Replications of the same
configuration are simulated side by side (vectorized over runs); every run
owns its own random streams, so a run's trajectory does not depend on which
other runs share its batch.

Linear-family runs (identity links, or the continuous linear variant) use
the batched engine.  GLM runs with non-identity links go through a slower
per-run path that refits the maximum-likelihood estimate and evaluates the
oracle by Monte Carlo.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .discovery import (
    AncestorRelation,
    InitObservationLog,
    bglm_ancestors,
    init_schedule,
    nogap_blm_ancestors,
    true_relation,
)
from .estimation import (
    EllipsoidEstimate,
    NodeDataset,
    confidence_radius_lr,
    confidence_radius_ofu,
    mle_estimate,
    second_init_length,
    theta_prime,
)
from .links import extend_link_range
from .model import (
    NULL,
    ActionSet,
    CausalModel,
    Intervention,
    ModelConstants,
    marginals,
    propagate,
    true_zeta,
)
from .oracle import EstimatedModel, optimistic_action, safe_inverse, tie_break, ucb_values
from .rng import derive_seed, run_generators

CAUSAL = ("bglm-ofu-unknown", "blm-lr-unknown", "blm-lr-unknown-sg")
BASELINES = ("ucb", "eps-greedy")
ALGORITHMS = CAUSAL + BASELINES


@dataclass(frozen=True)
class RunConfig:
    algorithm: str
    T: int
    c0: float = 0.1
    c1: float = 0.1
    constants: ModelConstants | None = None
    seed: int = 0
    action_budget: int = 2
    action_value: int = 1
    actions: tuple[Intervention, ...] | None = None
    rho_scale: float = 1.0
    scope: str = "all"
    skip_second_init: bool = False
    refit_every: int = 1
    epsilon: float = 0.02
    oracle_paths: int = 10_000
    discovery: str = "estimate"
    theta_source: str = "estimate"

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.T < 1:
            raise ValueError("T must be positive")
        if not self.c0 > 0 or not self.c1 > 0:
            raise ValueError("c0 and c1 must be positive")
        if self.rho_scale < 0:
            raise ValueError("rho_scale must be non-negative")
        if self.refit_every < 1:
            raise ValueError("refit_every must be at least 1")
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.discovery not in ("estimate", "true"):
            raise ValueError("discovery must be 'estimate' or 'true'")
        if self.theta_source not in ("estimate", "true"):
            raise ValueError("theta_source must be 'estimate' or 'true'")
        if self.scope not in ("all", "y-only"):
            raise ValueError("scope must be 'all' or 'y-only'")


def action_set(env: CausalModel, cfg: RunConfig) -> ActionSet:
    if cfg.actions is not None:
        acts = ActionSet(tuple(cfg.actions))
    else:
        acts = ActionSet.budget(env, min(cfg.action_budget, len(env.intervenable)), cfg.action_value)
    for a in acts:
        env.check_intervention(a)
    return acts


def default_constants(env: CausalModel) -> ModelConstants:
    """Constants read off the model (zeta by enumeration when feasible)."""
    L1 = max(link.L1 for link in env.links[1:])
    L2 = max(link.L2 for link in env.links[1:])
    try:
        zeta = true_zeta(env) if not env.continuous else 1.0
    except ValueError:
        zeta = 1.0
    zeta = min(1.0, zeta) if zeta > 0 else 1.0
    return ModelConstants(kappa=env.kappa(), L1_max=L1, L2_max=L2, zeta=zeta, c_lm=1.0)


@dataclass
class RegretTrace:
    """Per-round record of one run."""

    actions: np.ndarray
    catalog: list[str]
    y: np.ndarray
    expected: np.ndarray
    optimal_value: float
    algorithm: str = ""
    seed: int = 0
    init_rounds: int = 0
    relation: AncestorRelation | None = None
    wall_time: float = 0.0

    def __len__(self) -> int:
        return int(self.actions.shape[0])

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def inst_regret(self) -> np.ndarray:
        return self.optimal_value - self.expected

    @property
    def cum_regret(self) -> np.ndarray:
        return np.cumsum(self.inst_regret)

    @property
    def total_regret(self) -> float:
        return float(self.cum_regret[-1]) if len(self) else 0.0

    def action_labels(self) -> list[str]:
        return [self.catalog[c] for c in self.actions]

    def rows(self):
        cum = self.cum_regret
        inst = self.inst_regret
        for k in range(len(self)):
            yield (k + 1, self.catalog[self.actions[k]], float(self.y[k]), float(self.expected[k]), float(inst[k]), float(cum[k]))


class Catalog:
    """Every intervention a run may play, with exact expected rewards.

    The configured action set comes first, then the atomic interventions
    that initialization phases use.  The optimal value is the maximum over
    the whole catalog, i.e. over the action set completed with the null and
    atomic interventions.
    """

    def __init__(self, env: CausalModel, actions: ActionSet):
        items = list(actions) + [a for a in ActionSet.atomic(env) if a not in set(actions)]
        self.env = env
        self.items = items
        self.code = {a: k for k, a in enumerate(items)}
        self.labels = [a.label() for a in items]
        mode = "exact-linear" if env.is_blm else "enumerate"
        self.rewards = np.array([marginals(env, a, mode)[-1] for a in items])
        self.optimal_value = float(self.rewards.max())
        N = env.N
        self.mask = np.zeros((len(items), N), dtype=bool)
        self.vals = np.zeros((len(items), N))
        for k, a in enumerate(items):
            self.mask[k], self.vals[k] = env.clamp_vectors(a)


def compute_regret(
    rows: Sequence[tuple[int, Intervention, float]], env: CausalModel, actions: ActionSet
) -> RegretTrace:
    """Fill expected rewards and regrets for ``(t, action, y)`` rows."""
    cat = Catalog(env, actions)
    codes = []
    for _, a, _ in rows:
        if a not in cat.code:
            cat.items.append(a)
            cat.code[a] = len(cat.items) - 1
            cat.labels.append(a.label())
            mode = "exact-linear" if env.is_blm else "enumerate"
            cat.rewards = np.append(cat.rewards, marginals(env, a, mode)[-1])
        codes.append(cat.code[a])
    codes_arr = np.asarray(codes, dtype=np.int64)
    return RegretTrace(
        actions=codes_arr,
        catalog=list(cat.labels),
        y=np.asarray([r[2] for r in rows], dtype=float),
        expected=cat.rewards[codes_arr] if len(codes) else np.zeros(0),
        optimal_value=cat.optimal_value,
    )


class BatchSampler:
    """Steps ``R`` independent copies of the environment in lockstep.

    Each run's thresholds come from its own generator in chunks; the stream
    is consumed exactly as repeated single-sample calls would consume it.
    """

    def __init__(self, model: CausalModel, rngs: Sequence[np.random.Generator], chunk: int = 1024):
        self.model = model
        self.rngs = list(rngs)
        self.chunk = chunk
        self.widths = np.array([ns.width for ns in model.noise])
        self.noisy = model.has_noise
        self.pos = chunk

    def _refill(self) -> None:
        N = self.model.N
        shape = (self.chunk, 2, N) if self.noisy else (self.chunk, N)
        self.buf = np.stack([rng.random(shape) for rng in self.rngs])
        self.pos = 0

    def step(self, mask: np.ndarray, vals: np.ndarray) -> np.ndarray:
        if self.pos >= self.chunk:
            self._refill()
        u = self.buf[:, self.pos]
        self.pos += 1
        if self.noisy:
            gamma, eps = u[:, 0], (2.0 * u[:, 1] - 1.0) * self.widths
        else:
            gamma, eps = u, None
        R = len(self.rngs)
        mask = np.broadcast_to(mask, (R, self.model.N))
        vals = np.broadcast_to(vals, (R, self.model.N))
        return propagate(self.model, mask, vals, gamma, eps)


class PolicyDraws:
    """Chunked uniform draws from per-run policy generators."""

    def __init__(self, rngs: Sequence[np.random.Generator], width: int = 2, chunk: int = 1024):
        self.rngs = list(rngs)
        self.width = width
        self.chunk = chunk
        self.pos = chunk

    def next(self) -> np.ndarray:
        if self.pos >= self.chunk:
            self.buf = np.stack([rng.random((self.chunk, self.width)) for rng in self.rngs])
            self.pos = 0
        out = self.buf[:, self.pos]
        self.pos += 1
        return out


# -- entry points ----------------------------------------------------------------
def run_bglm_ofu_unknown(env: CausalModel, cfg: RunConfig) -> RegretTrace:
    return run_batch(env, replace(cfg, algorithm="bglm-ofu-unknown"), [cfg.seed])[0]


def run_blm_lr_unknown(env: CausalModel, cfg: RunConfig) -> RegretTrace:
    return run_batch(env, replace(cfg, algorithm="blm-lr-unknown"), [cfg.seed])[0]


def run_blm_lr_unknown_sg(env: CausalModel, cfg: RunConfig) -> RegretTrace:
    return run_batch(env, replace(cfg, algorithm="blm-lr-unknown-sg"), [cfg.seed])[0]


def run_ucb_baseline(env: CausalModel, cfg: RunConfig) -> RegretTrace:
    return run_batch(env, replace(cfg, algorithm="ucb"), [cfg.seed])[0]


def run_eps_greedy(env: CausalModel, cfg: RunConfig) -> RegretTrace:
    return run_batch(env, replace(cfg, algorithm="eps-greedy"), [cfg.seed])[0]


def run_seeds(env: CausalModel, cfg: RunConfig, base_seed: int, runs: int) -> list[RegretTrace]:
    """``runs`` replications with seeds derived from ``(base, run, algorithm)``."""
    seeds = [derive_seed(base_seed, r, cfg.algorithm) for r in range(runs)]
    return run_batch(env, cfg, seeds)


def init_plan(env: CausalModel, cfg: RunConfig) -> tuple[list[Intervention], int]:
    """Initialization schedule and the round where the iterative phase starts."""
    if cfg.algorithm in BASELINES:
        return [], 0
    mode = "two-thirds" if cfg.algorithm == "blm-lr-unknown" else "sqrt"
    sched = init_schedule(env.n, cfg.c0, cfg.T, mode, env.x_nodes)
    T1 = len(sched)
    if cfg.algorithm == "bglm-ofu-unknown" and not cfg.skip_second_init:
        consts = cfg.constants or default_constants(env)
        delta = 1.0 / (3 * env.n * math.sqrt(cfg.T))
        T1 += second_init_length(env.n, consts, delta)
    return sched, T1


def validate(env: CausalModel, cfg: RunConfig) -> None:
    if cfg.algorithm in CAUSAL:
        if not env.is_glm:
            raise ValueError("causal bandit algorithms reject tabulated models")
        if cfg.algorithm != "bglm-ofu-unknown" and not env.is_blm:
            raise ValueError("linear-regression algorithms need identity links")
        if env.continuous and cfg.algorithm != "blm-lr-unknown-sg":
            raise ValueError("continuous models are only supported by blm-lr-unknown-sg")
        sched, T1 = init_plan(env, cfg)
        if cfg.T < T1:
            raise ValueError(f"horizon T={cfg.T} is shorter than the initialization phase ({T1} rounds)")


def run_batch(env: CausalModel, cfg: RunConfig, seeds: Sequence[int]) -> list[RegretTrace]:
    """Run one configuration for every seed in ``seeds``."""
    validate(env, cfg)
    if not seeds:
        return []
    start = time.perf_counter()
    if cfg.algorithm in BASELINES:
        traces = _run_baseline(env, cfg, seeds)
    elif env.is_blm:
        traces = _run_linear(env, cfg, seeds)
    else:
        traces = [_run_glm_single(env, cfg, s) for s in seeds]
    per_run = (time.perf_counter() - start) / len(seeds)
    for tr in traces:
        tr.wall_time = per_run
    return traces


def _finish(cat: Catalog, codes: np.ndarray, ys: np.ndarray, cfg: RunConfig, seeds, init_rounds, relations=None):
    out = []
    for r, s in enumerate(seeds):
        out.append(
            RegretTrace(
                actions=codes[r],
                catalog=cat.labels,
                y=ys[r],
                expected=cat.rewards[codes[r]],
                optimal_value=cat.optimal_value,
                algorithm=cfg.algorithm,
                seed=int(s),
                init_rounds=init_rounds,
                relation=relations[r] if relations is not None else None,
            )
        )
    return out


# -- baselines ---------------------------------------------------------------------
def _run_baseline(env: CausalModel, cfg: RunConfig, seeds: Sequence[int]) -> list[RegretTrace]:
    acts = action_set(env, cfg)
    cat = Catalog(env, acts)
    R, A, T = len(seeds), len(acts), cfg.T
    gens = [run_generators(s) for s in seeds]
    sampler = BatchSampler(env, [g[0] for g in gens])
    draws = PolicyDraws([g[1] for g in gens])
    counts = np.zeros((R, A))
    sums = np.zeros((R, A))
    codes = np.zeros((R, T), dtype=np.int64)
    ys = np.zeros((R, T))
    ar = np.arange(R)
    for t in range(T):
        u = draws.next()
        if t < A:
            a = np.full(R, t)
        else:
            mean = sums / counts
            if cfg.algorithm == "ucb":
                a = np.argmax(mean + np.sqrt(math.log(t + 1) / counts), axis=1)
            else:
                greedy = np.argmax(mean, axis=1)
                explore = np.minimum((u[:, 1] * A).astype(np.int64), A - 1)
                a = np.where(u[:, 0] < cfg.epsilon, explore, greedy)
        X = sampler.step(cat.mask[a], cat.vals[a])
        y = X[:, -1]
        counts[ar, a] += 1
        sums[ar, a] += y
        codes[:, t] = a
        ys[:, t] = y
    return _finish(cat, codes, ys, cfg, seeds, 0)


# -- linear family (batched) -------------------------------------------------------
def _discover(env: CausalModel, cfg: RunConfig, sched, values: np.ndarray) -> AncestorRelation:
    if cfg.discovery == "true":
        return true_relation(env, cfg.scope)
    log = InitObservationLog(sched, values, env.nodes)
    if cfg.algorithm == "blm-lr-unknown":
        return nogap_blm_ancestors(log, cfg.c0, cfg.c1, cfg.T, cfg.scope)
    return bglm_ancestors(log, cfg.c0, cfg.c1, cfg.T, cfg.scope)


def _supports(env: CausalModel, used: list[AncestorRelation]):
    """Regressor index arrays (constant first, padded with the zero column)."""
    R, N = len(used), env.N
    regs = []
    for rel in used:
        per = [[0]]
        for j in range(1, N):
            name = env.nodes[j]
            anc = sorted(env.index(a) for a in rel.anc[name])
            per.append([0] + anc)
        regs.append(per)
    D = max(len(p) for per in regs for p in per)
    sup = np.full((R, N, D), N, dtype=np.int64)
    dlen = np.zeros((R, N), dtype=np.int64)
    order = np.zeros((R, N - 1), dtype=np.int64)
    for r, per in enumerate(regs):
        for j, p in enumerate(per):
            sup[r, j, : len(p)] = p
            dlen[r, j] = len(p)
        order[r] = [env.index(x) for x in used[r].topological_order()]
    return sup, dlen, order, D


def _true_theta(env: CausalModel, sup: np.ndarray, dlen: np.ndarray) -> np.ndarray:
    """Regression targets with dropped parents folded into the constant."""
    R, N, D = sup.shape
    means = marginals(env, NULL, "exact-linear")
    out = np.zeros((R, N, D))
    for r in range(R):
        for j in range(1, N):
            regs = list(sup[r, j, : dlen[r, j]])
            out[r, j, : len(regs)] = theta_prime(list(env.parents[j]), list(env.weights[j]), regs, means)
    return out


def _gather_rows(Xext: np.ndarray, sup: np.ndarray) -> np.ndarray:
    """Regressor vectors ``(R, N, D)`` for the current observation."""
    R = Xext.shape[0]
    return Xext[np.arange(R)[:, None, None], sup]


def _optimism(theta, Minv, rho, sup, dlen, order, cmask, cvals, N):
    """Optimistic node means ``(R, A, N + 1)`` for every run and action.

    Also returns the reward node's score before clipping at 1, used to rank
    actions whose clipped values tie.
    """
    R, A = cmask.shape[0], cmask.shape[1]
    ar = np.arange(R)
    P = np.zeros((R, A, N + 1))
    P[:, :, 0] = 1.0
    raw_y = np.zeros((R, A))
    # the constant node and clamped parents take exact values
    exact = np.concatenate([cmask, np.zeros((R, A, 1), dtype=bool)], axis=2)
    exact[:, :, 0] = True
    for s in range(order.shape[1]):
        j = order[:, s]
        d = int(dlen[ar, j].max())
        idx = sup[ar, j, :d]
        V = np.take_along_axis(P, np.broadcast_to(idx[:, None, :], (R, A, d)), axis=2)
        fixed = np.take_along_axis(exact, np.broadcast_to(idx[:, None, :], (R, A, d)), axis=2)
        raw = ucb_values(theta[ar, j, :d], Minv[ar, j, :d, :d], rho, V, clip=False, fixed=fixed)
        is_y = j == N - 1
        raw_y[is_y] = raw[is_y]
        cm = cmask[ar, :, j]
        cv = cvals[ar, :, j]
        P[ar, :, j] = np.where(cm, cv, np.minimum(raw, 1.0))
    return P, raw_y


def _run_linear(env: CausalModel, cfg: RunConfig, seeds: Sequence[int]) -> list[RegretTrace]:
    acts = action_set(env, cfg)
    cat = Catalog(env, acts)
    R, N, n, T, A = len(seeds), env.N, env.n, cfg.T, len(acts)
    sched, T1 = init_plan(env, cfg)
    T0 = len(sched)
    gens = [run_generators(s) for s in seeds]
    sampler = BatchSampler(env, [g[0] for g in gens])
    ties = PolicyDraws([g[1] for g in gens], width=1)
    codes = np.zeros((R, T), dtype=np.int64)
    ys = np.zeros((R, T))

    # phase 1: block interventions
    Xinit = np.zeros((R, T0, N))
    for t, a in enumerate(sched):
        k = cat.code[a]
        X = sampler.step(cat.mask[k], cat.vals[k])
        Xinit[:, t] = X
        codes[:, t] = k
        ys[:, t] = X[:, -1]
    relations = [_discover(env, cfg, sched, Xinit[r]) for r in range(R)]
    used = [rel.acyclic() for rel in relations]
    sup, dlen, order, D = _supports(env, used)
    ar = np.arange(R)

    pad = (np.arange(D)[None, None, :] >= dlen[:, :, None]).astype(float)
    M = np.zeros((R, N, D, D))
    M[..., np.arange(D), np.arange(D)] = pad
    b = np.zeros((R, N, D))
    observe = np.ones(N, dtype=bool)
    observe[0] = False
    ridge = cfg.algorithm != "bglm-ofu-unknown"
    if ridge:
        M[..., np.arange(D), np.arange(D)] = 1.0
    # the constant node is never regressed; keep its block inert
    M[:, 0, 0, 0] = 1.0

    def update(X: np.ndarray, clamped: np.ndarray) -> None:
        Xext = np.concatenate([X, np.zeros((R, 1))], axis=1)
        V = _gather_rows(Xext, sup)
        w = (~clamped & observe[None, :]).astype(float)
        Vw = V * w[:, :, None]
        M[...] += Vw[:, :, :, None] * V[:, :, None, :]
        b[...] += Vw * X[:, :, None]

    if not ridge:
        for t, a in enumerate(sched):
            update(Xinit[:, t], np.broadcast_to(cat.mask[cat.code[a]], (R, N)))
        k0 = cat.code[NULL]
        for t in range(T0, T1):
            X = sampler.step(cat.mask[k0], cat.vals[k0])
            codes[:, t] = k0
            ys[:, t] = X[:, -1]
            update(X, np.broadcast_to(cat.mask[k0], (R, N)))
    del Xinit

    if cfg.algorithm == "bglm-ofu-unknown":
        consts = cfg.constants or default_constants(env)
        rho_const = cfg.rho_scale * confidence_radius_ofu(consts.kappa, 1.0 / (3 * n * math.sqrt(T)))
    delta_lr = 1.0 / (n * math.sqrt(T))
    fixed = _true_theta(env, sup, dlen) if cfg.theta_source == "true" else None

    amask = cat.mask[:A]
    avals = cat.vals[:A]
    cmask = np.broadcast_to(amask[None], (R, A, N))
    cvals = np.broadcast_to(avals[None], (R, A, N))
    for t in range(T1, T):
        if ridge:
            rho = cfg.rho_scale * confidence_radius_lr(n, t, delta_lr)
        else:
            rho = rho_const
        try:
            Minv = np.linalg.inv(M)
        except np.linalg.LinAlgError:
            Minv = np.stack([np.stack([safe_inverse(M[r, j]) for j in range(N)]) for r in range(R)])
        theta = fixed if fixed is not None else np.einsum("rnde,rne->rnd", Minv, b)
        P, raw_y = _optimism(theta, Minv, rho, sup, dlen, order, cmask, cvals, N)
        a = tie_break(P[:, :, N - 1], raw_y, ties.next()[:, 0])
        X = sampler.step(amask[a], avals[a])
        codes[:, t] = a
        ys[:, t] = X[:, -1]
        update(X, amask[a])
    return _finish(cat, codes, ys, cfg, seeds, T0, relations)


# -- general GLM path (per run) ------------------------------------------------------
def _run_glm_single(env: CausalModel, cfg: RunConfig, seed: int) -> RegretTrace:
    acts = action_set(env, cfg)
    cat = Catalog(env, acts)
    T, N, n = cfg.T, env.N, env.n
    sched, T1 = init_plan(env, cfg)
    env_rng, _ = run_generators(seed)
    sampler = BatchSampler(env, [env_rng])
    codes = np.zeros(T, dtype=np.int64)
    ys = np.zeros(T)
    rows = np.zeros((T, N))
    for t in range(T1):
        a = sched[t] if t < len(sched) else NULL
        k = cat.code[a]
        X = sampler.step(cat.mask[k], cat.vals[k])[0]
        rows[t] = X
        codes[t] = k
        ys[t] = X[-1]
    rel = _discover(env, cfg, sched, rows[: len(sched)])
    used = rel.acyclic()
    consts = cfg.constants or default_constants(env)
    rho = cfg.rho_scale * confidence_radius_ofu(consts.kappa, 1.0 / (3 * n * math.sqrt(T)))
    regs = {
        name: [0] + sorted(env.index(x) for x in used.anc[name]) for name in used.nodes
    }
    links = {name: extend_link_range(env.links[env.index(name)], len(regs[name]) - 1) for name in used.nodes}
    counts: dict[str, dict[bytes, list]] = {name: {} for name in used.nodes}

    def record(X: np.ndarray, clamp: np.ndarray) -> None:
        for name in used.nodes:
            j = env.index(name)
            if clamp[j]:
                continue
            V = X[regs[name]]
            key = V.tobytes() + X[j : j + 1].tobytes()
            ent = counts[name].get(key)
            if ent is None:
                counts[name][key] = [V.copy(), float(X[j]), 1.0]
            else:
                ent[2] += 1.0

    for t in range(T1):
        record(rows[t], cat.mask[codes[t]])
    estimates: dict[str, EllipsoidEstimate] = {}
    warm: dict[str, np.ndarray] = {}
    for t in range(T1, T):
        if (t - T1) % cfg.refit_every == 0 or not estimates:
            for name in used.nodes:
                ents = list(counts[name].values())
                d = len(regs[name])
                if ents:
                    data = NodeDataset(np.array([e[0] for e in ents]), [e[1] for e in ents], [e[2] for e in ents])
                else:
                    data = NodeDataset.empty(d)
                est = mle_estimate(data, links[name], theta0=warm.get(name))
                warm[name] = est.theta_hat
                estimates[name] = est.with_rho(rho)
        if cfg.theta_source == "true":
            means = marginals(env, NULL, "enumerate")
            for name in used.nodes:
                j = env.index(name)
                th = theta_prime(list(env.parents[j]), list(env.weights[j]), regs[name], means)
                estimates[name] = EllipsoidEstimate(th, estimates[name].M, rho)
        em = EstimatedModel(used, estimates, links)
        a, _, _ = optimistic_action(em, acts, paths=cfg.oracle_paths, seed=derive_seed(seed, t, "oracle"))
        k = cat.code[a]
        X = sampler.step(cat.mask[k], cat.vals[k])[0]
        codes[t] = k
        ys[t] = X[-1]
        record(X, cat.mask[k])
    return _finish(cat, codes[None], ys[None], cfg, [seed], len(sched), [rel])[0]
