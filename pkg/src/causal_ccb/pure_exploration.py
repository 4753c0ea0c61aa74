"""Best-arm identification over atomic interventions with partly unknown
edge orientations.

Arms are ``do()`` and every ``do(X=x)``.  Each round the learner observes
one null-intervention sample, which feeds back-door estimates for every arm
whose node has all incident edges oriented, and then runs the edge-recovery
step on the two LUCB arms.  Edge recovery intervenes on both values of a
node (and of one still-undirected neighbour); these samples both orient
edges and give interventional reward estimates.

The constant node is ignored here: it is never a parent for the back-door
adjustment and carries no orientation question.  ``n`` in every radius is
the number of intervenable nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import NULL, ActionSet, CausalModel, Intervention, do_difference, enumerate_assignments, expected_reward, sample_many

DEFAULT_CAP = 10_000_000


# -- essential graph -------------------------------------------------------------
@dataclass
class EssentialGraph:
    """Skeleton over the intervenable nodes and ``Y`` with some edges oriented.

    ``directed`` holds ``(parent, child)`` pairs; ``undirected`` holds
    unordered pairs whose orientation is still unknown.  Edges into ``Y``
    are always oriented (``Y`` is a sink).
    """

    nodes: tuple[str, ...]
    y: str
    directed: set[tuple[str, str]] = field(default_factory=set)
    undirected: set[frozenset[str]] = field(default_factory=set)

    def __post_init__(self) -> None:
        names = set(self.nodes) | {self.y}
        for a, b in self.directed:
            if a not in names or b not in names or a == b:
                raise ValueError(f"bad directed edge ({a}, {b})")
        for e in self.undirected:
            if len(e) != 2 or not e <= set(self.nodes):
                raise ValueError(f"bad undirected edge {sorted(e)}")
            a, b = sorted(e)
            if (a, b) in self.directed or (b, a) in self.directed:
                raise ValueError("edge listed both directed and undirected")

    @classmethod
    def from_model(
        cls, model: CausalModel, hidden: Iterable[tuple[str, str]] | None = None
    ) -> "EssentialGraph":
        """Skeleton of ``model`` with the orientation of ``hidden`` edges removed.

        By default every edge between two intervenable nodes is hidden, which
        is never less informative than the model's Markov equivalence class.
        """
        inter = set(model.intervenable)
        edges = [(a, b) for a, b in model.edges if a in inter]
        if hidden is None:
            hide = {frozenset(e) for e in edges if e[1] in inter}
        else:
            hide = {frozenset(e) for e in hidden}
            known = {frozenset(e) for e in edges}
            if not hide <= known:
                raise ValueError("hidden edges must be model edges")
            if any(model.y in e for e in hide):
                raise ValueError("edges into Y are always oriented")
        directed = {e for e in edges if frozenset(e) not in hide}
        return cls(tuple(model.intervenable), model.y, directed, hide)

    @classmethod
    def fully_oriented(cls, model: CausalModel) -> "EssentialGraph":
        return cls.from_model(model, hidden=())

    def copy(self) -> "EssentialGraph":
        return EssentialGraph(self.nodes, self.y, set(self.directed), set(self.undirected))

    def undirected_neighbors(self, x: str) -> list[str]:
        return sorted((next(iter(e - {x})) for e in self.undirected if x in e), key=self.nodes.index)

    def is_resolved(self, x: str) -> bool:
        return not any(x in e for e in self.undirected)

    def parents(self, x: str) -> list[str]:
        return sorted((a for a, b in self.directed if b == x), key=self.nodes.index)

    def orient(self, a: str, b: str) -> None:
        """Record ``a -> b``; decisions are final."""
        e = frozenset((a, b))
        if e not in self.undirected:
            return
        self.undirected.discard(e)
        self.directed.add((a, b))

    def is_consistent(self, model: CausalModel) -> bool:
        """Same skeleton as ``model`` and every oriented edge agrees with it."""
        inter = set(model.intervenable)
        truth = {(a, b) for a, b in model.edges if a in inter}
        skel = {frozenset(e) for e in truth}
        mine = {frozenset(e) for e in self.directed} | self.undirected
        return skel == mine and self.directed <= truth


# -- confidence radii ------------------------------------------------------------
def obs_confidence(T_a: int, n: int, Z_a: int, t: int, delta: float) -> float:
    """Back-door radius ``sqrt((12 / T_a) ln(16 n^2 Z_a t^3 / delta))``."""
    if T_a < 1 or t < 1 or n < 1 or Z_a < 1 or not 0 < delta < 1:
        raise ValueError("need T_a, t, n, Z_a >= 1 and 0 < delta < 1")
    return math.sqrt(12.0 / T_a * math.log(16.0 * n * n * Z_a * t**3 / delta))


def int_confidence(D_a: int, t: int, n: int, delta: float) -> float:
    """Interventional radius ``2 sqrt((1 / D_a) ln(2 n ln(2t) / delta))``."""
    if D_a < 1 or t < 1 or n < 1 or not 0 < delta < 1:
        raise ValueError("need D_a, t, n >= 1 and 0 < delta < 1")
    inner = 2.0 * n * math.log(2.0 * t) / delta
    return 2.0 * math.sqrt(max(math.log(inner), 0.0) / D_a)


def identification_radius(D: int, t: int, n: int, delta: float) -> float:
    """Half-width ``sqrt((2 / D) ln(4 n^2 t^2 / delta))`` of the orientation bounds."""
    if D < 1 or t < 1 or n < 1 or not 0 < delta < 1:
        raise ValueError("need D, t, n >= 1 and 0 < delta < 1")
    return math.sqrt(2.0 / D * math.log(4.0 * n * n * t * t / delta))


def do_calculus_estimate(
    r: Sequence[float], p: Sequence[float], T_z: Sequence[int], n: int, t: int, delta: float
) -> tuple[float, float]:
    """Back-door estimate ``sum_z r_z p_z`` and its radius.

    Returns ``(nan, inf)`` while some parent configuration has no sample.
    """
    T_z = np.asarray(T_z)
    if T_z.size == 0 or np.any(T_z < 1):
        return math.nan, math.inf
    mu = float(np.dot(np.asarray(r, dtype=float), np.asarray(p, dtype=float)))
    return mu, obs_confidence(int(T_z.min()), n, T_z.size, t, delta)


def intersect(L1: float, U1: float, L2: float, U2: float) -> tuple[float, float]:
    """Intersection of two intervals; an empty one collapses to the gap midpoint."""
    L, U = max(L1, L2), min(U1, U2)
    if L > U:
        L = U = 0.5 * (L + U)
    return L, U


def separated(a: tuple[float, float], b: tuple[float, float]) -> bool:
    """Whether two closed intervals are disjoint."""
    return a[1] < b[0] or b[1] < a[0]


# -- LUCB selection --------------------------------------------------------------
def lucb_select(bounds) -> tuple[int, int]:
    """``(a_h, a_l)``: best midpoint and, among the rest, highest upper bound.

    ``bounds`` is a sequence of ``(L, U)`` pairs or objects with ``L``/``U``
    attributes; ties go to the lowest index.
    """
    items = list(bounds)
    if len(items) < 2:
        raise ValueError("LUCB needs at least two arms")
    L = np.array([b.L if hasattr(b, "L") else b[0] for b in items], dtype=float)
    U = np.array([b.U if hasattr(b, "U") else b[1] for b in items], dtype=float)
    return _lucb(L, U)


def _lucb(L: np.ndarray, U: np.ndarray) -> tuple[int, int]:
    h = int(np.argmax(0.5 * (L + U)))
    rest = U.copy()
    rest[h] = -np.inf
    return h, int(np.argmax(rest))


# -- gap diagnostics -------------------------------------------------------------
@dataclass
class GapDiagnostics:
    gaps: np.ndarray
    q: np.ndarray
    order: np.ndarray
    H: np.ndarray
    m: int
    S: list[int]
    c_edge: dict[tuple[str, str], float] = field(default_factory=dict)
    c_arm: dict[str, float] = field(default_factory=dict)

    @property
    def H_total(self) -> float:
        return float(self.H[-1]) if self.H.size else 0.0


def reward_gaps(mu: Sequence[float]) -> np.ndarray:
    """Gap of every arm; the best arm's gap is its margin over the runner-up."""
    mu = np.asarray(mu, dtype=float)
    if mu.size < 2:
        raise ValueError("need at least two arms")
    best = int(np.argmax(mu))
    gaps = mu[best] - mu
    gaps[best] = mu[best] - np.max(np.delete(mu, best))
    return gaps


def gap_threshold(q: Sequence[float], gaps: Sequence[float], eps: float) -> GapDiagnostics:
    """Observation threshold ``m`` and the hard-to-observe arm set ``S``.

    Arms are sorted by ``q_a max(gap_a, eps/2)^2``, ``H_r`` are prefix sums of
    ``max(gap, eps/2)^-2`` in that order, and ``m`` is the smallest ``tau``
    for which at most ``tau`` arms have ``q_a max(gap_a, eps/2)^2 < 1 / H_tau``
    (``H_0 = 0``).
    """
    q = np.asarray(q, dtype=float)
    g = np.asarray(gaps, dtype=float)
    if q.shape != g.shape or q.ndim != 1:
        raise ValueError("q and gaps must be matching vectors")
    if np.any(q <= 0) or np.any(q > 1) or np.any(g < 0) or not eps > 0:
        raise ValueError("need q in (0, 1], gaps >= 0 and eps > 0")
    w = np.maximum(g, eps / 2.0) ** 2
    key = q * w
    order = np.argsort(key, kind="stable")
    H = np.cumsum(1.0 / w[order])
    m = len(q)
    for tau in range(len(q) + 1):
        lim = np.inf if tau == 0 else 1.0 / H[tau - 1]
        if int(np.sum(key < lim)) <= tau:
            m = tau
            break
    lim = np.inf if m == 0 else 1.0 / H[m - 1]
    S = [int(a) for a in np.flatnonzero(key < lim)]
    return GapDiagnostics(g, q, order, H, m, S)


def arm_q(model: CausalModel, arms: Sequence[Intervention]) -> np.ndarray:
    """``q_a = min_z P(X = x, Pa(X) = z)`` from the observational law (``do()`` gets 1)."""
    X, w = enumerate_assignments(model, NULL)
    out = []
    for a in arms:
        if len(a) == 0:
            out.append(1.0)
            continue
        (name, v), = a.assignments
        j = model.index(name)
        pa = [p for p in model.parents[j] if p != 0]
        best = 1.0
        for z in range(1 << len(pa)):
            sel = X[:, j] == v
            for k, p in enumerate(pa):
                sel &= X[:, p] == ((z >> (len(pa) - 1 - k)) & 1)
            best = min(best, float(w[sel].sum()))
        out.append(best)
    return np.array(out)


def edge_effects(model: CausalModel) -> tuple[dict[tuple[str, str], float], dict[str, float]]:
    """``c_e`` for every edge out of an intervenable node, and ``c_X`` per node."""
    c_edge = {}
    for a, b in model.edges:
        if a in model.intervenable:
            hi, lo = do_difference(model, a, b)
            c_edge[(a, b)] = hi - lo
    c_arm = {}
    for x in model.intervenable:
        vals = [c for (a, _), c in c_edge.items() if a == x]
        c_arm[x] = min(vals) if vals else math.inf
    return c_edge, c_arm


def diagnostics(model: CausalModel, eps: float, arms: Sequence[Intervention] | None = None) -> GapDiagnostics:
    """Gap diagnostics of ``model`` computed by enumeration."""
    arms = list(arms) if arms is not None else list(ActionSet.atomic(model))
    mu = [expected_reward(model, a, "enumerate") for a in arms]
    diag = gap_threshold(np.maximum(arm_q(model, arms), 1e-300), reward_gaps(mu), eps)
    diag.c_edge, diag.c_arm = edge_effects(model)
    return diag


# -- sampling --------------------------------------------------------------------
class _Sampler:
    """Buffered per-intervention sampling from one generator."""

    def __init__(self, model: CausalModel, rng: np.random.Generator, chunk: int = 256):
        self.model = model
        self.rng = rng
        self.chunk = chunk
        self.buf: dict[Intervention, tuple[np.ndarray, int]] = {}

    def draw(self, a: Intervention) -> np.ndarray:
        rows, k = self.buf.get(a, (None, self.chunk))
        if k >= self.chunk:
            rows, k = sample_many(self.model, a, self.rng, self.chunk), 0
        self.buf[a] = (rows, k + 1)
        return rows[k]


# -- arm bookkeeping ---------------------------------------------------------------
@dataclass
class ArmState:
    arm: Intervention
    T: int
    D: int
    Z: int
    known: bool
    T_z: np.ndarray
    r_z: np.ndarray
    p_z: np.ndarray
    mu_O: float
    mu_I: float
    L_O: float
    U_O: float
    L_I: float
    U_I: float
    L: float
    U: float

    @property
    def mu_hat(self) -> float:
        return 0.5 * (self.L + self.U)


@dataclass
class PEResult:
    arm: Intervention
    index: int
    samples: int
    certified: bool
    rounds: int
    arms: list[Intervention]
    states: list[ArmState]
    graph: EssentialGraph | None
    trace: list[dict] = field(default_factory=list)
    history: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    def bounds(self) -> list[tuple[float, float]]:
        return [(s.L, s.U) for s in self.states]


class PEState:
    """Mutable state of one pure-exploration run."""

    def __init__(self, env: CausalModel, eg: EssentialGraph | None, arms, eps, delta, rng, use_obs: bool):
        if env.continuous:
            raise ValueError("pure exploration needs binary nodes")
        if not eps > 0 or not 0 < delta < 1:
            raise ValueError("need eps > 0 and 0 < delta < 1")
        self.env = env
        self.eg = eg.copy() if eg is not None else None
        if self.eg is not None and (set(self.eg.nodes) != set(env.intervenable) or self.eg.y != env.y):
            raise ValueError("essential graph does not match the model's nodes")
        self.arms = list(arms) if arms is not None else list(ActionSet.atomic(env))
        if len(self.arms) < 2:
            raise ValueError("need at least two arms")
        for a in self.arms:
            if len(a) > 1:
                raise ValueError("only null and atomic interventions are supported")
            env.check_intervention(a)
        self.eps, self.delta = float(eps), float(delta)
        self.n = max(1, len(env.intervenable))
        self.sampler = _Sampler(env, rng)
        self.use_obs = use_obs
        K = len(self.arms)
        self.D = np.zeros(K, dtype=np.int64)
        self.ysum = np.zeros(K)
        self.L = np.zeros(K)
        self.U = np.ones(K)
        self.LO = np.full(K, -np.inf)
        self.UO = np.full(K, np.inf)
        self.LI = np.full(K, -np.inf)
        self.UI = np.full(K, np.inf)
        self.muO = np.full(K, np.nan)
        self.samples = 0
        self.t = 0
        # observational pattern counts over (intervenable nodes, Y)
        self.cols = [env.index(x) for x in env.intervenable] + [env.N - 1]
        self.nobs = 0
        self.cnt = np.zeros(1 << len(self.cols), dtype=np.int64)
        self.pat = np.arange(self.cnt.size)
        self.known: dict[int, dict] = {}
        # identification statistics per (node, value)
        self.id_n: dict[tuple[str, int], int] = {}
        self.id_sum: dict[tuple[str, int], np.ndarray] = {}
        self.arm_of = {a: k for k, a in enumerate(self.arms)}
        self.do = {(x, v): Intervention.of({x: v}) for x in env.intervenable for v in (0, 1)}
        if use_obs:
            self._refresh_known()

    # -- observational side --------------------------------------------------
    def _bit(self, name: str) -> np.ndarray:
        k = list(self.env.intervenable).index(name)
        return (self.pat >> k) & 1

    def _refresh_known(self) -> None:
        ybit = (self.pat >> (len(self.cols) - 1)) & 1
        for k, a in enumerate(self.arms):
            if k in self.known:
                continue
            if len(a) == 0:
                zidx = np.zeros(self.pat.size, dtype=np.int64)
                match = np.ones(self.pat.size, dtype=bool)
                Z = 1
            else:
                (x, v), = a.assignments
                if self.eg is None or not self.eg.is_resolved(x):
                    continue
                pa = [p for p in self.eg.parents(x) if p != self.eg.y]
                zidx = np.zeros(self.pat.size, dtype=np.int64)
                for p in pa:
                    zidx = 2 * zidx + self._bit(p)
                match = self._bit(x) == v
                Z = 1 << len(pa)
            c = self.cnt
            self.known[k] = {
                "zidx": zidx,
                "match": match,
                "ybit": ybit,
                "Z": Z,
                "P": np.bincount(zidx, weights=c, minlength=Z),
                "T": np.bincount(zidx[match], weights=c[match], minlength=Z),
                "R": np.bincount(zidx[match], weights=(c * ybit)[match], minlength=Z),
            }

    def _observe(self) -> None:
        row = self.sampler.draw(NULL)
        self.samples += 1
        p = 0
        for k, j in enumerate(self.cols):
            p |= int(row[j] > 0.5) << k
        self.cnt[p] += 1
        self.nobs += 1
        for st in self.known.values():
            z = st["zidx"][p]
            st["P"][z] += 1
            if st["match"][p]:
                st["T"][z] += 1
                st["R"][z] += st["ybit"][p]

    # -- interventional side -------------------------------------------------
    def _intervene(self, a: Intervention) -> np.ndarray:
        row = self.sampler.draw(a)
        self.samples += 1
        k = self.arm_of.get(a)
        if k is not None:
            self.D[k] += 1
            self.ysum[k] += row[-1]
        (x, v), = a.assignments
        key = (x, v)
        self.id_n[key] = self.id_n.get(key, 0) + 1
        self.id_sum[key] = self.id_sum.get(key, 0.0) + row
        return row

    def _id_interval(self, x: str, v: int, target: str) -> tuple[float, float] | None:
        D = self.id_n.get((x, v), 0)
        if D == 0:
            return None
        phat = self.id_sum[(x, v)][self.env.index(target)] / D
        w = identification_radius(D, max(self.t, 1), self.n, self.delta)
        return phat - w, phat + w

    def _check_edges(self, x: str) -> bool:
        """Orient every undirected edge at ``x`` whose test under ``do(x=.)`` separates."""
        changed = False
        for nb in self.eg.undirected_neighbors(x):
            i1 = self._id_interval(x, 1, nb)
            i0 = self._id_interval(x, 0, nb)
            if i1 is None or i0 is None:
                continue
            if separated(i1, i0):
                self.eg.orient(x, nb)
                changed = True
        return changed

    def recover_edge(self, k: int) -> None:
        a = self.arms[k]
        if len(a) == 0:
            return
        (x, _), = a.assignments
        self._intervene(self.do[(x, 1)])
        self._intervene(self.do[(x, 0)])
        if self.eg is None:
            return
        changed = self._check_edges(x)
        nbs = self.eg.undirected_neighbors(x)
        if nbs:
            nb = min(nbs, key=lambda m: (min(self.id_n.get((m, 0), 0), self.id_n.get((m, 1), 0)), self.eg.nodes.index(m)))
            self._intervene(self.do[(nb, 1)])
            self._intervene(self.do[(nb, 0)])
            changed |= self._check_edges(nb)
        if changed and self.use_obs:
            self._refresh_known()

    # -- bounds --------------------------------------------------------------
    def update_bounds(self) -> None:
        t = max(self.t, 1)
        has = self.D > 0
        Dm = np.maximum(self.D, 1)
        inner = max(math.log(2.0 * self.n * math.log(2.0 * t) / self.delta), 0.0)
        beta = 2.0 * np.sqrt(inner / Dm)
        muI = np.where(has, self.ysum / Dm, np.nan)
        self.LI = np.where(has, muI - beta, -np.inf)
        self.UI = np.where(has, muI + beta, np.inf)
        self.muI = muI
        if self.use_obs:
            base = 16.0 * self.n * self.n * t**3 / self.delta
            for k, st in self.known.items():
                T = st["T"]
                tmin = T.min()
                if tmin < 1:
                    continue
                mu = float(np.dot(st["R"] / T, st["P"])) / self.nobs
                b = math.sqrt(12.0 / tmin * math.log(base * st["Z"]))
                self.muO[k] = mu
                self.LO[k], self.UO[k] = mu - b, mu + b
        L = np.maximum(self.LO, self.LI)
        U = np.minimum(self.UO, self.UI)
        bad = L > U
        with np.errstate(invalid="ignore"):
            mid = 0.5 * (L + U)
        L = np.where(bad, mid, L)
        U = np.where(bad, mid, U)
        self.L = np.clip(L, 0.0, 1.0)
        self.U = np.clip(U, 0.0, 1.0)

    def states(self) -> list[ArmState]:
        out = []
        for k, a in enumerate(self.arms):
            st = self.known.get(k)
            if st is not None:
                T_z = st["T"].astype(np.int64)
                r_z = np.divide(st["R"], st["T"], out=np.zeros_like(st["R"]), where=st["T"] > 0)
                p_z = st["P"] / max(self.nobs, 1)
                T = int(T_z.min())
            else:
                T_z = r_z = p_z = np.zeros(0)
                T = 0
            out.append(
                ArmState(
                    a, T, int(self.D[k]), st["Z"] if st else 0, st is not None, T_z, r_z, p_z,
                    float(self.muO[k]), float(self.ysum[k] / self.D[k]) if self.D[k] else math.nan,
                    float(self.LO[k]), float(self.UO[k]), float(self.LI[k]), float(self.UI[k]),
                    float(self.L[k]), float(self.U[k]),
                )
            )
        return out


def _loop(run: PEState, cap: int, step, keep_trace: bool, keep_bounds: bool = False) -> PEResult:
    if cap < 1:
        raise ValueError("cap must be positive")
    trace = []
    history = []
    certified = False
    h = 0
    while True:
        run.t += 1
        h, l = _lucb(run.L, run.U)
        if run.t > 1 and run.U[l] <= run.L[h] + run.eps:
            certified = True
            run.t -= 1
            break
        if run.samples >= cap:
            run.t -= 1
            break
        step(h, l)
        run.update_bounds()
        if keep_bounds:
            history.append((run.L.copy(), run.U.copy()))
        if keep_trace:
            trace.append(
                {
                    "t": run.t,
                    "samples": run.samples,
                    "a_h": run.arms[h].label(),
                    "a_l": run.arms[l].label(),
                    "L_h": float(run.L[h]),
                    "U_l": float(run.U[l]),
                    "undirected": len(run.eg.undirected) if run.eg is not None else 0,
                }
            )
    return PEResult(run.arms[h], h, run.samples, certified, run.t, run.arms, run.states(), run.eg, trace, history)


def causal_pe_unknown(
    env: CausalModel,
    eg: EssentialGraph,
    eps: float,
    delta: float,
    cap: int = DEFAULT_CAP,
    rng: np.random.Generator | int | None = None,
    arms: Sequence[Intervention] | None = None,
    trace: bool = False,
    keep_bounds: bool = False,
) -> PEResult:
    """Causal best-arm identification with edge recovery.

    Stops when the challenger's upper bound is within ``eps`` of the
    leader's lower bound (checked from the second round on).  Hitting
    ``cap`` samples returns the current leader with ``certified=False``.
    """
    run = PEState(env, eg, arms, eps, delta, np.random.default_rng(rng), use_obs=True)

    def step(h: int, l: int) -> None:
        run._observe()
        run.recover_edge(h)
        run.recover_edge(l)

    return _loop(run, cap, step, trace, keep_bounds)


def recover_edge(run: PEState, k: int) -> None:
    """Edge-recovery step for arm index ``k`` on a running state."""
    run.recover_edge(k)


def pure_lucb(
    env: CausalModel,
    eps: float,
    delta: float,
    cap: int = DEFAULT_CAP,
    rng: np.random.Generator | int | None = None,
    arms: Sequence[Intervention] | None = None,
    trace: bool = False,
    keep_bounds: bool = False,
) -> PEResult:
    """LUCB baseline: pull the leader and the challenger, interventional bounds only."""
    run = PEState(env, None, arms, eps, delta, np.random.default_rng(rng), use_obs=False)

    def pull(k: int) -> None:
        a = run.arms[k]
        if len(a) == 0:
            row = run.sampler.draw(NULL)
            run.samples += 1
            run.D[k] += 1
            run.ysum[k] += row[-1]
        else:
            run._intervene(a)

    def step(h: int, l: int) -> None:
        pull(h)
        pull(l)

    return _loop(run, cap, step, trace, keep_bounds)


def true_means(env: CausalModel, arms: Sequence[Intervention] | None = None) -> np.ndarray:
    arms = list(arms) if arms is not None else list(ActionSet.atomic(env))
    return np.array([expected_reward(env, a, "enumerate") for a in arms])


def is_eps_optimal(env: CausalModel, result: PEResult, eps: float, mu: Mapping | np.ndarray | None = None) -> bool:
    mu = true_means(env, result.arms) if mu is None else np.asarray(mu)
    return bool(mu[result.index] >= mu.max() - eps)
