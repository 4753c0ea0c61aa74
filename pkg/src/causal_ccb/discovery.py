"""Interventional ancestor discovery for the initialization phase.

For every intervenable node ``X_i`` the schedule performs a block of
``do(X_i=1)`` rounds followed by a block of ``do(X_i=0)`` rounds.  ``X_i`` is
declared an ancestor of ``X_j`` when the paired differences of ``X_j``
between the two blocks sum above a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import CausalModel, Intervention, sample_many

SCOPES = ("all", "y-only")


@dataclass(frozen=True)
class AncestorRelation:
    """Estimated ancestor sets keyed by node name.

    ``x_nodes`` lists the X nodes (constant node first) and ``y`` the reward
    node.  ``anc`` only contains intervenable nodes (the constant node is an
    implicit regressor of every node).
    """

    x_nodes: tuple[str, ...]
    y: str
    anc: Mapping[str, frozenset[str]]

    @classmethod
    def empty(cls, x_nodes: Sequence[str], y: str, y_all: bool = True) -> "AncestorRelation":
        x_nodes = tuple(x_nodes)
        anc = {x: frozenset() for x in x_nodes[1:]}
        anc[y] = frozenset(x_nodes[1:]) if y_all else frozenset()
        return cls(x_nodes, y, anc)

    @classmethod
    def from_pairs(cls, x_nodes: Sequence[str], y: str, pairs: Iterable[tuple[str, str]], y_all: bool = True) -> "AncestorRelation":
        rel = {k: set(v) for k, v in cls.empty(x_nodes, y, y_all).anc.items()}
        for a, b in pairs:
            rel[b].add(a)
        return cls(tuple(x_nodes), y, {k: frozenset(v) for k, v in rel.items()})

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.x_nodes[1:] + (self.y,)

    def pairs(self) -> set[tuple[str, str]]:
        return {(a, b) for b, s in self.anc.items() for a in s}

    def __getitem__(self, node: str) -> frozenset[str]:
        return self.anc[node]

    def is_closed(self) -> bool:
        for b, s in self.anc.items():
            for a in s:
                if a in self.anc and not self.anc[a] <= s:
                    return False
        return True

    def acyclic(self) -> "AncestorRelation":
        """Drop mutually-ancestral pairs and self loops, then re-close.

        A noisy test can report ``a`` as an ancestor of ``b`` and vice versa.
        Removing every such pair from a closed relation leaves an acyclic one;
        its closure stays acyclic and is what regression and propagation use.
        """
        pairs = self.pairs()
        keep = {(a, b) for a, b in pairs if a != b and (b, a) not in pairs}
        y_all = frozenset(self.x_nodes[1:]) <= self.anc[self.y]
        return transitive_closure(AncestorRelation.from_pairs(self.x_nodes, self.y, keep, y_all=y_all))

    def topological_order(self) -> list[str]:
        """Nodes sorted so ancestors come first (relation must be acyclic)."""
        pos = {n: i for i, n in enumerate(self.nodes)}
        return sorted(self.nodes, key=lambda n: (len(self.anc[n]), pos[n]))

    def to_lines(self) -> list[str]:
        return [f"{b}: {' '.join(sorted(self.anc[b], key=self.nodes.index))}".rstrip() for b in self.nodes]


def transitive_closure(rel: AncestorRelation) -> AncestorRelation:
    """Smallest transitively closed superset of ``rel``."""
    anc = {k: set(v) for k, v in rel.anc.items()}
    changed = True
    while changed:
        changed = False
        for b in anc:
            extra = set()
            for a in anc[b]:
                if a in anc:
                    extra |= anc[a]
            if not extra <= anc[b]:
                anc[b] |= extra
                changed = True
    return AncestorRelation(rel.x_nodes, rel.y, {k: frozenset(v) for k, v in anc.items()})


def true_relation(model: CausalModel, scope: str = "all") -> AncestorRelation:
    """Ground-truth ancestor relation in the format produced by discovery."""
    anc = model.ancestors()
    names = model.nodes
    pairs = []
    for j in range(1, model.N):
        if scope == "y-only" and j != model.N - 1:
            continue
        for a in anc[j]:
            if a != 0:
                pairs.append((names[a], names[j]))
    return AncestorRelation.from_pairs(model.x_nodes, model.y, pairs, y_all=scope == "all")


# -- schedules ----------------------------------------------------------------
def block_size(c0: float, T: int, mode: str) -> int:
    if mode == "sqrt":
        return max(1, math.ceil(c0 * math.sqrt(T)))
    if mode == "two-thirds":
        return max(1, math.ceil(c0 * T ** (2.0 / 3.0)))
    raise ValueError(f"unknown schedule mode {mode!r}")


def init_length(n: int, c0: float, T: int, mode: str) -> int:
    """Number of initialization rounds."""
    B = block_size(c0, T, mode)
    if mode == "sqrt":
        return 2 * (n - 1) * B
    t0 = math.ceil(2 * (n - 1) * c0 * T ** (2.0 / 3.0) * math.log(T)) if T > 1 else 0
    return max(t0, 2 * (n - 1) * B)


def init_schedule(
    n: int, c0: float, T: int, mode: str = "sqrt", names: Sequence[str] | None = None
) -> list[Intervention]:
    """Block schedule ``do(X2=1)^B, do(X2=0)^B, ..., do(Xn=0)^B``.

    In ``two-thirds`` mode the cycle of ``2(n-1)`` blocks is repeated
    ``ceil(log T)`` times and cut to the initialization length
    ``ceil(2(n-1) c0 T^{2/3} log T)`` (never shorter than one full cycle).
    ``names`` gives the X node names (constant node first); defaults to
    ``X1..Xn``.
    """
    if n < 2 or T < 1 or not c0 > 0:
        raise ValueError("need n >= 2, T >= 1 and c0 > 0")
    names = list(names) if names is not None else [f"X{i}" for i in range(1, n + 1)]
    if len(names) != n:
        raise ValueError("names must list n X nodes")
    B = block_size(c0, T, mode)
    cycle: list[Intervention] = []
    for x in names[1:]:
        cycle += [Intervention.of({x: 1})] * B
        cycle += [Intervention.of({x: 0})] * B
    if mode == "sqrt":
        return cycle
    length = init_length(n, c0, T, mode)
    reps = max(1, math.ceil(math.log(T)), math.ceil(length / len(cycle)))
    return (cycle * reps)[:length]


@dataclass
class InitObservationLog:
    """Initialization rounds: the interventions performed and node values."""

    interventions: list[Intervention]
    values: np.ndarray
    node_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != len(self.interventions):
            raise ValueError("one value row per logged intervention")

    @property
    def records(self) -> list[tuple[int, Intervention, np.ndarray]]:
        return [(t, a, self.values[t]) for t, a in enumerate(self.interventions)]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.node_names.index(name)]


def collect_init_log(
    model: CausalModel, schedule: Sequence[Intervention], rng: np.random.Generator
) -> InitObservationLog:
    """Play ``schedule`` on ``model`` (one sample per round)."""
    rows = []
    i = 0
    sched = list(schedule)
    while i < len(sched):
        j = i
        while j < len(sched) and sched[j] == sched[i]:
            j += 1
        rows.append(sample_many(model, sched[i], rng, j - i))
        i = j
    values = np.concatenate(rows) if rows else np.zeros((0, model.N))
    return InitObservationLog(sched, values, model.nodes)


# -- tests ---------------------------------------------------------------------
def bglm_threshold(c0: float, c1: float, T: int) -> float:
    return c0 * c1 * T ** 0.3


def nogap_threshold(c0: float, c1: float, T: int) -> float:
    return c0 * c1 * T ** (1.0 / 3.0) * math.log(T**2)


def _detect(
    log: InitObservationLog, B: int, threshold: float, scope: str
) -> AncestorRelation:
    if scope not in SCOPES:
        raise ValueError(f"unknown discovery scope {scope!r}")
    names = log.node_names
    x_nodes = names[:-1]
    y = names[-1]
    inter = x_nodes[1:]
    need = 2 * len(inter) * B
    if log.values.shape[0] < need or log.values.shape[1] != len(names):
        raise ValueError("log does not match the schedule shape")
    for b, x in enumerate(inter):
        lo, mid, hi = 2 * b * B, (2 * b + 1) * B, (2 * b + 2) * B
        if any(a != Intervention.of({x: 1}) for a in log.interventions[lo:mid]) or any(
            a != Intervention.of({x: 0}) for a in log.interventions[mid:hi]
        ):
            raise ValueError("log blocks do not follow the schedule")
    V = log.values
    pairs = []
    targets = list(inter) if scope == "all" else [y]
    for b, xi in enumerate(inter):
        on = V[2 * b * B : (2 * b + 1) * B]
        off = V[(2 * b + 1) * B : (2 * b + 2) * B]
        diff = (on - off).sum(axis=0)
        for xj in targets:
            if xj == xi:
                continue
            if diff[names.index(xj)] > threshold:
                pairs.append((xi, xj))
    rel = AncestorRelation.from_pairs(x_nodes, y, pairs, y_all=scope == "all")
    return transitive_closure(rel)


def bglm_ancestors(log: InitObservationLog, c0: float, c1: float, T: int, scope: str = "all") -> AncestorRelation:
    """Square-root schedule test with threshold ``c0 c1 T^{3/10}``."""
    return _detect(log, block_size(c0, T, "sqrt"), bglm_threshold(c0, c1, T), scope)


def nogap_blm_ancestors(log: InitObservationLog, c0: float, c1: float, T: int, scope: str = "all") -> AncestorRelation:
    """Two-thirds schedule test with threshold ``c0 c1 T^{1/3} ln(T^2)``.

    Only the first cycle (``c0 T^{2/3}`` paired samples per node) enters the
    sums.
    """
    return _detect(log, block_size(c0, T, "two-thirds"), nogap_threshold(c0, c1, T), scope)


def discover(
    model: CausalModel,
    c0: float,
    c1: float,
    T: int,
    mode: str,
    rng: np.random.Generator,
    scope: str = "all",
) -> tuple[AncestorRelation, InitObservationLog]:
    sched = init_schedule(model.n, c0, T, mode, model.x_nodes)
    log = collect_init_log(model, sched, rng)
    if mode == "sqrt":
        rel = bglm_ancestors(log, c0, c1, T, scope)
    else:
        rel = nogap_blm_ancestors(log, c0, c1, T, scope)
    return rel, log
