"""Binary generalized linear causal models: structure, sampling, rewards.

Nodes are stored in a fixed topological order ``X1, ..., Xn, Y`` (names are
free-form labels, positions carry the semantics).  Position 0 is the constant
node that always takes value 1; the last position is the reward node.

Sampling uses the threshold form of the model: every node draws a uniform
threshold ``gamma`` and becomes active iff ``f(theta . pa) + eps >= gamma``
(with probability one this is the same as the strict comparison used below).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .links import LinkFunction

MAX_ENUMERATE = 20


@dataclass(frozen=True)
class NoiseSpec:
    """Zero-mean additive noise on the activation probability."""

    kind: str = "zero"
    width: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "uniform"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.width < 0:
            raise ValueError("noise width must be non-negative")
        if self.kind == "zero" and self.width != 0:
            raise ValueError("zero noise has no width")

    @property
    def max_abs(self) -> float:
        return self.width

    @classmethod
    def uniform(cls, width: float) -> "NoiseSpec":
        return cls("uniform", float(width))


ZERO_NOISE = NoiseSpec()


@dataclass(frozen=True)
class Intervention:
    """``do(S = s)``; an empty assignment is the null intervention."""

    assignments: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        names = [k for k, _ in self.assignments]
        if len(set(names)) != len(names):
            raise ValueError("duplicate node in intervention")
        for _, v in self.assignments:
            if v not in (0, 1):
                raise ValueError("intervention values must be 0 or 1")

    @classmethod
    def of(cls, assignments: Mapping[str, int] | None = None, **kw: int) -> "Intervention":
        items = dict(assignments or {})
        items.update(kw)
        return cls(tuple(sorted((str(k), int(v)) for k, v in items.items())))

    @classmethod
    def parse(cls, text: str) -> "Intervention":
        """Parse ``do(X2=1,X3=0)``, ``X2=1,X3=0`` or ``do()``."""
        s = text.strip()
        if s.startswith("do(") and s.endswith(")"):
            s = s[3:-1]
        if not s.strip():
            return cls()
        out = {}
        for part in s.split(","):
            k, _, v = part.partition("=")
            if not _:
                raise ValueError(f"malformed assignment {part!r}")
            out[k.strip()] = int(v)
        return cls.of(out)

    def as_dict(self) -> dict[str, int]:
        return dict(self.assignments)

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.assignments)

    def __len__(self) -> int:
        return len(self.assignments)

    def label(self) -> str:
        return "do(" + ",".join(f"{k}={v}" for k, v in self.assignments) + ")"

    __str__ = label


NULL = Intervention()


@dataclass(frozen=True)
class Sample:
    x: np.ndarray
    y: float


@dataclass(frozen=True)
class ModelConstants:
    """Problem constants used by the confidence radii and schedules."""

    kappa: float = 1.0
    L1_max: float = 1.0
    L2_max: float = 0.0
    zeta: float = 1.0
    c_lm: float = 1.0

    def __post_init__(self) -> None:
        if not self.kappa > 0 or not self.zeta > 0 or not self.c_lm > 0 or not self.L1_max > 0:
            raise ValueError("kappa, zeta, c and L1 must be positive")
        if self.L2_max < 0:
            raise ValueError("L2 must be non-negative")
        if self.zeta > 1:
            raise ValueError("zeta must not exceed 1")


@dataclass(frozen=True)
class CausalModel:
    nodes: tuple[str, ...]
    parents: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[float, ...], ...]
    links: tuple[LinkFunction, ...]
    noise: tuple[NoiseSpec, ...]
    continuous: bool = False
    _index: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        N = len(self.nodes)
        if N < 2:
            raise ValueError("a model needs at least X1 and Y")
        if len(set(self.nodes)) != N:
            raise ValueError("duplicate node names")
        for seq in (self.parents, self.weights, self.links, self.noise):
            if len(seq) != N:
                raise ValueError("per-node fields must cover every node")
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.nodes)})
        if self.parents[0]:
            raise ValueError("X1 must have no parents")
        if self.noise[0].width:
            raise ValueError("X1 is deterministic")
        for j in range(1, N):
            pa = self.parents[j]
            if len(set(pa)) != len(pa):
                raise ValueError("repeated parent")
            if any(p >= j or p < 0 for p in pa):
                raise ValueError("node order must be topological (graph acyclic, Y a sink)")
            link = self.links[j]
            if link.kind == "tabulated":
                if len(link.table) != 1 << len(pa):
                    raise ValueError(f"table for {self.nodes[j]} must have 2^|pa| rows")
                if self.noise[j].width:
                    raise ValueError("tabulated nodes take no additive noise")
                if self.continuous:
                    raise ValueError("continuous models need identity links")
                continue
            w = self.weights[j]
            if len(w) != len(pa):
                raise ValueError("weights must align with parents")
            if any(not 0.0 <= v <= 1.0 for v in w):
                raise ValueError("weights must lie in [0, 1]")
            lo, hi = self._score_range(j)
            width = self.noise[j].max_abs
            if link.kind == "identity":
                pmin, pmax = lo, hi
            else:
                if self.continuous:
                    raise ValueError("continuous models need identity links")
                pmin, pmax = link(lo), link(hi)
            if pmin - width < -1e-12 or pmax + width > 1 + 1e-12:
                raise ValueError(f"node {self.nodes[j]}: probabilities leave [0, 1]")

    def _score_range(self, j: int) -> tuple[float, float]:
        base = 0.0
        total = 0.0
        for p, w in zip(self.parents[j], self.weights[j]):
            total += w
            if p == 0:
                base += w
        return base, total

    # -- construction -----------------------------------------------------
    @classmethod
    def from_edges(
        cls,
        nodes: Sequence[str],
        edges: Iterable[tuple[str, str, float]] | Mapping[tuple[str, str], float],
        links: Mapping[str, LinkFunction] | None = None,
        noise: Mapping[str, NoiseSpec] | None = None,
        continuous: bool = False,
    ) -> "CausalModel":
        """Build a model from ``(parent, child, weight)`` triples.

        ``nodes`` must already be listed in topological order with the
        constant node first and the reward node last.  Parents of tabulated
        nodes keep the order in which their edges are listed; this order
        defines the table's bit pattern (first parent = most significant bit).
        """
        nodes = tuple(nodes)
        idx = {n: i for i, n in enumerate(nodes)}
        if isinstance(edges, Mapping):
            triples = [(p, c, w) for (p, c), w in edges.items()]
        else:
            triples = [tuple(e) for e in edges]
        pa: list[list[int]] = [[] for _ in nodes]
        wt: list[list[float]] = [[] for _ in nodes]
        for p, c, w in triples:
            if p not in idx or c not in idx:
                raise ValueError(f"edge ({p}, {c}) names an unknown node")
            pa[idx[c]].append(idx[p])
            wt[idx[c]].append(float(w))
        links = links or {}
        noise = noise or {}
        for name in list(links) + list(noise):
            if name not in idx:
                raise ValueError(f"unknown node {name!r}")
        return cls(
            nodes=nodes,
            parents=tuple(tuple(p) for p in pa),
            weights=tuple(tuple(w) for w in wt),
            links=tuple(links.get(n, LinkFunction.identity()) for n in nodes),
            noise=tuple(noise.get(n, ZERO_NOISE) for n in nodes),
            continuous=continuous,
        )

    # -- structure queries ---------------------------------------------------
    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def n(self) -> int:
        """Number of X nodes (including the constant X1)."""
        return len(self.nodes) - 1

    @property
    def x_nodes(self) -> tuple[str, ...]:
        return self.nodes[:-1]

    @property
    def intervenable(self) -> tuple[str, ...]:
        return self.nodes[1:-1]

    @property
    def y(self) -> str:
        return self.nodes[-1]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown node {name!r}") from None

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [(self.nodes[p], self.nodes[c]) for c in range(self.N) for p in self.parents[c]]

    def weight(self, parent: str, child: str) -> float:
        c = self.index(child)
        p = self.index(parent)
        if p not in self.parents[c]:
            raise KeyError(f"no edge {parent}->{child}")
        if self.links[c].kind == "tabulated":
            raise KeyError("tabulated nodes carry no edge weights")
        return self.weights[c][self.parents[c].index(p)]

    @property
    def is_glm(self) -> bool:
        return all(link.is_glm for link in self.links[1:])

    @property
    def is_blm(self) -> bool:
        return all(link.kind == "identity" for link in self.links[1:])

    @property
    def has_noise(self) -> bool:
        return any(ns.width > 0 for ns in self.noise)

    @property
    def theta_min(self) -> float:
        ws = [w for j in range(1, self.N) if self.links[j].is_glm for w in self.weights[j]]
        if not ws:
            raise ValueError("model has no weighted edges")
        return min(ws)

    def ancestors(self) -> list[set[int]]:
        """True ancestor index sets (X1 included where it is an ancestor)."""
        anc: list[set[int]] = [set() for _ in range(self.N)]
        for j in range(self.N):
            for p in self.parents[j]:
                anc[j].add(p)
                anc[j] |= anc[p]
        return anc

    def kappa(self) -> float:
        """Smallest link slope over the domain where estimates are evaluated.

        The domain is the score range reachable with weights within unit
        distance of the truth, ``[-sqrt(d), sum(theta) + sqrt(d)]``.
        """
        k = 1.0
        for j in range(1, self.N):
            link = self.links[j]
            if link.kind != "logistic":
                continue
            d = len(self.parents[j]) or 1
            _, hi = self._score_range(j)
            k = min(k, link.min_slope(-np.sqrt(d), hi + np.sqrt(d)))
        return k

    # -- interventions ---------------------------------------------------
    def check_intervention(self, a: Intervention) -> None:
        for name, _ in a.assignments:
            i = self.index(name)
            if i == 0:
                raise ValueError("X1 cannot be intervened on")
            if i == self.N - 1:
                raise ValueError("Y cannot be intervened on")

    def clamp_vectors(self, a: Intervention) -> tuple[np.ndarray, np.ndarray]:
        self.check_intervention(a)
        mask = np.zeros(self.N, dtype=bool)
        vals = np.zeros(self.N)
        for name, v in a.assignments:
            i = self.index(name)
            mask[i] = True
            vals[i] = v
        return mask, vals

    # -- activation --------------------------------------------------------
    def activation(self, j: int, values: np.ndarray) -> np.ndarray:
        """Activation probability of node ``j`` (without noise).

        ``values`` has shape ``(..., N)``; returns shape ``values.shape[:-1]``.
        """
        pa = self.parents[j]
        link = self.links[j]
        pv = values[..., list(pa)]
        if link.kind == "tabulated":
            d = len(pa)
            pw = (1 << np.arange(d - 1, -1, -1)).astype(float)
            idx = np.rint(pv @ pw).astype(np.int64) if d else np.zeros(values.shape[:-1], dtype=np.int64)
            return link.table_prob(idx)
        score = pv @ np.asarray(self.weights[j], dtype=float) if pa else np.zeros(values.shape[:-1])
        if link.kind == "identity":
            return score
        return link(score)


def propagate(
    model: CausalModel,
    clamp_mask: np.ndarray,
    clamp_vals: np.ndarray,
    gamma: np.ndarray,
    eps: np.ndarray | None = None,
) -> np.ndarray:
    """Push thresholds through the model in topological order.

    ``gamma`` (and ``eps`` when given) have shape ``(m, N)``; ``clamp_mask``
    and ``clamp_vals`` broadcast against it.  Returns the node values.
    """
    m = gamma.shape[0]
    cm = np.broadcast_to(clamp_mask, gamma.shape)
    cv = np.broadcast_to(clamp_vals, gamma.shape)
    X = np.zeros(gamma.shape)
    X[:, 0] = 1.0
    for j in range(1, model.N):
        p = model.activation(j, X)
        if eps is not None:
            p = p + eps[:, j]
        if model.continuous:
            v = p
        else:
            v = (gamma[:, j] < p).astype(float)
        X[:, j] = np.where(cm[:, j], cv[:, j], v)
    del m
    return X


def _draw(model: CausalModel, rng: np.random.Generator, m: int) -> tuple[np.ndarray, np.ndarray | None]:
    N = model.N
    if not model.has_noise:
        return rng.random((m, N)), None
    u = rng.random((m, 2, N))
    widths = np.array([ns.width for ns in model.noise])
    return u[:, 0, :], (2.0 * u[:, 1, :] - 1.0) * widths


def sample_many(model: CausalModel, a: Intervention, rng: np.random.Generator, m: int) -> np.ndarray:
    """``m`` joint realizations as an ``(m, N)`` array.

    Consumes the random stream exactly as ``m`` successive :func:`sample`
    calls would.
    """
    mask, vals = model.clamp_vectors(a)
    gamma, eps = _draw(model, rng, m)
    return propagate(model, mask, vals, gamma, eps)


def sample(model: CausalModel, a: Intervention, rng: np.random.Generator) -> Sample:
    row = sample_many(model, a, rng, 1)[0]
    return Sample(x=row[:-1].copy(), y=float(row[-1]))


# -- expected rewards ----------------------------------------------------------
def _marginals_linear(model: CausalModel, mask: np.ndarray, vals: np.ndarray) -> np.ndarray:
    mu = np.zeros(model.N)
    mu[0] = 1.0
    for j in range(1, model.N):
        if mask[j]:
            mu[j] = vals[j]
        else:
            pa = model.parents[j]
            mu[j] = float(np.dot(mu[list(pa)], model.weights[j])) if pa else 0.0
    return mu


def enumerate_assignments(
    model: CausalModel, a: Intervention, within: set[int] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """All value assignments of the X nodes with their probabilities.

    Returns ``(X, w)`` where ``X`` has shape ``(2^k, N)`` (the Y column holds
    Y's activation probability) and ``w`` the matching probabilities.  With
    ``within`` (an ancestrally closed index set) only those nodes are
    enumerated; the others stay at 0 and carry no weight.
    """
    if model.continuous:
        raise ValueError("enumeration needs binary nodes")
    mask, vals = model.clamp_vectors(a)
    keep = set(range(model.N)) if within is None else set(within)
    free = [j for j in range(1, model.N - 1) if not mask[j] and j in keep]
    k = len(free)
    if k > MAX_ENUMERATE:
        raise ValueError(f"enumeration limited to {MAX_ENUMERATE} free nodes")
    rows = 1 << k
    X = np.zeros((rows, model.N))
    X[:, 0] = 1.0
    X[:, mask] = vals[mask]
    bits = (np.arange(rows)[:, None] >> np.arange(k)[None, :]) & 1
    X[:, free] = bits
    w = np.ones(rows)
    for j in free:
        p = model.activation(j, X)
        w *= np.where(X[:, j] > 0.5, p, 1.0 - p)
    X[:, -1] = model.activation(model.N - 1, X)
    return X, w


def _marginals_enumerate(model: CausalModel, a: Intervention) -> np.ndarray:
    # each node only sees its own ancestors, so clamping a non-ancestor
    # leaves its marginal bit-for-bit unchanged
    anc = model.ancestors()
    out = np.zeros(model.N)
    out[0] = 1.0
    for j in range(1, model.N):
        X, w = enumerate_assignments(model, a, anc[j] | {j})
        out[j] = w @ X[:, j]
    return out


def marginals(
    model: CausalModel,
    a: Intervention = NULL,
    mode: str = "auto",
    m: int = 100_000,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """``E[node | a]`` for every node (vector in model order)."""
    if mode == "auto":
        mode = "exact-linear" if model.is_blm else "enumerate"
    if mode == "exact-linear":
        if not model.is_blm:
            raise ValueError("exact-linear mode needs identity links throughout")
        mask, vals = model.clamp_vectors(a)
        return _marginals_linear(model, mask, vals)
    if mode == "enumerate":
        return _marginals_enumerate(model, a)
    if mode == "monte-carlo":
        if rng is None:
            raise ValueError("monte-carlo mode needs a random generator")
        return sample_many(model, a, rng, m).mean(axis=0)
    raise ValueError(f"unknown mode {mode!r}")


def expected_reward(
    model: CausalModel,
    a: Intervention = NULL,
    mode: str = "auto",
    m: int = 100_000,
    rng: np.random.Generator | None = None,
) -> float:
    """``E[Y | a]`` under one of the exact-linear/enumerate/monte-carlo modes."""
    return float(marginals(model, a, mode, m, rng)[-1])


def do_difference(model: CausalModel, i: str, j: str, mode: str = "enumerate") -> tuple[float, float]:
    """``(E[X_j | do(X_i=1)], E[X_j | do(X_i=0)])``."""
    if i == j:
        raise ValueError("i and j must differ")
    jj = model.index(j)
    if model.index(i) == 0:
        raise ValueError("X1 cannot be intervened on")
    hi = marginals(model, Intervention.of({i: 1}), mode)[jj]
    lo = marginals(model, Intervention.of({i: 0}), mode)[jj]
    return float(hi), float(lo)


def true_zeta(model: CausalModel) -> float:
    """Smallest conditional probability ``P(X' = x | Anc(X) \\ {X'} = v)``.

    Computed from the observational joint by enumeration over each node's
    ancestor set; zero-probability conditioning events are skipped.
    """
    X, w = enumerate_assignments(model, NULL)
    Xb = X[:, : model.N - 1] > 0.5
    anc = model.ancestors()
    best = 1.0
    for node in range(1, model.N):
        A = sorted(a for a in anc[node] if a != 0)
        for xp in A:
            rest = [a for a in A if a != xp]
            key = Xb[:, rest] @ (1 << np.arange(len(rest))) if rest else np.zeros(len(w), dtype=np.int64)
            for kv in np.unique(key):
                sel = key == kv
                tot = w[sel].sum()
                if tot <= 0:
                    continue
                p1 = w[sel & Xb[:, xp]].sum() / tot
                best = min(best, p1, 1.0 - p1)
    return float(best)


# -- action sets ---------------------------------------------------------------
@dataclass(frozen=True)
class ActionSet:
    actions: tuple[Intervention, ...]

    def __post_init__(self) -> None:
        if len(set(self.actions)) != len(self.actions):
            raise ValueError("duplicate actions")

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    def __getitem__(self, i: int) -> Intervention:
        return self.actions[i]

    @classmethod
    def atomic(cls, model: CausalModel) -> "ActionSet":
        acts = [NULL] + [Intervention.of({x: v}) for x in model.intervenable for v in (1, 0)]
        return cls(tuple(acts))

    @classmethod
    def budget(cls, model: CausalModel, k: int, value: int = 1, nodes: Sequence[str] | None = None) -> "ActionSet":
        """All ``do(S = value)`` with ``|S| = k`` over ``nodes``."""
        pool = list(nodes) if nodes is not None else list(model.intervenable)
        acts = [Intervention.of({x: value for x in S}) for S in itertools.combinations(pool, k)]
        return cls(tuple(acts))

    @classmethod
    def up_to_budget(cls, model: CausalModel, k: int) -> "ActionSet":
        """Every intervention with at most ``k`` nodes and any 0/1 values."""
        acts = [NULL]
        for size in range(1, k + 1):
            for S in itertools.combinations(model.intervenable, size):
                for vals in itertools.product((1, 0), repeat=size):
                    acts.append(Intervention.of(dict(zip(S, vals))))
        return cls(tuple(acts))

    def is_complete(self, model: CausalModel) -> bool:
        """Whether the null and all atomic interventions are present."""
        have = set(self.actions)
        return all(a in have for a in ActionSet.atomic(model).actions)

    def labels(self) -> list[str]:
        return [a.label() for a in self.actions]


def reward_table(model: CausalModel, actions: ActionSet, mode: str = "auto") -> np.ndarray:
    return np.array([expected_reward(model, a, mode) for a in actions])
