"""Benchmark instances: the seven-node parallel BLM, two lower-bound
families, and random BLMs for property tests."""

from __future__ import annotations

import itertools

import numpy as np

from .links import LinkFunction
from .model import NULL, CausalModel, Intervention, NoiseSpec


def appendix_e() -> CausalModel:
    """The parallel BLM used in the regret experiments.

    ``X1`` feeds ``X2..X6``; ``X2, X3`` feed ``Y`` with weight 0.3 and
    ``X4..X6`` feed ``Y`` with weight 0.13.
    """
    nodes = ["X1", "X2", "X3", "X4", "X5", "X6", "Y"]
    edges = [
        ("X1", "X2", 0.3),
        ("X1", "X3", 0.3),
        ("X1", "X4", 0.2),
        ("X1", "X5", 0.2),
        ("X1", "X6", 0.2),
        ("X2", "Y", 0.3),
        ("X3", "Y", 0.3),
        ("X4", "Y", 0.13),
        ("X5", "Y", 0.13),
        ("X6", "Y", 0.13),
    ]
    return CausalModel.from_edges(nodes, edges)


def chain(weights: list[float], bias: float | None = None) -> CausalModel:
    """``X1 -> X2 -> ... -> Xk -> Y`` with the given consecutive weights.

    ``weights[0]`` is the X1->X2 weight.  With ``bias`` set, every node also
    receives an edge from X1 of that weight (added to its own weight budget).
    """
    k = len(weights)
    nodes = [f"X{i}" for i in range(1, k + 1)] + ["Y"]
    edges = []
    for i, w in enumerate(weights):
        edges.append((nodes[i], nodes[i + 1], w))
        if bias is not None and i > 0:
            edges.append(("X1", nodes[i + 1], bias))
    return CausalModel.from_edges(nodes, edges)


def _table_for(joint: np.ndarray, child: int, parents: list[int]) -> list[float]:
    """``P(child = 1 | parents)`` from a joint over bit vectors.

    ``joint[k]`` is the probability of the bit vector whose bit ``b`` is
    ``(k >> b) & 1``.  Table rows follow the first-parent-most-significant
    convention of tabulated links.
    """
    n = int(np.log2(joint.size))
    bits = (np.arange(joint.size)[:, None] >> np.arange(n)[None, :]) & 1
    d = len(parents)
    table = []
    for pattern in itertools.product((0, 1), repeat=d):
        sel = np.ones(joint.size, dtype=bool)
        for p, v in zip(parents, pattern):
            sel &= bits[:, p] == v
        tot = joint[sel].sum()
        if tot <= 0:
            table.append(0.5)
        else:
            table.append(float(joint[sel & (bits[:, child] == 1)].sum() / tot))
    return table


def parallel_lower_bound(n: int, delta: float, instance: int = 1) -> CausalModel:
    """Member ``T_instance`` of the parallel lower-bound family.

    Nodes are the constant ``X0``, independent fair coins ``X1..Xn`` and
    ``Y``.  ``P(Y=1)`` is ``0.5 + delta`` when all ``X`` are 0, ``0.5 + 2 delta``
    when ``X`` equals the binary expansion of ``instance - 1`` (for
    ``instance >= 2``), and 0.5 otherwise.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 <= delta <= 0.25:
        raise ValueError("delta must lie in [0, 0.25]")
    if not 1 <= instance <= 2**n:
        raise ValueError("instance index out of range")
    xs = [f"X{i}" for i in range(1, n + 1)]
    nodes = ["X0"] + xs + ["Y"]
    table = []
    target = None
    if instance >= 2:
        b = instance - 1
        target = tuple((b >> (n - 1 - k)) & 1 for k in range(n))
    for pattern in itertools.product((0, 1), repeat=n):
        if not any(pattern):
            table.append(0.5 + delta)
        elif target is not None and pattern == target:
            table.append(0.5 + 2 * delta)
        else:
            table.append(0.5)
    links = {x: LinkFunction.tabulated([0.5]) for x in xs}
    links["Y"] = LinkFunction.tabulated(table)
    edges = [(x, "Y", 1.0) for x in xs]
    return CausalModel.from_edges(nodes, edges, links=links)


def pe_joint(n: int, eps: float) -> np.ndarray:
    """Joint law of ``(X1..Xn)`` shared by the pure-exploration family.

    Bit ``b`` of the index is ``X_{b+1}``.  ``X1`` is a fair coin; ``X2``
    agrees with it with probability ``0.5 + eps`` and each later ``Xi`` with
    probability ``0.5 + 4 eps``.
    """
    size = 1 << n
    bits = (np.arange(size)[:, None] >> np.arange(n)[None, :]) & 1
    x1 = bits[:, 0]
    p = np.full(size, 0.5)
    p *= np.where(bits[:, 1] == x1, 0.5 + eps, 0.5 - eps)
    for i in range(2, n):
        p *= np.where(bits[:, i] == x1, 0.5 + 4 * eps, 0.5 - 4 * eps)
    return p


def pe_lower_bound(n: int, eps: float, instance: int = 2) -> CausalModel:
    """Instance ``xi_instance`` of the pure-exploration lower-bound family.

    In ``xi_2`` the edges are ``X2 -> X1``, ``X1 -> Y`` and ``X1 -> Xi``,
    ``X2 -> Xi`` for ``i >= 3``.  ``xi_i`` reverses ``X1 -> Xi``.  Every
    instance induces the same observational joint (``Y = X1``); conditional
    tables are derived from it.  A constant node ``X0`` is prepended.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    if not 0 < eps <= 0.125:
        raise ValueError("eps must lie in (0, 0.125]")
    if not 2 <= instance <= n:
        raise ValueError("instance must be in 2..n")
    joint = pe_joint(n, eps)
    # parent lists over paper indices (0-based bit positions)
    pa: dict[int, list[int]] = {0: [1], 1: []}
    for i in range(2, n):
        pa[i] = [0, 1]
    order = [1, 0] + list(range(2, n))
    if instance >= 3:
        r = instance - 1
        pa[0] = [1, r]
        pa[r] = [1]
        order = [1, r, 0] + [i for i in range(2, n) if i != r]
    names = {i: f"X{i + 1}" for i in range(n)}
    nodes = ["X0"] + [names[i] for i in order] + ["Y"]
    links = {}
    edges = []
    for i in range(n):
        links[names[i]] = LinkFunction.tabulated(_table_for(joint, i, pa[i]))
        edges += [(names[p], names[i], 1.0) for p in pa[i]]
    links["Y"] = LinkFunction.tabulated([0.0, 1.0])
    edges.append(("X1", "Y", 1.0))
    return CausalModel.from_edges(nodes, edges, links=links)


def random_blm(
    rng: np.random.Generator,
    n_x: int,
    edge_prob: float = 0.5,
    y_prob: float = 0.7,
    min_weight: float = 0.02,
    noise_width: float = 0.0,
    continuous: bool = False,
) -> CausalModel:
    """Random BLM with ``n_x`` non-constant X nodes.

    Every X node gets an X1 edge; other edges appear independently.
    Weights are rescaled so each node's weights sum to at most one minus
    the noise width, and the X1 weight covers the noise width from below.
    """
    names = [f"X{i}" for i in range(1, n_x + 2)] + ["Y"]
    edges = []
    noise = {}
    for j in range(1, len(names)):
        is_y = j == len(names) - 1
        cand = list(range(1, j))
        pa = [p for p in cand if rng.random() < (y_prob if is_y else edge_prob)]
        raw = rng.uniform(0.2, 1.0, size=len(pa) + 1)
        budget = rng.uniform(0.5, 1.0) - 2 * noise_width
        w = raw / raw.sum() * budget
        w = np.maximum(w, min_weight)
        w *= min(1.0, budget / w.sum())
        bias = w[0] + noise_width
        edges.append(("X1", names[j], float(bias)))
        for p, wv in zip(pa, w[1:]):
            edges.append((names[p], names[j], float(wv)))
        if noise_width > 0:
            noise[names[j]] = NoiseSpec.uniform(noise_width)
    return CausalModel.from_edges(names, edges, noise=noise, continuous=continuous)


def pe_arms(model: CausalModel) -> list[Intervention]:
    """Arm set of the pure-exploration family: ``do()`` and ``do(Xj=x)`` for ``j >= 2``.

    Intervening on ``X1`` sets ``Y`` directly and is left out, as in the
    family's construction.
    """
    arms = [NULL]
    for x in model.intervenable:
        if x != "X1":
            arms += [Intervention.of({x: 1}), Intervention.of({x: 0})]
    return arms


def easy_observation(weights: tuple[float, ...] = (0.5, 0.3)) -> CausalModel:
    """Independent fair coins feeding ``Y`` linearly.

    Every arm is well observed (``q_a >= 0.5``) and every edge effect equals
    its weight, so with weights of at least 0.3 all ``c_a >= 0.3``.
    """
    if sum(weights) > 1 or min(weights) < 0:
        raise ValueError("weights must be non-negative and sum to at most one")
    k = len(weights)
    xs = [f"X{i}" for i in range(1, k + 1)]
    nodes = ["X0"] + xs + ["Y"]
    edges = [("X0", x, 0.5) for x in xs] + [(x, "Y", w) for x, w in zip(xs, weights)]
    return CausalModel.from_edges(nodes, edges)


FAMILIES = ("appendix-e", "parallel-lower-bound", "pe-lower-bound", "easy-observation")


def generate_instance(family: str, **params) -> CausalModel:
    """Build a benchmark instance by family name.

    ``parallel-lower-bound`` takes ``n``, ``delta`` and ``instance``;
    ``pe-lower-bound`` takes ``n``, ``eps`` and ``instance``.
    """
    if family == "appendix-e":
        return appendix_e(**params)
    if family == "parallel-lower-bound":
        return parallel_lower_bound(**params)
    if family == "pe-lower-bound":
        return pe_lower_bound(**params)
    if family == "easy-observation":
        return easy_observation(**params)
    raise ValueError(f"unknown instance family {family!r}")
