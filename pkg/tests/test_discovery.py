from __future__ import annotations

import math

import numpy as np
import pytest

from causal_ccb.discovery import (
    AncestorRelation,
    InitObservationLog,
    bglm_ancestors,
    bglm_threshold,
    collect_init_log,
    discover,
    init_length,
    init_schedule,
    nogap_blm_ancestors,
    nogap_threshold,
    transitive_closure,
    true_relation,
)
from causal_ccb.instances import appendix_e, chain
from causal_ccb.model import CausalModel, Intervention

X = ("X1", "X2", "X3")


def test_sqrt_schedule_blocks():
    s = init_schedule(3, 1.0, 100)
    expect = (
        [Intervention.of(X2=1)] * 10
        + [Intervention.of(X2=0)] * 10
        + [Intervention.of(X3=1)] * 10
        + [Intervention.of(X3=0)] * 10
    )
    assert s == expect


def test_two_node_schedule_covers_x2_only():
    s = init_schedule(2, 0.5, 400)
    assert {a.nodes for a in s} == {("X2",)}


def test_schedule_lengths():
    assert len(init_schedule(7, 0.1, 10_000)) == 120
    assert len(init_schedule(6, 0.1, 10_000)) == 100
    # 2 (n-1) c0 T^{2/3} ln T for n = 7
    expect = math.ceil(2 * 6 * 0.1 * 10_000 ** (2 / 3) * math.log(10_000))
    assert expect == 5131
    assert init_length(7, 0.1, 10_000, "two-thirds") == 5131
    s = init_schedule(7, 0.1, 10_000, "two-thirds")
    assert len(s) == 5131
    B = math.ceil(0.1 * 10_000 ** (2 / 3))
    assert s[: 2 * 6 * B] == init_schedule(7, 0.1, 10_000, "two-thirds")[2 * 6 * B : 4 * 6 * B]
    with pytest.raises(ValueError):
        init_schedule(1, 0.1, 100)


def test_thresholds():
    assert bglm_threshold(0.1, 0.1, 10_000) == pytest.approx(0.15849, abs=1e-5)
    assert nogap_threshold(1.0, 0.5, 10**6) == pytest.approx(1381.55, abs=0.01)


def _log(rows_per_block, B):
    acts = []
    for x in X[1:]:
        acts += [Intervention.of({x: 1})] * B + [Intervention.of({x: 0})] * B
    return InitObservationLog(acts, rows_per_block, X + ("Y",))


def test_zero_log_gives_empty_relation():
    B = 10
    log = _log(np.zeros((4 * B, 4)), B)
    rel = bglm_ancestors(log, 0.1, 0.1, 10_000)
    assert rel["X2"] == frozenset() and rel["X3"] == frozenset()
    rel = bglm_ancestors(log, 0.1, 0.1, 10_000, scope="y-only")
    assert rel["Y"] == frozenset()


def test_single_detection():
    B = 10
    V = np.zeros((4 * B, 4))
    V[:, 0] = 1
    V[:B, 1] = 1  # clamped X2 = 1
    V[:B, 2] = 1  # X3 follows X2
    V[2 * B : 3 * B, 2] = 1
    rel = bglm_ancestors(_log(V, B), 0.1, 0.1, 10_000)
    assert rel["X3"] == frozenset({"X2"})
    assert rel["X2"] == frozenset()
    # Y always has every X in the all-scope relation
    assert rel["Y"] == frozenset({"X2", "X3"})


def test_threshold_tie_is_not_ancestor():
    B = 1
    V = np.zeros((4 * B, 4))
    V[0, 2] = 1  # one unit of difference
    log = _log(V, B)
    # threshold exactly 1 -> strict comparison rejects
    rel = bglm_ancestors(log, 1.0, 1.0, 1)
    assert rel["X3"] == frozenset()


def test_malformed_log_rejected():
    B = 10
    with pytest.raises(ValueError):
        bglm_ancestors(_log(np.zeros((4 * B, 4)), B), 1.0, 0.1, 10_000)  # B would be 100
    acts = [Intervention.of(X3=1)] * 40
    with pytest.raises(ValueError):
        bglm_ancestors(InitObservationLog(acts, np.zeros((40, 4)), X + ("Y",)), 0.1, 0.1, 10_000)
    with pytest.raises(ValueError):
        InitObservationLog(acts, np.zeros((39, 4)), X + ("Y",))


def test_transitive_closure_examples():
    nodes = ("X1", "X2", "X3", "X4")
    rel = AncestorRelation.from_pairs(nodes, "Y", [("X2", "X3"), ("X3", "X4")])
    closed = transitive_closure(rel)
    assert ("X2", "X4") in closed.pairs()
    assert transitive_closure(closed) == closed
    names = tuple(f"X{i}" for i in range(1, 7))
    chain5 = AncestorRelation.from_pairs(names, "Y", [(names[i], names[i + 1]) for i in range(1, 5)], y_all=False)
    assert len(transitive_closure(chain5).pairs()) == 10


def test_acyclic_drops_mutual_pairs():
    rel = AncestorRelation.from_pairs(X, "Y", [("X2", "X3"), ("X3", "X2")])
    acyc = rel.acyclic()
    assert acyc["X2"] == frozenset() and acyc["X3"] == frozenset()
    assert acyc["Y"] == frozenset({"X2", "X3"})


def test_true_relation_of_chain():
    rel = true_relation(chain([0.5, 0.5, 0.5]))
    assert rel["X3"] == frozenset({"X2"})
    assert rel["Y"] == frozenset({"X2", "X3"})
    y_only = true_relation(appendix_e(), "y-only")
    assert y_only["Y"] == frozenset({"X2", "X3", "X4", "X5", "X6"})
    assert y_only["X2"] == frozenset()


def test_discover_deterministic():
    m = appendix_e()
    a, la = discover(m, 0.1, 0.1, 10_000, "sqrt", np.random.default_rng(3))
    b, lb = discover(m, 0.1, 0.1, 10_000, "sqrt", np.random.default_rng(3))
    assert a == b and np.array_equal(la.values, lb.values)


def test_nogap_detects_weak_edge():
    """An edge of weight 2 T^{-1/3} is found in at least 99% of replays."""
    T = 10_000
    theta = 2 * T ** (-1 / 3)
    m = CausalModel.from_edges(
        ["X1", "X2", "Y"], [("X1", "X2", 0.3), ("X2", "Y", theta)]
    )
    c0, c1 = 1.0, 0.01
    B = math.ceil(c0 * T ** (2 / 3))
    sched = init_schedule(m.n, c0, T, "two-thirds", m.x_nodes)[: 2 * B]
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(200):
        log = collect_init_log(m, sched, rng)
        hits += "X2" in nogap_blm_ancestors(log, c0, c1, T, "y-only")["Y"]
    assert hits >= 198


def test_collect_init_log_values_follow_schedule():
    m = appendix_e()
    sched = init_schedule(m.n, 0.1, 10_000, "sqrt", m.x_nodes)
    log = collect_init_log(m, sched, np.random.default_rng(0))
    assert log.values.shape == (100, 7)
    for t, a, row in log.records:
        for name, v in a.assignments:
            assert row[m.index(name)] == v
