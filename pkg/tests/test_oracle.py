from __future__ import annotations

import numpy as np
import pytest

from causal_ccb.discovery import AncestorRelation, true_relation
from causal_ccb.estimation import EllipsoidEstimate, theta_prime
from causal_ccb.instances import appendix_e, random_blm
from causal_ccb.model import NULL, ActionSet, CausalModel, Intervention, expected_reward, marginals
from causal_ccb.oracle import EstimatedModel, optimistic_action, reward_under, safe_inverse, tie_break, ucb_values

BEST = Intervention.of(X2=1, X3=1)


def true_theta(model: CausalModel, rel: AncestorRelation) -> dict[str, np.ndarray]:
    means = marginals(model, NULL, "exact-linear")
    out = {}
    for node in rel.nodes:
        j = model.index(node)
        regs = [0] + sorted(model.index(a) for a in rel[node])
        out[node] = theta_prime(list(model.parents[j]), list(model.weights[j]), regs, means)
    return out


def collapsed(model: CausalModel, rho: float = 0.0, M_scale: float = 1.0) -> EstimatedModel:
    rel = true_relation(model)
    theta = true_theta(model, rel)
    est = {k: EllipsoidEstimate(v, np.eye(v.size) * M_scale, rho) for k, v in theta.items()}
    return EstimatedModel(rel, est)


def test_reward_under_true_parameters():
    m = appendix_e()
    em = collapsed(m)
    theta = true_theta(m, em.relation)
    assert reward_under(em, theta, BEST) == pytest.approx(0.678, abs=1e-12)
    assert reward_under(em, theta, NULL) == pytest.approx(0.258, abs=1e-12)
    zero = {k: np.zeros_like(v) for k, v in theta.items()}
    assert reward_under(em, zero, BEST) == 0.0


def test_collapsed_ellipsoids_pick_true_best():
    m = appendix_e()
    a, tilde, value = optimistic_action(collapsed(m), ActionSet.budget(m, 2))
    assert a == BEST
    assert value == pytest.approx(0.678, abs=1e-12)
    assert tilde["Y"] == pytest.approx(true_theta(m, true_relation(m))["Y"])


def test_huge_radius_clips_to_one():
    m = appendix_e()
    acts = ActionSet.budget(m, 2)
    em = collapsed(m, rho=1e6)
    vals = em.values(list(acts))
    assert np.all(vals <= 1.0)
    assert np.allclose(vals, 1.0)
    a, _, value = optimistic_action(em, acts)
    assert value == 1.0
    # every budget-2 action sets two direct parents of Y
    assert set(a.nodes) <= {"X2", "X3", "X4", "X5", "X6"}


def test_tie_break_uses_unclipped_score():
    vals = np.array([[1.0, 1.0, 0.7], [0.4, 0.9, 0.9]])
    raw = np.array([[1.3, 1.8, 0.7], [0.4, 0.9, 0.9]])
    assert list(tie_break(vals, raw)) == [1, 1]
    assert tie_break(np.array([0.2, 0.5]), np.array([0.2, 0.5])) == 1


def test_two_node_optimistic_value():
    rel = AncestorRelation.empty(("X1",), "Y")
    em = EstimatedModel(rel, {"Y": EllipsoidEstimate([0.4], 4 * np.eye(1), 0.2)})
    a, tilde, value = optimistic_action(em, [NULL])
    assert value == pytest.approx(0.5)
    assert tilde["Y"] == pytest.approx([0.5])


def test_witness_lies_in_ellipsoid():
    rng = np.random.default_rng(0)
    m = random_blm(rng, 4)
    em = collapsed(m, rho=0.3, M_scale=50.0)
    acts = ActionSet.budget(m, 2)
    a, tilde, value = optimistic_action(em, acts)
    for node, th in tilde.items():
        assert em.estimates[node].contains(th)


def test_ucb_value_formula_without_subsets():
    theta = np.array([0.2, 0.3])
    M = np.array([[2.0, 0.5], [0.5, 3.0]])
    v = np.array([1.0, 1.0])
    val = ucb_values(theta[None], np.linalg.inv(M)[None], 0.1, v[None, None, :])
    plain = theta @ v + 0.1 * np.sqrt(v @ np.linalg.inv(M) @ v)
    # the subset maximum is never below the full-vector score
    assert float(np.ravel(val)[0]) >= plain - 1e-12


def test_exact_coordinates_are_never_dropped():
    # the ellipsoid is long along (1, -1) and short along (1, 1)
    M = 500 * np.ones((2, 2)) + 0.01 * np.eye(2)
    Minv = np.linalg.inv(M)
    theta = np.array([0.4, 0.3])
    v = np.array([1.0, 1.0])
    plain = theta @ v + 0.5 * np.sqrt(v @ Minv @ v)
    loose = ucb_values(theta[None], Minv[None], 0.5, v[None, None, :], clip=False)
    tight = ucb_values(theta[None], Minv[None], 0.5, v[None, None, :], clip=False, fixed=np.array([True, True]))
    assert float(tight[0, 0]) == pytest.approx(plain, abs=1e-12)
    assert float(loose[0, 0]) > plain + 0.5


def test_clamped_parent_gets_tight_value():
    # X3 is only ever seen with X2 = 1, so its estimate is sharp along (1, 1) only
    rel = AncestorRelation.from_pairs(("X1", "X2", "X3"), "Y", [("X2", "X3"), ("X3", "Y")], y_all=False)
    est = {
        "X2": EllipsoidEstimate([0.5], np.eye(1), 0.0),
        "X3": EllipsoidEstimate([0.35, 0.35], np.array([[1001.0, 1000.0], [1000.0, 1001.0]]), 0.5),
        "Y": EllipsoidEstimate([0.0, 1.0], 1e6 * np.eye(2), 0.0),
    }
    em = EstimatedModel(rel, est)
    v = np.array([1.0, 1.0])
    expect = 0.7 + 0.5 * np.sqrt(v @ np.linalg.inv(est["X3"].M) @ v)
    assert em.values([Intervention.of(X2=1)])[0] == pytest.approx(expect, abs=1e-12)


def test_optimism_covers_truth():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = random_blm(rng, int(rng.integers(2, 6)))
        rel = true_relation(m)
        theta = true_theta(m, rel)
        est = {}
        for k, v in theta.items():
            noise = rng.normal(scale=0.02, size=v.size)
            M = 100 * np.eye(v.size)
            rho = float(np.sqrt(noise @ M @ noise)) + 1e-9
            est[k] = EllipsoidEstimate(v + noise, M, rho)
        em = EstimatedModel(rel, est)
        acts = ActionSet.budget(m, 2)
        opt = max(expected_reward(m, a, "exact-linear") for a in acts)
        _, _, value = optimistic_action(em, acts)
        assert value >= opt - 1e-12


def test_safe_inverse_singular():
    M = np.array([[1.0, 1.0], [1.0, 1.0]])
    inv = safe_inverse(M)
    assert np.all(np.isfinite(inv))
    assert np.max(inv) > 1e6


def test_acyclic_relation_required():
    rel = AncestorRelation.from_pairs(("X1", "X2", "X3"), "Y", [("X2", "X3"), ("X3", "X2")])
    with pytest.raises(ValueError):
        EstimatedModel(rel, {})
