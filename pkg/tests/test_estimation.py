from __future__ import annotations

import math

import numpy as np
import pytest

from causal_ccb.estimation import (
    EllipsoidEstimate,
    MLEConvergenceError,
    NodeDataset,
    RegressionState,
    confidence_radius_lr,
    confidence_radius_ofu,
    mle_estimate,
    ridge_batch,
    ridge_update,
    second_init_length,
    theta_prime,
)
from causal_ccb.links import LinkFunction, extend_link_range
from causal_ccb.model import ModelConstants


def test_mle_identity_scalar():
    est = mle_estimate(NodeDataset(np.ones((4, 1)), [1, 0, 1, 1]), LinkFunction.identity())
    assert est.theta_hat == pytest.approx([0.75])
    assert np.array_equal(est.M, [[4.0]])


def test_mle_empty():
    est = mle_estimate(NodeDataset.empty(3), LinkFunction.logistic())
    assert np.array_equal(est.theta_hat, np.zeros(3))
    assert np.array_equal(est.M, np.zeros((3, 3)))


def test_mle_identity_two_dim():
    V = np.array([[1, 0], [1, 0], [1, 1], [1, 1]], dtype=float)
    x = np.array([0, 1, 1, 1], dtype=float)
    est = mle_estimate(NodeDataset(V, x), LinkFunction.identity())
    assert est.theta_hat == pytest.approx(np.linalg.solve(V.T @ V, V.T @ x), abs=1e-12)
    assert est.theta_hat == pytest.approx([0.5, 0.5], abs=1e-12)


def test_mle_logistic_solves_score_equation():
    rng = np.random.default_rng(0)
    link = extend_link_range(LinkFunction.logistic(3.0, -1.0), 2)
    V = np.c_[np.ones(2000), rng.integers(0, 2, size=(2000, 2))]
    truth = np.array([0.2, 0.5, 0.3])
    x = (rng.random(2000) < link(V @ truth)).astype(float)
    est = mle_estimate(NodeDataset(V, x), link)
    assert est.converged
    score = V.T @ (x - link(V @ est.theta_hat))
    assert np.max(np.abs(score)) <= 1e-8


def test_mle_degenerate_data_least_norm():
    # identical rows with conflicting labels: the score is zero at f(theta.v) = 1/2
    V = np.ones((4, 2))
    x = np.array([1.0, 0.0, 1.0, 0.0])
    est = mle_estimate(NodeDataset(V, x), LinkFunction.logistic())
    assert est.converged
    link = extend_link_range(LinkFunction.logistic(), 1)
    assert link(V[0] @ est.theta_hat) == pytest.approx(0.5, abs=1e-8)
    assert est.theta_hat[0] == pytest.approx(est.theta_hat[1], abs=1e-8)


def test_mle_non_convergence_reported():
    rng = np.random.default_rng(1)
    V = np.c_[np.ones(500), rng.integers(0, 2, size=500)]
    x = (rng.random(500) < 0.3 + 0.4 * V[:, 1]).astype(float)
    est = mle_estimate(NodeDataset(V, x), LinkFunction.logistic(), max_iter=1)
    assert not est.converged and est.residual > 0
    with pytest.raises(MLEConvergenceError) as err:
        mle_estimate(NodeDataset(V, x), LinkFunction.logistic(), max_iter=1, raise_on_failure=True)
    assert err.value.residual > 0


def test_mle_rejects_tabulated():
    with pytest.raises(ValueError):
        mle_estimate(NodeDataset(np.ones((2, 1)), [0, 1]), LinkFunction.tabulated([0.5, 0.5]))


def test_mle_consistency_logistic():
    link = extend_link_range(LinkFunction.logistic(4.0, -2.0), 2)
    truth = np.array([0.3, 0.4, 0.2])
    errs = []
    for t in (1_000, 10_000, 100_000):
        e = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            V = np.c_[np.ones(t), rng.integers(0, 2, size=(t, 2))]
            x = (rng.random(t) < link(V @ truth)).astype(float)
            e.append(np.linalg.norm(mle_estimate(NodeDataset(V, x), link).theta_hat - truth))
        errs.append(np.mean(e))
    # error shrinks roughly like t^{-1/2}
    assert errs[1] / errs[0] <= 0.55 and errs[2] / errs[1] <= 0.55


def test_ridge_update_example():
    s = ridge_update(RegressionState.initial(2), [1, 1], 1)
    assert np.allclose(s.M, [[2, 1], [1, 2]])
    assert np.allclose(s.b, [1, 1])
    assert np.allclose(s.theta_hat, [1 / 3, 1 / 3])
    z = ridge_update(s, [0, 0], 0.7)
    assert np.allclose(z.M, s.M) and np.allclose(z.b, s.b)
    with pytest.raises(ValueError):
        ridge_update(s, [1, 1, 1], 0)


def test_ridge_incremental_matches_batch():
    rng = np.random.default_rng(2)
    Vs = rng.integers(0, 2, size=(10_000, 4)).astype(float)
    Vs[:, 0] = 1
    xs = rng.random(10_000)
    s = RegressionState.initial(4)
    for V, x in zip(Vs, xs):
        s = ridge_update(s, V, x)
    b = ridge_batch(Vs, xs)
    assert np.max(np.abs(s.theta_hat - b.theta_hat)) < 1e-9


def test_ofu_radius():
    assert confidence_radius_ofu(1, math.exp(-1)) == pytest.approx(3)
    assert confidence_radius_ofu(3, math.exp(-4)) == pytest.approx(2)
    delta = 1 / (3 * 7 * math.sqrt(10_000))
    assert confidence_radius_ofu(1, delta) == pytest.approx(8.2974, abs=1e-4)
    with pytest.raises(ValueError):
        confidence_radius_ofu(0, 0.5)


def test_lr_radius():
    assert confidence_radius_lr(1, 0, 1) == pytest.approx(1)
    assert confidence_radius_lr(4, 0, math.exp(-2)) == pytest.approx(4)
    assert confidence_radius_lr(7, 1000, 1 / 700) == pytest.approx(11.3106, abs=1e-4)
    a = [confidence_radius_lr(5, t, 0.1) for t in (10, 100, 1000)]
    assert a[0] < a[1] < a[2]


def test_second_init_length():
    c = ModelConstants(kappa=1, L1_max=1, L2_max=0, zeta=0.5, c_lm=2)
    assert second_init_length(3, c, 0.01) == math.ceil(2 / 0.25 * math.log(100))
    assert second_init_length(3, c, 1.0) == 0
    c2 = ModelConstants(kappa=1, L1_max=1, L2_max=1, zeta=1, c_lm=1)
    assert second_init_length(2, c2, math.exp(-1)) == 133_120


def test_theta_prime_moves_dropped_parent_to_constant():
    # parents: constant (0.2), node 1 (0.5), node 2 (0.1); regress on constant and node 1
    means = np.array([1.0, 0.4, 0.6])
    th = theta_prime([0, 1, 2], [0.2, 0.5, 0.1], [0, 1], means)
    assert th == pytest.approx([0.2 + 0.1 * 0.6, 0.5])
    th = theta_prime([0, 1], [0.2, 0.5], [0, 1, 2], means)
    assert th == pytest.approx([0.2, 0.5, 0.0])


def test_ellipsoid_contains():
    e = EllipsoidEstimate(np.zeros(2), np.eye(2) * 4, rho=1.0)
    assert e.contains([0.5, 0.0]) and not e.contains([0.5, 0.1])
    with pytest.raises(ValueError):
        EllipsoidEstimate(np.zeros(2), np.eye(3))
