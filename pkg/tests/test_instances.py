from __future__ import annotations

import numpy as np
import pytest

from causal_ccb.instances import (
    FAMILIES,
    appendix_e,
    easy_observation,
    generate_instance,
    parallel_lower_bound,
    pe_arms,
    pe_lower_bound,
    random_blm,
)
from causal_ccb.model import NULL, ActionSet, Intervention, enumerate_assignments, expected_reward, marginals


def test_appendix_structure():
    m = appendix_e()
    assert m.N == 7
    assert len(m.edges) == 10
    assert m.theta_min == pytest.approx(0.13)
    assert m.weight("X1", "X4") == 0.2 and m.weight("X3", "Y") == 0.3
    assert m.is_blm


def test_parallel_family_without_gap_is_flat():
    m = parallel_lower_bound(3, 0.0)
    for a in ActionSet.up_to_budget(m, 3):
        assert expected_reward(m, a, "enumerate") == pytest.approx(0.5, abs=1e-12)


def test_parallel_family_best_arm():
    m = parallel_lower_bound(3, 0.1, instance=6)
    # instance 6 plants the bonus at X = (1, 0, 1)
    best = Intervention.of(X1=1, X2=0, X3=1)
    assert expected_reward(m, best, "enumerate") == pytest.approx(0.7)
    zero = Intervention.of(X1=0, X2=0, X3=0)
    assert expected_reward(m, zero, "enumerate") == pytest.approx(0.6)
    with pytest.raises(ValueError):
        parallel_lower_bound(3, 0.1, instance=9)


@pytest.mark.parametrize("instance", [2, 3, 4])
def test_pe_family_marginals(instance):
    m = pe_lower_bound(4, 0.01, instance)
    mu = marginals(m, NULL, "enumerate")
    assert np.allclose(mu[1:-1], 0.5, atol=1e-12)
    assert mu[-1] == pytest.approx(0.5)


def test_pe_family_shares_observational_law():
    laws = []
    for i in (2, 3, 4):
        m = pe_lower_bound(4, 0.05, i)
        X, w = enumerate_assignments(m, NULL)
        names = [f"X{k}" for k in range(1, 5)]
        cols = [m.index(x) for x in names]
        key = (X[:, cols] > 0.5) @ (1 << np.arange(4))
        laws.append(np.bincount(key, weights=w, minlength=16))
    assert np.allclose(laws[0], laws[1]) and np.allclose(laws[0], laws[2])


def test_pe_family_arm_means():
    m2 = pe_lower_bound(4, 0.05, 2)
    assert expected_reward(m2, Intervention.of(X2=1), "enumerate") == pytest.approx(0.55)
    m3 = pe_lower_bound(4, 0.05, 3)
    # X3 is a parent of X1 here: average P(X1=1 | X2, X3=1) over a fair X2
    hi = 0.55 * 0.7 / (0.55 * 0.7 + 0.45 * 0.3)
    lo = 0.45 * 0.7 / (0.45 * 0.7 + 0.55 * 0.3)
    assert expected_reward(m3, Intervention.of(X3=1), "enumerate") == pytest.approx((hi + lo) / 2, abs=1e-12)
    mu = [expected_reward(m3, a, "enumerate") for a in pe_arms(m3)]
    assert int(np.argmax(mu)) == pe_arms(m3).index(Intervention.of(X3=1))


def test_pe_arms_skip_x1():
    arms = pe_arms(pe_lower_bound(4, 0.05, 2))
    assert arms[0] == NULL and len(arms) == 7
    assert all("X1" not in a.nodes for a in arms)


def test_easy_observation():
    m = easy_observation()
    assert expected_reward(m, NULL) == pytest.approx(0.4)
    assert expected_reward(m, Intervention.of(X1=1)) == pytest.approx(0.65)
    with pytest.raises(ValueError):
        easy_observation((0.7, 0.6))


def test_random_blm_is_valid():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = random_blm(rng, int(rng.integers(1, 9)), noise_width=0.02)
        assert m.is_blm and m.theta_min > 0
        assert len(m.parents[1]) == 1


def test_generate_instance():
    assert generate_instance("appendix-e") == appendix_e()
    assert generate_instance("pe-lower-bound", n=4, eps=0.05, instance=3) == pe_lower_bound(4, 0.05, 3)
    assert set(FAMILIES) >= {"appendix-e", "pe-lower-bound"}
    with pytest.raises(ValueError):
        generate_instance("nope")
