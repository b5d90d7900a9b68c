import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybd.errors import InvalidArgument, NoUsableStreams
from hybd.oracles import waterfill_by_enumeration
from hybd.power import (equal_allocation, expand_weights, kkt_residual,
                        proportional_waterfill, stream_gains, waterfill)


def test_two_stream_hand_case():
    # budget 2, both active: v = 2 / (2 + 1/4 + 1) = 8/13
    res = waterfill([4.0, 1.0])
    assert res.water_level_multiplier == pytest.approx(8 / 13, abs=1e-12)
    np.testing.assert_allclose(res.lam, [1.375, 0.625], atol=1e-12)


def test_weighted_hand_case():
    res = proportional_waterfill([1.0, 1.0], [2.0, 1.0])
    assert res.water_level_multiplier == pytest.approx(0.75, abs=1e-12)
    np.testing.assert_allclose(res.lam, [5 / 3, 1 / 3], atol=1e-12)


def test_weak_stream_is_shut_off():
    res = waterfill([10.0, 1e-6])
    np.testing.assert_allclose(res.lam, [2.0, 0.0], atol=1e-12)
    assert kkt_residual(res, [10.0, 1e-6]) < 1e-10


def test_zero_gain_gets_no_power():
    res = waterfill([0.0, 3.0, 2.0])
    assert res.lam[0] == 0.0
    assert res.total == pytest.approx(3.0, abs=1e-10)


def test_all_zero_gains_raise():
    with pytest.raises(NoUsableStreams):
        waterfill([0.0, 0.0])


@pytest.mark.parametrize("gamma", [[-1.0, 2.0], [np.nan, 1.0], [np.inf, 1.0]])
def test_bad_gains_rejected(gamma):
    with pytest.raises(InvalidArgument):
        waterfill(gamma)


def test_weights_must_divide_streams():
    with pytest.raises(InvalidArgument):
        expand_weights([1.0, 1.0], 3)
    with pytest.raises(InvalidArgument):
        expand_weights([1.0, 0.0], 4)
    np.testing.assert_array_equal(expand_weights([1.0, 2.0], 4), [1, 1, 2, 2])


def test_stream_gains_scaling():
    g = stream_gains([2.0, 1.0], snr=4.0, users=2, streams_per_user=1)
    np.testing.assert_allclose(g, [8.0, 2.0])


def test_equal_allocation():
    res = equal_allocation(3)
    np.testing.assert_array_equal(res.lam, np.ones(3))


def test_optimum_beats_feasible_perturbations():
    rng = np.random.default_rng(3)
    gamma = rng.exponential(1.0, 6)
    w = rng.uniform(0.5, 3.0, 3)
    res = proportional_waterfill(gamma, w)
    wexp = res.weights_expanded

    def objective(lam):
        return np.sum(wexp * np.log1p(gamma * lam))

    best = objective(res.lam)
    for _ in range(200):
        d = rng.standard_normal(6)
        d -= d.mean()
        cand = res.lam + 1e-3 * d
        if np.all(cand >= 0):
            assert objective(cand) <= best + 1e-12


def test_scaling_all_weights_leaves_loads_unchanged():
    gamma = [3.0, 0.5, 1.2, 0.1]
    a = proportional_waterfill(gamma, [1.0, 2.0])
    b = proportional_waterfill(gamma, [5.0, 10.0])
    np.testing.assert_allclose(a.lam, b.lam, atol=1e-9)
    assert b.water_level_multiplier == pytest.approx(5 * a.water_level_multiplier, rel=1e-9)


def test_heavier_weight_never_gets_less_power():
    gamma = [1.0, 1.0]
    light = proportional_waterfill(gamma, [1.0, 1.0]).lam[0]
    heavy = proportional_waterfill(gamma, [2.0, 1.0]).lam[0]
    assert heavy >= light


gains = st.floats(1e-4, 1e3, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda k: st.tuples(
    st.just(k), st.integers(1, 2),
    st.lists(st.floats(0.5, 3.0), min_size=k, max_size=k),
    st.lists(gains, min_size=8, max_size=8))))
def test_matches_enumeration_oracle(case):
    k, n_s, weights, pool = case
    gamma = np.array(pool[:k * n_s])
    res = proportional_waterfill(gamma, weights)
    lam, v = waterfill_by_enumeration(gamma, res.weights_expanded, float(gamma.size))
    np.testing.assert_allclose(res.lam, lam, atol=1e-6)
    assert kkt_residual(res, gamma) <= 1e-8
    assert res.total == pytest.approx(gamma.size, abs=1e-8)
    assert np.all(res.lam >= 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(gains, min_size=1, max_size=8), st.floats(0.1, 50.0))
def test_budget_is_met(gamma, budget):
    res = waterfill(gamma, budget=budget)
    assert res.total == pytest.approx(budget, rel=1e-9, abs=1e-9)
