import math
import warnings

import numpy as np
import pytest

from hybd.bd import HybridDesign
from hybd.channels import (ArrayGeometry, MmWaveSpec, MultiUserChannel, sample_mmwave,
                           sample_rayleigh)
from hybd.errors import ConditioningWarning, InvalidArgument
from hybd.pipeline import design_at, prepare_full_bd, prepare_hybd
from hybd.rates import (approx_rate_single_path, db_to_linear, linear_to_db,
                        sum_rate_bd_closed_form, sum_rate_general)
from hybd.rf import SystemConfig


def test_db_conversions():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert linear_to_db(100.0) == pytest.approx(20.0)
    assert linear_to_db(0.0) == -math.inf


def test_single_path_hand_case():
    # gamma = 4/2 * |alpha|^2 = 2 per user, equal loads, log2(3) each
    rep = approx_rate_single_path([1.0, 1.0j], 1, 1, 4.0)
    assert rep.sum_rate == pytest.approx(2 * math.log2(3), abs=1e-12)


def test_orthogonal_users_hand_case():
    h = np.zeros((2, 1, 2), dtype=complex)
    h[0, 0, 0] = 2.0
    h[1, 0, 1] = 1.0
    ch = MultiUserChannel(h, np.ones(2), ArrayGeometry.ula(2), ArrayGeometry.ula(1))
    design = HybridDesign("manual", None, None, np.eye(2, dtype=complex),
                          (np.ones((1, 1)), np.ones((1, 1))), 1.0, 1)
    rep = sum_rate_general(ch, design, 2.0)
    np.testing.assert_allclose(rep.per_user_rate, [math.log2(5), 1.0])


def test_interference_counts_against_rate():
    h = np.ones((2, 1, 2), dtype=complex)
    ch = MultiUserChannel(h, np.ones(2), ArrayGeometry.ula(2), ArrayGeometry.ula(1))
    design = HybridDesign("manual", None, None, np.eye(2, dtype=complex),
                          (np.ones((1, 1)), np.ones((1, 1))), 1.0, 1)
    # signal p = 1, interference 1, noise 1
    rep = sum_rate_general(ch, design, 2.0)
    np.testing.assert_allclose(rep.per_user_rate, [math.log2(1.5)] * 2)


def test_ill_conditioned_covariance_is_regularized():
    rng = np.random.default_rng(0)
    h = np.zeros((2, 2, 2), dtype=complex)
    h[0] = [[1, 0], [1, 0]]
    h[1] = rng.standard_normal((2, 2))
    ch = MultiUserChannel(h, np.ones(2), ArrayGeometry.ula(2), ArrayGeometry.ula(2))
    # user 0 hears user 1's streams only along one direction
    b = np.hstack([np.zeros((2, 2)), np.eye(2)])
    design = HybridDesign("manual", None, None, b,
                          (np.eye(2, dtype=complex), np.eye(2, dtype=complex)), 1.0, 2)
    with pytest.warns(ConditioningWarning):
        rep = sum_rate_general(ch, design, 1e16)
    assert rep.regularized
    assert np.all(np.isfinite(rep.per_user_rate))


def test_negative_snr_rejected():
    ch = sample_rayleigh(0, (1, 2, 4), [1.0])
    design, _ = design_at(prepare_full_bd(ch, SystemConfig(4, 2, 1, 1, 1, 1)),
                          SystemConfig(4, 2, 1, 1, 1, 1), 1.0)
    with pytest.raises(InvalidArgument):
        sum_rate_general(ch, design, -1.0)


@pytest.mark.parametrize("kind", ["rayleigh", "mmwave"])
@pytest.mark.parametrize("prep", [prepare_hybd, prepare_full_bd])
def test_general_and_closed_form_agree(kind, prep):
    config = SystemConfig(64, 8, 4, 2, 2, 8)
    for seed in range(4):
        dims, beta = (4, 8, 64), np.linspace(0.5, 1.5, 4)
        ch = (sample_rayleigh(seed, dims, beta) if kind == "rayleigh"
              else sample_mmwave(seed, MmWaveSpec(), dims, beta))
        p = prep(ch, config)
        for snr_db in (-30, -10, 0):
            snr = db_to_linear(snr_db)
            design, alloc = design_at(p, config, snr)
            with warnings.catch_warnings():
                warnings.simplefilter("error", ConditioningWarning)
                general = sum_rate_general(ch, design, snr).sum_rate
            closed = sum_rate_bd_closed_form(p.decomp, alloc, snr, 2, design.power_scale).sum_rate
            assert general == pytest.approx(closed, rel=1e-9)


def test_rate_increases_with_snr():
    config = SystemConfig(64, 4, 4, 2, 2, 8)
    ch = sample_rayleigh(5, (4, 4, 64), [1.0] * 4)
    for prep in (prepare_hybd, prepare_full_bd):
        p = prep(ch, config)
        rates = [sum_rate_general(ch, design_at(p, config, db_to_linear(x))[0],
                                  db_to_linear(x)).sum_rate for x in range(-40, 1, 5)]
        assert np.all(np.diff(rates) > 0)


def test_weighted_analytic_rate_favors_heavy_user():
    plain = approx_rate_single_path([1.0, 1.0], 4, 1, 0.5)
    tilted = approx_rate_single_path([1.0, 1.0], 4, 1, 0.5, weights=[3.0, 1.0])
    assert tilted.per_user_rate[0] > plain.per_user_rate[0]
    assert tilted.per_user_rate[1] < plain.per_user_rate[1]
