import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybd.channels import ArrayGeometry, sample_rayleigh, single_path_channel
from hybd.errors import InvalidArgument
from hybd.oracles import combiner_by_exhaustion
from hybd.rf import (SystemConfig, build_dft_codebook, build_intermediate_channel,
                     combiner_scores, design_rf_stage, egt_precoder, equivalent_channel,
                     off_diagonal_ratio, select_rf_combiner)
from hybd.streams import generator


def test_codebook_is_unitary_and_constant_modulus():
    cb = build_dft_codebook(8).columns
    np.testing.assert_allclose(cb.conj().T @ cb, np.eye(8), atol=1e-12)
    np.testing.assert_allclose(np.abs(cb), 1 / math.sqrt(8))


def test_codebook_size_two():
    np.testing.assert_allclose(build_dft_codebook(2).columns,
                               np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-15)


def test_combiner_picks_aligned_columns():
    cb = build_dft_codebook(4)
    # channel rows built from codebook columns 3 and 1 with different strengths
    h = 3 * np.outer(cb.columns[:, 3], np.ones(2)) + np.outer(cb.columns[:, 1], [1, -1])
    w = select_rf_combiner(h, cb, 2)
    assert w.selected_indices == (3, 1)
    np.testing.assert_allclose(w.scores, [0, 2, 0, 6], atol=1e-12)


def test_ties_go_to_lower_index():
    h = np.zeros((4, 3), dtype=complex)
    w = select_rf_combiner(h, build_dft_codebook(4), 2)
    assert w.selected_indices == (0, 1)


def test_scores_match_direct_definition():
    rng = generator(0)
    h = rng.standard_normal((6, 10)) + 1j * rng.standard_normal((6, 10))
    cb = build_dft_codebook(6)
    direct = [np.sum(np.abs(cb.columns[:, q].conj() @ h)) for q in range(6)]
    np.testing.assert_allclose(combiner_scores(h, cb), direct, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 3), st.integers(1, 12))
def test_combiner_matches_exhaustive_search(seed, n_ms, m_ms, n_bs):
    m_ms = min(m_ms, n_ms)
    rng = generator(seed)
    h = rng.standard_normal((n_ms, n_bs)) + 1j * rng.standard_normal((n_ms, n_bs))
    got = select_rf_combiner(h, build_dft_codebook(n_ms), m_ms)
    assert tuple(sorted(got.selected_indices)) == combiner_by_exhaustion(h, m_ms)


def test_combiner_argument_checks():
    cb = build_dft_codebook(4)
    with pytest.raises(InvalidArgument):
        select_rf_combiner(np.ones((3, 2)), cb, 1)
    with pytest.raises(InvalidArgument):
        select_rf_combiner(np.ones((4, 2)), cb, 5)


def test_egt_hand_example():
    h_int = np.array([[1 + 1j, -1]])
    f = egt_precoder(h_int)
    np.testing.assert_allclose(np.abs(f.matrix), 1 / math.sqrt(2))
    gain = (h_int @ f.matrix)[0, 0]
    assert gain.real == pytest.approx((math.sqrt(2) + 1) / math.sqrt(2), abs=1e-12)
    assert abs(gain.imag) < 1e-15


def test_egt_zero_entry_gets_zero_phase():
    f = egt_precoder(np.array([[0.0, 1.0]]))
    assert f.phases[0, 0] == 0.0


def test_egt_rejects_non_finite():
    with pytest.raises(InvalidArgument):
        egt_precoder(np.array([[np.nan, 1.0]]))


def test_equivalent_diagonal_is_row_l1_norm():
    ch = sample_rayleigh(1, (4, 8, 64), [1.0] * 4)
    rf = design_rf_stage(ch, 2)
    eq = rf.equivalent
    assert eq.full.shape == (8, 8)
    expected = np.abs(eq.intermediate).sum(axis=1) / math.sqrt(64)
    np.testing.assert_allclose(np.diag(eq.full).real, expected, rtol=1e-12)
    np.testing.assert_allclose(np.diag(eq.full).imag, 0, atol=1e-12)
    assert len(eq.per_user_blocks) == 4 and eq.per_user_blocks[0].shape == (2, 8)
    assert rf.feedback == [list(w.selected_indices) for w in rf.combiners]


def test_non_square_equivalent_rejected():
    ch = sample_rayleigh(0, (2, 4, 16), [1.0, 1.0])
    cb = build_dft_codebook(4)
    ws = [select_rf_combiner(h, cb, 2) for h in ch.per_user_matrix]
    h_int = build_intermediate_channel(ch, ws)
    f = egt_precoder(h_int[:3])
    with pytest.raises(InvalidArgument):
        equivalent_channel(h_int, f, ws)


def test_off_diagonal_ratio_shrinks_with_array_size():
    medians = []
    for n_bs in (16, 64, 256):
        vals = []
        for t in range(40):
            rng = generator(7, t)
            ch = single_path_channel(
                rng.standard_normal(2) + 1j * rng.standard_normal(2),
                rng.uniform(0, 2 * math.pi, 2), rng.uniform(-math.pi / 3, math.pi / 3, 2),
                ArrayGeometry.ula(n_bs), ArrayGeometry.ula(16))
            vals.append(off_diagonal_ratio(design_rf_stage(ch, 1).equivalent.full))
        medians.append(np.median(np.concatenate(vals)))
    assert medians[0] > medians[1] > medians[2]


def test_system_config_checks():
    ok = SystemConfig(256, 16, 8, 2, 2, 16)
    assert ok.hybd_violations() == [] and ok.total_streams == 16
    assert SystemConfig(256, 16, 8, 2, 2, 12).hybd_violations()
    assert SystemConfig(256, 16, 8, 3, 2, 16).stream_constraint_violations()
    np.testing.assert_array_equal(ok.weights, np.ones(8))
    with pytest.raises(InvalidArgument):
        SystemConfig(256, 16, 8, 2, 2, 16, weights=(1.0,) * 3)
