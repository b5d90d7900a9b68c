import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybd.channels import (ArrayGeometry, MmWaveSpec, array_response, draw_large_scale,
                           sample_mmwave, sample_rayleigh, sample_truncated_laplacian,
                           single_path_channel, ula_response, upa_response)
from hybd.errors import InvalidArgument
from hybd.streams import derive, generator


def test_ula_broadside_is_flat():
    a = ula_response(ArrayGeometry.ula(4), 0.0)
    np.testing.assert_allclose(a, np.full(4, 0.5))


def test_ula_endfire_alternates():
    a = ula_response(ArrayGeometry.ula(4), math.pi / 2)
    np.testing.assert_allclose(a, [0.5, -0.5, 0.5, -0.5], atol=1e-15)


def test_upa_azimuth_only_varies_along_columns():
    a = upa_response(ArrayGeometry.upa(2, 2), math.pi / 2, 0.0)
    np.testing.assert_allclose(a, [0.5, -0.5, 0.5, -0.5], atol=1e-15)


def test_upa_elevation_only_varies_along_rows():
    a = upa_response(ArrayGeometry.upa(2, 2), 0.0, math.pi / 2)
    np.testing.assert_allclose(a, [0.5, 0.5, -0.5, -0.5], atol=1e-15)


def test_upa_of_one_row_matches_ula():
    az = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(upa_response(ArrayGeometry.upa(1, 8), az, np.zeros(5)),
                               ula_response(ArrayGeometry.ula(8), az))


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(-math.pi / 2, math.pi / 2),
       st.sampled_from([(1, 4), (4, 4), (2, 8), (16, 16)]))
def test_responses_have_unit_norm(az, el, shape):
    upa = ArrayGeometry.upa(*shape)
    ula = ArrayGeometry.ula(shape[0] * shape[1])
    assert np.linalg.norm(upa_response(upa, az, el)) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(ula_response(ula, az)) == pytest.approx(1.0, abs=1e-12)


def test_vectorized_response_shape():
    assert array_response(ArrayGeometry.ula(8), np.zeros(3)).shape == (8, 3)
    assert array_response(ArrayGeometry.upa(2, 4), np.zeros(3)).shape == (8, 3)


def test_non_finite_angle_rejected():
    with pytest.raises(InvalidArgument):
        ula_response(ArrayGeometry.ula(4), np.nan)


@pytest.mark.parametrize("args", [("ULA", 0), ("UPA", 6, 2, 2), ("XYZ", 4)])
def test_bad_geometry_rejected(args):
    with pytest.raises(InvalidArgument):
        ArrayGeometry(*args)


def test_square_upa_requires_square():
    assert ArrayGeometry.square_upa(16).rows == 4
    with pytest.raises(InvalidArgument):
        ArrayGeometry.square_upa(12)


def test_laplacian_spread_and_truncation():
    spread = math.radians(7.5)
    x = sample_truncated_laplacian(generator(1), 0.0, spread, 100_000)
    assert abs(x.std() - spread) / spread < 0.03
    assert abs(x.mean()) < 3 * spread / math.sqrt(x.size)
    wide = sample_truncated_laplacian(generator(2), 1.0, 5.0, 20_000)
    assert np.all(np.abs(wide - 1.0) <= math.pi)


def test_laplacian_zero_spread_still_consumes_draws():
    a, b = generator(3), generator(3)
    assert sample_truncated_laplacian(a, 0.4, 0.0) == 0.4
    b.uniform(-1, 1)
    assert a.uniform() == b.uniform()


def test_rayleigh_moments():
    ch = sample_rayleigh(0, (4, 16, 256), [1.0] * 4)
    h = ch.per_user_matrix
    assert abs(h.mean()) < 0.01
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.02)
    assert np.var(h.real) == pytest.approx(0.5, abs=0.02)


def test_large_scale_applied_and_stripped():
    beta = [0.5, 1.5]
    ch = sample_rayleigh(4, (2, 4, 8), beta)
    ref = sample_rayleigh(4, (2, 4, 8), [1.0, 1.0])
    np.testing.assert_allclose(ch.normalized, ref.per_user_matrix)
    np.testing.assert_allclose(ch.per_user_matrix[1], np.sqrt(1.5) * ref.per_user_matrix[1])


def test_large_scale_range():
    beta = draw_large_scale(5, 1000, (0.5, 1.5))
    assert beta.min() >= 0.5 and beta.max() <= 1.5


@pytest.mark.parametrize("kind", ["rayleigh", "mmwave"])
def test_mean_frobenius_normalization(kind):
    dims = (1, 4, 16)
    spec = MmWaveSpec()
    vals = []
    for i in range(500):
        ss = derive(11, i)
        ch = (sample_rayleigh(ss, dims, [1.0]) if kind == "rayleigh"
              else sample_mmwave(ss, spec, dims, [1.0]))
        vals.append(np.linalg.norm(ch.normalized) ** 2 / 64)
    assert 0.93 <= np.mean(vals) <= 1.07


def test_mmwave_rank_bounded_by_path_count():
    spec = MmWaveSpec(clusters=1, paths_per_cluster=3)
    ch = sample_mmwave(0, spec, (1, 16, 64), [1.0])
    assert np.linalg.matrix_rank(ch.per_user_matrix[0]) == 3


def test_mmwave_aod_stays_near_sector():
    ch = sample_mmwave(2, MmWaveSpec(), (3, 4, 16), [1.0] * 3)
    for p in ch.paths:
        assert np.all(np.abs(p.aod_azimuth) <= math.pi / 3 + math.pi)
        assert len(p) == 80


def test_mmwave_upa_draws_elevations():
    g = ArrayGeometry.upa(4, 4)
    ch = sample_mmwave(1, MmWaveSpec(elevation_enabled=True), (1, 16, 16), [1.0], g, g)
    assert ch.paths[0].aod_elevation is not None
    flat = sample_mmwave(1, MmWaveSpec(), (1, 16, 16), [1.0], g, g)
    assert flat.paths[0].aod_elevation is None


def test_seeded_draws_are_reproducible():
    spec = MmWaveSpec()
    a = sample_mmwave(9, spec, (2, 4, 16), [1.0, 1.0])
    b = sample_mmwave(9, spec, (2, 4, 16), [1.0, 1.0])
    c = sample_mmwave(10, spec, (2, 4, 16), [1.0, 1.0])
    assert a == b
    assert a != c


def test_user_streams_are_independent_of_user_count():
    small = sample_rayleigh(3, (2, 4, 8), [1.0, 1.0])
    big = sample_rayleigh(3, (5, 4, 8), [1.0] * 5)
    np.testing.assert_array_equal(small.per_user_matrix, big.per_user_matrix[:2])


def test_single_path_channel_is_rank_one_with_known_norm():
    g_bs, g_ms = ArrayGeometry.ula(64), ArrayGeometry.ula(8)
    ch = single_path_channel([0.5 + 0.5j, 2.0], [0.3, -1.0], [0.1, 0.7], g_bs, g_ms)
    for k, alpha in enumerate([0.5 + 0.5j, 2.0]):
        h = ch.per_user_matrix[k]
        assert np.linalg.matrix_rank(h) == 1
        assert np.linalg.norm(h) == pytest.approx(math.sqrt(64 * 8) * abs(alpha))


def test_dimension_and_beta_validation():
    with pytest.raises(InvalidArgument):
        sample_rayleigh(0, (0, 4, 8), [])
    with pytest.raises(InvalidArgument):
        sample_rayleigh(0, (2, 4, 8), [1.0])
    with pytest.raises(InvalidArgument):
        sample_rayleigh(0, (1, 4, 8), [-1.0])
    with pytest.raises(InvalidArgument):
        sample_rayleigh(0, (1, 4, 8), [1.0], geometry_bs=ArrayGeometry.ula(4))
