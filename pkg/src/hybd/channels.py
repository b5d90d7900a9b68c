"""Array geometries and multiuser channel generators.

Three channel families are provided: i.i.d. Rayleigh, the clustered mmWave
model (``N_c`` clusters of ``N_p`` paths, Laplacian angle spread about
uniformly drawn cluster means) and the deterministic single-path channel.
All samplers take an explicit seed stream and are pure functions of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidArgument
from .streams import BETA, CHANNEL, generator

__all__ = [
    "ArrayGeometry",
    "MmWaveSpec",
    "PathRealization",
    "PathSet",
    "MultiUserChannel",
    "ula_response",
    "upa_response",
    "array_response",
    "sample_rayleigh",
    "sample_truncated_laplacian",
    "sample_mmwave",
    "assemble_clustered",
    "single_path_channel",
    "draw_large_scale",
]


@dataclass(frozen=True)
class ArrayGeometry:
    """Antenna array layout.

    ``kind`` is ``"ULA"`` or ``"UPA"``. For a UPA, element ``r * cols + c``
    sits at row ``r`` and column ``c``.
    """

    kind: str
    elements_total: int
    rows: int = 1
    cols: int = 0
    spacing_over_wavelength: float = 0.5

    def __post_init__(self):
        if self.kind not in ("ULA", "UPA"):
            raise InvalidArgument(f"unknown array kind {self.kind!r}")
        if int(self.elements_total) < 1:
            raise InvalidArgument("elements_total must be >= 1")
        if not self.spacing_over_wavelength > 0:
            raise InvalidArgument("spacing_over_wavelength must be > 0")
        if self.kind == "ULA":
            object.__setattr__(self, "rows", 1)
            object.__setattr__(self, "cols", int(self.elements_total))
        else:
            if self.rows < 1 or self.cols < 1:
                raise InvalidArgument("UPA needs rows >= 1 and cols >= 1")
            if self.rows * self.cols != self.elements_total:
                raise InvalidArgument(
                    f"UPA {self.rows}x{self.cols} does not have "
                    f"{self.elements_total} elements"
                )

    @classmethod
    def ula(cls, n: int, spacing: float = 0.5) -> "ArrayGeometry":
        return cls("ULA", int(n), spacing_over_wavelength=spacing)

    @classmethod
    def upa(cls, rows: int, cols: int, spacing: float = 0.5) -> "ArrayGeometry":
        return cls("UPA", int(rows) * int(cols), int(rows), int(cols), spacing)

    @classmethod
    def square_upa(cls, n: int, spacing: float = 0.5) -> "ArrayGeometry":
        side = math.isqrt(n)
        if side * side != n:
            raise InvalidArgument(f"{n} elements do not form a square UPA")
        return cls.upa(side, side, spacing)


@dataclass(frozen=True)
class MmWaveSpec:
    clusters: int = 8
    paths_per_cluster: int = 10
    aod_mean_range: tuple[float, float] = (-math.pi / 3, math.pi / 3)
    aoa_mean_range: tuple[float, float] = (0.0, 2 * math.pi)
    aod_spread: float = math.radians(7.5)
    aoa_spread: float = math.radians(7.5)
    elevation_enabled: bool = False

    def __post_init__(self):
        if self.clusters < 1 or self.paths_per_cluster < 1:
            raise InvalidArgument("clusters and paths_per_cluster must be >= 1")
        for name in ("aod_mean_range", "aoa_mean_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise InvalidArgument(f"{name}: lower bound exceeds upper bound")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.aod_spread < 0 or self.aoa_spread < 0:
            raise InvalidArgument("angle spreads must be >= 0")


@dataclass(frozen=True)
class PathRealization:
    gain: complex
    aoa_azimuth: float
    aod_azimuth: float
    aoa_elevation: float = 0.0
    aod_elevation: float = 0.0


@dataclass(frozen=True)
class PathSet:
    """All paths of one user, stored column-wise."""

    gain: np.ndarray
    aoa_azimuth: np.ndarray
    aod_azimuth: np.ndarray
    aoa_elevation: np.ndarray | None = None
    aod_elevation: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.gain)

    def __iter__(self) -> Iterator[PathRealization]:
        zeros = np.zeros(len(self))
        aoa_el = self.aoa_elevation if self.aoa_elevation is not None else zeros
        aod_el = self.aod_elevation if self.aod_elevation is not None else zeros
        for i in range(len(self)):
            yield PathRealization(
                complex(self.gain[i]),
                float(self.aoa_azimuth[i]),
                float(self.aod_azimuth[i]),
                float(aoa_el[i]),
                float(aod_el[i]),
            )

    def realizations(self) -> list[PathRealization]:
        return list(self)

    def __eq__(self, other):
        if not isinstance(other, PathSet):
            return NotImplemented
        return self.realizations() == other.realizations()


@dataclass(frozen=True, eq=False)
class MultiUserChannel:
    """Stacked user channels ``H_k = sqrt(beta_k) * Hdot_k``.

    ``per_user_matrix`` has shape ``(K, N_MS, N_BS)``.
    """

    per_user_matrix: np.ndarray
    large_scale: np.ndarray
    geometry_bs: ArrayGeometry
    geometry_ms: ArrayGeometry
    paths: tuple[PathSet, ...] | None = None
    kind: str = "custom"
    seed: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        h = np.asarray(self.per_user_matrix, dtype=complex)
        if h.ndim != 3:
            raise InvalidArgument("per_user_matrix must be (K, N_MS, N_BS)")
        beta = np.asarray(self.large_scale, dtype=float)
        if beta.shape != (h.shape[0],):
            raise InvalidArgument("one large-scale factor per user required")
        object.__setattr__(self, "per_user_matrix", h)
        object.__setattr__(self, "large_scale", beta)

    @property
    def users(self) -> int:
        return self.per_user_matrix.shape[0]

    @property
    def n_ms(self) -> int:
        return self.per_user_matrix.shape[1]

    @property
    def n_bs(self) -> int:
        return self.per_user_matrix.shape[2]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.per_user_matrix[k]

    def __len__(self) -> int:
        return self.users

    @property
    def normalized(self) -> np.ndarray:
        return self.per_user_matrix / np.sqrt(self.large_scale)[:, None, None]

    def stacked(self) -> np.ndarray:
        """Row-stack of all user channels, ``K*N_MS x N_BS``."""
        return self.per_user_matrix.reshape(-1, self.n_bs)

    def __eq__(self, other):
        if not isinstance(other, MultiUserChannel):
            return NotImplemented
        return (
            np.array_equal(self.per_user_matrix, other.per_user_matrix)
            and np.array_equal(self.large_scale, other.large_scale)
            and self.geometry_bs == other.geometry_bs
            and self.geometry_ms == other.geometry_ms
            and self.paths == other.paths
        )


def _check_finite(*angles):
    for a in angles:
        if not np.all(np.isfinite(a)):
            raise InvalidArgument("angles must be finite")


def _steering(n: int, spacing: float, sine) -> np.ndarray:
    """Unit-norm ULA phase profile for each entry of ``sine``; shape (n, L)."""
    sine = np.atleast_1d(np.asarray(sine, dtype=float))
    idx = np.arange(n)[:, None]
    return np.exp(2j * np.pi * spacing * idx * sine[None, :]) / np.sqrt(n)


def ula_response(geometry: ArrayGeometry, azimuth) -> np.ndarray:
    """ULA response; a vector for scalar ``azimuth``, else one column per angle."""
    if geometry.kind != "ULA":
        raise InvalidArgument("ula_response needs a ULA geometry")
    _check_finite(azimuth)
    out = _steering(geometry.elements_total, geometry.spacing_over_wavelength,
                    np.sin(azimuth))
    return out[:, 0] if np.ndim(azimuth) == 0 else out


def upa_response(geometry: ArrayGeometry, azimuth, elevation) -> np.ndarray:
    """UPA response as the row-major Kronecker product of two ULA profiles.

    Horizontal phase argument is ``sin(az) cos(el)``, vertical is ``sin(el)``.
    """
    if geometry.kind != "UPA":
        raise InvalidArgument("upa_response needs a UPA geometry")
    _check_finite(azimuth, elevation)
    az = np.atleast_1d(np.asarray(azimuth, dtype=float))
    el = np.atleast_1d(np.asarray(elevation, dtype=float))
    az, el = np.broadcast_arrays(az, el)
    d = geometry.spacing_over_wavelength
    horiz = _steering(geometry.cols, d, np.sin(az) * np.cos(el))
    vert = _steering(geometry.rows, d, np.sin(el))
    # column-wise Kronecker: element (r, c) -> r * cols + c
    out = (vert[:, None, :] * horiz[None, :, :]).reshape(geometry.elements_total, -1)
    scalar = np.ndim(azimuth) == 0 and np.ndim(elevation) == 0
    return out[:, 0] if scalar else out


def array_response(geometry: ArrayGeometry, azimuth, elevation=None) -> np.ndarray:
    if geometry.kind == "ULA":
        return ula_response(geometry, azimuth)
    if elevation is None:
        elevation = np.zeros_like(np.asarray(azimuth, dtype=float))
    return upa_response(geometry, azimuth, elevation)


def _as_rng(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    return generator(stream)


def _check_large_scale(large_scale, users: int) -> np.ndarray:
    beta = np.asarray(large_scale, dtype=float).reshape(-1)
    if beta.shape != (users,):
        raise InvalidArgument(f"expected {users} large-scale factors, got {beta.size}")
    if not np.all(beta > 0) or not np.all(np.isfinite(beta)):
        raise InvalidArgument("large-scale factors must be positive and finite")
    return beta


def _check_dims(dims) -> tuple[int, int, int]:
    users, n_ms, n_bs = (int(x) for x in dims)
    if min(users, n_ms, n_bs) < 1:
        raise InvalidArgument(f"dimensions must be positive, got {dims}")
    return users, n_ms, n_bs


def _default_geometries(geometry_bs, geometry_ms, n_bs, n_ms):
    geometry_bs = geometry_bs or ArrayGeometry.ula(n_bs)
    geometry_ms = geometry_ms or ArrayGeometry.ula(n_ms)
    if geometry_bs.elements_total != n_bs or geometry_ms.elements_total != n_ms:
        raise InvalidArgument("array geometries do not match channel dimensions")
    return geometry_bs, geometry_ms


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) samples: real and imaginary parts each of variance 1/2."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * math.sqrt(0.5)


def draw_large_scale(seed, users: int, beta_range=(0.5, 1.5)) -> np.ndarray:
    lo, hi = beta_range
    if not 0 < lo <= hi:
        raise InvalidArgument("beta_range must satisfy 0 < low <= high")
    return np.array([generator(seed, k, BETA).uniform(lo, hi) for k in range(users)])


def sample_rayleigh(seed, dims, large_scale, geometry_bs=None, geometry_ms=None
                    ) -> MultiUserChannel:
    users, n_ms, n_bs = _check_dims(dims)
    beta = _check_large_scale(large_scale, users)
    geometry_bs, geometry_ms = _default_geometries(geometry_bs, geometry_ms, n_bs, n_ms)
    h = np.empty((users, n_ms, n_bs), dtype=complex)
    for k in range(users):
        h[k] = complex_normal(generator(seed, k, CHANNEL), (n_ms, n_bs))
    h *= np.sqrt(beta)[:, None, None]
    return MultiUserChannel(h, beta, geometry_bs, geometry_ms, kind="rayleigh")


def sample_truncated_laplacian(stream, mean, spread, size=None):
    """Laplacian draws with standard deviation ``spread``, kept within ``mean +- pi``.

    Sampled by inverting the truncated CDF, so every call consumes the same
    number of uniforms regardless of the outcome.
    """
    if spread < 0:
        raise InvalidArgument("spread must be >= 0")
    rng = _as_rng(stream)
    u = rng.uniform(-1.0, 1.0, size=size)
    mean = np.asarray(mean, dtype=float)
    if spread == 0:
        out = np.broadcast_to(mean, np.shape(u)).astype(float)
        return float(out) if size is None and out.ndim == 0 else out
    scale = spread / math.sqrt(2.0)
    # |x| from an exponential truncated at pi
    mag = -scale * np.log1p(np.abs(u) * math.expm1(-math.pi / scale))
    out = mean + np.copysign(np.minimum(mag, math.pi), u)
    return float(out) if np.ndim(out) == 0 else out


def assemble_clustered(paths: PathSet, geometry_bs: ArrayGeometry,
                       geometry_ms: ArrayGeometry) -> np.ndarray:
    """Normalized clustered channel ``sqrt(N_BS N_MS / L) sum_l a_l a_MS a_BS^H``."""
    n_bs, n_ms = geometry_bs.elements_total, geometry_ms.elements_total
    a_ms = array_response(geometry_ms, paths.aoa_azimuth, paths.aoa_elevation)
    a_bs = array_response(geometry_bs, paths.aod_azimuth, paths.aod_elevation)
    a_ms = a_ms.reshape(n_ms, -1)
    a_bs = a_bs.reshape(n_bs, -1)
    scale = math.sqrt(n_bs * n_ms / len(paths))
    return scale * (a_ms * paths.gain[None, :]) @ a_bs.conj().T


def _draw_paths(rng: np.random.Generator, spec: MmWaveSpec, elevation: bool) -> PathSet:
    nc, npth = spec.clusters, spec.paths_per_cluster

    def angles(mean_range, spread):
        means = rng.uniform(*mean_range, size=nc)
        return sample_truncated_laplacian(rng, means[:, None], spread, (nc, npth)).ravel()

    aod = angles(spec.aod_mean_range, spec.aod_spread)
    aoa = angles(spec.aoa_mean_range, spec.aoa_spread)
    aod_el = aoa_el = None
    if elevation:
        aod_el = angles(spec.aod_mean_range, spec.aod_spread)
        aoa_el = angles(spec.aoa_mean_range, spec.aoa_spread)
    gain = complex_normal(rng, nc * npth)
    return PathSet(gain, aoa, aod, aoa_el, aod_el)


def sample_mmwave(seed, spec: MmWaveSpec, dims, large_scale, geometry_bs=None,
                  geometry_ms=None) -> MultiUserChannel:
    users, n_ms, n_bs = _check_dims(dims)
    beta = _check_large_scale(large_scale, users)
    geometry_bs, geometry_ms = _default_geometries(geometry_bs, geometry_ms, n_bs, n_ms)
    elevation = spec.elevation_enabled and "UPA" in (geometry_bs.kind, geometry_ms.kind)
    h = np.empty((users, n_ms, n_bs), dtype=complex)
    paths = []
    for k in range(users):
        p = _draw_paths(generator(seed, k, CHANNEL), spec, elevation)
        h[k] = assemble_clustered(p, geometry_bs, geometry_ms)
        paths.append(p)
    h *= np.sqrt(beta)[:, None, None]
    return MultiUserChannel(h, beta, geometry_bs, geometry_ms, tuple(paths), kind="mmwave")


def single_path_channel(gains: Sequence[complex], aoas: Sequence[float],
                        aods: Sequence[float], geometry_bs: ArrayGeometry,
                        geometry_ms: ArrayGeometry, large_scale=None
                        ) -> MultiUserChannel:
    """``H_k = sqrt(N_BS N_MS) alpha_k a_MS(aoa_k) a_BS(aod_k)^H``.

    ``gains`` already include any large-scale fading; ``large_scale`` is only
    recorded so that ``normalized`` can strip it again.
    """
    gains = np.asarray(gains, dtype=complex).reshape(-1)
    aoas = np.asarray(aoas, dtype=float).reshape(-1)
    aods = np.asarray(aods, dtype=float).reshape(-1)
    if not len(gains) == len(aoas) == len(aods):
        raise InvalidArgument("gains, aoas and aods must have equal length")
    users = len(gains)
    beta = np.ones(users) if large_scale is None else _check_large_scale(large_scale, users)
    n_bs, n_ms = geometry_bs.elements_total, geometry_ms.elements_total
    a_ms = array_response(geometry_ms, aoas).reshape(n_ms, users)
    a_bs = array_response(geometry_bs, aods).reshape(n_bs, users)
    h = np.sqrt(n_bs * n_ms) * gains[:, None, None] * (
        a_ms.T[:, :, None] * a_bs.T.conj()[:, None, :]
    )
    paths = tuple(PathSet(gains[k:k + 1], aoas[k:k + 1], aods[k:k + 1]) for k in range(users))
    return MultiUserChannel(h, beta, geometry_bs, geometry_ms, paths, kind="single_path")
