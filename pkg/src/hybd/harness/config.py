"""Scenario configuration: dataclasses, YAML loading and sweep expansion."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import yaml

from ..channels import ArrayGeometry, MmWaveSpec
from ..errors import ConfigError, HybdError
from ..rf import SystemConfig

CHANNEL_KINDS = ("rayleigh", "mmwave", "single_path")
SCHEMES = ("hybd", "full_bd", "single_path_analytic")
SWEEP_PARAMETERS = ("snr", "n_s", "k")


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemConfig
    channel_kind: str = "rayleigh"
    mmwave: MmWaveSpec | None = None
    geometry_bs: ArrayGeometry | None = None
    geometry_ms: ArrayGeometry | None = None
    beta_range: tuple[float, float] = (0.5, 1.5)
    snr_grid_db: tuple[float, ...] = ()
    trials: int = 500
    master_seed: int = 0
    schemes: tuple[str, ...] = ("hybd", "full_bd")
    sweep: Sweep | None = None
    name: str = "scenario"

    def __post_init__(self):
        s = self.system
        if self.channel_kind not in CHANNEL_KINDS:
            raise ConfigError(f"channel_kind must be one of {CHANNEL_KINDS}")
        if self.channel_kind != "rayleigh" and self.mmwave is None:
            object.__setattr__(self, "mmwave", MmWaveSpec())
        gbs = self.geometry_bs or ArrayGeometry.ula(s.n_bs)
        gms = self.geometry_ms or ArrayGeometry.ula(s.n_ms)
        if gbs.elements_total != s.n_bs or gms.elements_total != s.n_ms:
            raise ConfigError("geometry sizes do not match n_bs / n_ms")
        object.__setattr__(self, "geometry_bs", gbs)
        object.__setattr__(self, "geometry_ms", gms)
        lo, hi = (float(x) for x in self.beta_range)
        if not 0 < lo <= hi:
            raise ConfigError("beta_range must satisfy 0 < low <= high")
        object.__setattr__(self, "beta_range", (lo, hi))
        grid = tuple(float(x) for x in self.snr_grid_db) or (float(s.snr_db),)
        if not all(math.isfinite(x) for x in grid):
            raise ConfigError("snr_grid_db entries must be finite")
        object.__setattr__(self, "snr_grid_db", grid)
        if int(self.trials) < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        schemes = tuple(self.schemes)
        if not schemes or any(x not in SCHEMES for x in schemes):
            raise ConfigError(f"schemes must be a nonempty subset of {SCHEMES}")
        if len(set(schemes)) != len(schemes):
            raise ConfigError("schemes must not repeat")
        if "single_path_analytic" in schemes and self.channel_kind != "single_path":
            raise ConfigError("single_path_analytic needs channel_kind single_path")
        object.__setattr__(self, "schemes", schemes)
        if self.sweep is not None:
            if self.sweep.parameter not in SWEEP_PARAMETERS:
                raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
            if not self.sweep.values:
                raise ConfigError("sweep needs at least one value")
            self.points()  # raises on malformed sweep values

    def points(self) -> list["SweepPoint"]:
        """Expand the sweep into concrete ``(system, snr grid)`` points."""
        if self.sweep is None:
            return [SweepPoint("none", None, self.system, self.snr_grid_db)]
        p, values = self.sweep.parameter, self.sweep.values
        if p == "snr":
            return [SweepPoint("snr", None, self.system, tuple(float(v) for v in values))]
        out = []
        for v in values:
            if float(v) != int(v) or int(v) < 1:
                raise ConfigError(f"sweep over {p} needs positive integers, got {v}")
            try:
                out.append(SweepPoint(p, int(v), _apply(self.system, p, int(v)), self.snr_grid_db))
            except HybdError as exc:
                raise ConfigError(f"sweep value {p}={v}: {exc}") from exc
        return out

    def at(self, point: "SweepPoint") -> "ScenarioConfig":
        return replace(self, system=point.system, snr_grid_db=point.snr_grid_db, sweep=None)

    def feasibility(self) -> dict[tuple[Any, str], list[str]]:
        """Dimension problems per ``(sweep value, scheme)``; empty lists mean feasible."""
        out = {}
        for pt in self.points():
            for scheme in self.schemes:
                out[(pt.value, scheme)] = scheme_violations(self, pt.system, scheme)
        return out


@dataclass(frozen=True)
class SweepPoint:
    parameter: str
    value: int | None
    system: SystemConfig
    snr_grid_db: tuple[float, ...]


def _apply(system: SystemConfig, parameter: str, value: int) -> SystemConfig:
    if parameter == "n_s":
        # fully loaded RF: M_MS = N_S, M_BS = K N_S
        return replace(system, streams_per_user=value, rf_chains_ms=value,
                       rf_chains_bs=system.users * value)
    if len(set(system.weights)) > 1:
        raise ConfigError("sweeping k requires equal user weights")
    return replace(system, users=value, rf_chains_bs=value * system.rf_chains_ms,
                   weights=(system.weights[0],) * value)


def scheme_violations(config: ScenarioConfig, system: SystemConfig, scheme: str) -> list[str]:
    if scheme == "hybd":
        return system.hybd_violations()
    if scheme == "full_bd":
        out = []
        if system.streams_per_user > system.n_ms:
            out.append(f"N_S <= N_MS ({system.streams_per_user}, {system.n_ms})")
        room = system.n_bs - (system.users - 1) * system.n_ms
        if room < system.streams_per_user:
            out.append(f"N_BS - (K-1)*N_MS >= N_S ({room} < {system.streams_per_user})")
        return out
    out = []
    if config.channel_kind != "single_path":
        out.append("single_path_analytic needs single-path channels")
    if system.streams_per_user != 1 or system.rf_chains_ms != 1:
        out.append("single_path_analytic needs N_S = M_MS = 1")
    return out


# ---------------------------------------------------------------------------
# YAML <-> dataclasses
# ---------------------------------------------------------------------------

def _strict(cls, data: Any, where: str, convert=None):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    kwargs = dict(data)
    try:
        for key, fn in (convert or {}).items():
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = fn(kwargs[key])
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError, HybdError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _pair(x):
    if not isinstance(x, (list, tuple)) or len(x) != 2:
        raise ConfigError(f"expected a [low, high] pair, got {x!r}")
    return (float(x[0]), float(x[1]))


def config_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    if "system" not in data:
        raise ConfigError("configuration needs a 'system' section")
    conv = {
        "system": lambda d: _strict(SystemConfig, d, "system",
                                    {"weights": lambda w: tuple(float(x) for x in w)}),
        "mmwave": lambda d: _strict(MmWaveSpec, d, "mmwave",
                                    {"aod_mean_range": _pair, "aoa_mean_range": _pair}),
        "geometry_bs": lambda d: _strict(ArrayGeometry, d, "geometry_bs"),
        "geometry_ms": lambda d: _strict(ArrayGeometry, d, "geometry_ms"),
        "beta_range": _pair,
        "snr_grid_db": lambda x: tuple(float(v) for v in x),
        "schemes": tuple,
        "sweep": lambda d: _strict(Sweep, d, "sweep",
                                   {"values": lambda v: tuple(v)}),
    }
    return _strict(ScenarioConfig, data, "config", conv)


def config_to_dict(config: ScenarioConfig) -> dict:
    def clean(x):
        if dataclasses.is_dataclass(x):
            return {f.name: clean(getattr(x, f.name)) for f in dataclasses.fields(x)}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x
    return clean(config)


def load_config(path: str | Path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from exc
    return config_from_dict(data)


def dump_config(config: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)
