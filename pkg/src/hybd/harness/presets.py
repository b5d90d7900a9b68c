"""Named scenarios mirroring the published simulation settings.

Every preset is checked for feasibility of all its schemes at every sweep
point when it is loaded.
"""
from __future__ import annotations

from ..channels import ArrayGeometry, MmWaveSpec
from ..errors import ConfigError
from ..rf import SystemConfig
from .config import ScenarioConfig, Sweep

SNR_GRID = tuple(float(x) for x in range(-40, 1, 5))
ROBUSTNESS_SNR = (-10.0, -5.0, 0.0)
RAYLEIGH_TRIALS = 500
MMWAVE_TRIALS = 200
SINGLE_PATH_TRIALS = 200


def _system(n_bs, n_ms, k, n_s, m_ms, m_bs):
    return SystemConfig(n_bs=n_bs, n_ms=n_ms, users=k, streams_per_user=n_s,
                        rf_chains_ms=m_ms, rf_chains_bs=m_bs)


def _fig2(n_bs, n_ms):
    return ScenarioConfig(
        system=_system(n_bs, n_ms, 8, 2, 2, 16), channel_kind="rayleigh",
        snr_grid_db=SNR_GRID, trials=RAYLEIGH_TRIALS,
        name=f"fig2_{n_bs}x{n_ms}",
    )


def _mmwave(name, n_s, m_ms, m_bs, upa, k=8, sweep=None, grid=SNR_GRID):
    geo = {}
    if upa:
        geo = dict(geometry_bs=ArrayGeometry.square_upa(256),
                   geometry_ms=ArrayGeometry.square_upa(16))
    return ScenarioConfig(
        system=_system(256, 16, k, n_s, m_ms, m_bs), channel_kind="mmwave",
        mmwave=MmWaveSpec(elevation_enabled=upa), snr_grid_db=grid,
        trials=MMWAVE_TRIALS, sweep=sweep, name=name, **geo,
    )


def _builders():
    ns_sweep = Sweep("n_s", tuple(range(1, 17)))
    k_sweep = Sweep("k", tuple(range(1, 17)))
    return {
        "fig2_256x16": lambda: _fig2(256, 16),
        "fig2_64x4": lambda: _fig2(64, 4),
        "fig3_ula": lambda: _mmwave("fig3_ula", 2, 2, 16, False),
        "fig3_upa": lambda: _mmwave("fig3_upa", 2, 2, 16, True),
        "fig4_ula": lambda: _mmwave("fig4_ula", 1, 1, 8, False),
        "fig4_upa": lambda: _mmwave("fig4_upa", 1, 1, 8, True),
        "fig5": lambda: ScenarioConfig(
            system=_system(256, 16, 2, 1, 1, 2), channel_kind="single_path",
            mmwave=MmWaveSpec(), snr_grid_db=SNR_GRID, trials=SINGLE_PATH_TRIALS,
            schemes=("hybd", "full_bd", "single_path_analytic"), name="fig5",
        ),
        "fig6": lambda: ScenarioConfig(
            system=_system(256, 16, 8, 1, 1, 8), snr_grid_db=SNR_GRID,
            trials=RAYLEIGH_TRIALS, sweep=Sweep("n_s", (1, 2, 4)), name="fig6",
        ),
        "fig7": lambda: ScenarioConfig(
            system=_system(256, 16, 8, 1, 1, 8), snr_grid_db=ROBUSTNESS_SNR,
            trials=RAYLEIGH_TRIALS, sweep=ns_sweep, name="fig7",
        ),
        "fig8": lambda: ScenarioConfig(
            system=_system(256, 16, 1, 4, 4, 4), snr_grid_db=ROBUSTNESS_SNR,
            trials=RAYLEIGH_TRIALS, sweep=k_sweep, name="fig8",
        ),
        "fig9a": lambda: _mmwave("fig9a", 1, 1, 8, False, sweep=ns_sweep,
                                 grid=ROBUSTNESS_SNR),
        "fig9b": lambda: _mmwave("fig9b", 4, 4, 4, False, k=1, sweep=k_sweep,
                                 grid=ROBUSTNESS_SNR),
    }


PRESET_NAMES = tuple(_builders())


def preset(name: str) -> ScenarioConfig:
    try:
        config = _builders()[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    bad = {key: v for key, v in config.feasibility().items() if v}
    if bad:
        raise ConfigError(f"preset {name} has infeasible points: {bad}")
    return config

