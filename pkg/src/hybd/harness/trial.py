"""One Monte-Carlo trial: draw a channel, design every scheme, evaluate rates."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..bd import leakage_ratio, null_space_residual
from ..channels import (MultiUserChannel, complex_normal, draw_large_scale,
                        sample_mmwave, sample_rayleigh, single_path_channel)
from ..errors import DesignInfeasible
from ..pipeline import PREPARERS, design_at
from ..rates import RateReport, approx_rate_single_path, db_to_linear, sum_rate_general
from ..streams import CHANNEL, generator, trial_stream
from .config import ScenarioConfig

LEAKAGE_TOL = 1e-9
NULL_SPACE_TOL = 1e-10


@dataclass(frozen=True)
class SchemeOutcome:
    reports: tuple[RateReport, ...]  # one per SNR grid point
    water_levels: tuple[float, ...]
    null_space_residual: float
    leakage: float

    @property
    def flagged(self) -> bool:
        return bool(self.leakage > LEAKAGE_TOL or self.null_space_residual > NULL_SPACE_TOL
                    or any(r.regularized for r in self.reports))


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    outcomes: dict[str, SchemeOutcome]
    infeasible: dict[str, str]
    combiner_indices: tuple[tuple[int, ...], ...]
    wall_time: float = field(compare=False, default=0.0)

    @property
    def flagged(self) -> bool:
        return any(o.flagged for o in self.outcomes.values())

    def sum_rates(self, scheme: str) -> np.ndarray:
        return np.array([r.sum_rate for r in self.outcomes[scheme].reports])


def sample_channel(config: ScenarioConfig, trial_index: int) -> MultiUserChannel:
    s = config.system
    ss = trial_stream(config.master_seed, trial_index)
    beta = draw_large_scale(ss, s.users, config.beta_range)
    dims = (s.users, s.n_ms, s.n_bs)
    if config.channel_kind == "rayleigh":
        ch = sample_rayleigh(ss, dims, beta, config.geometry_bs, config.geometry_ms)
    elif config.channel_kind == "mmwave":
        ch = sample_mmwave(ss, config.mmwave, dims, beta, config.geometry_bs, config.geometry_ms)
    else:
        ch = _sample_single_path(config, ss, beta)
    return ch


def _sample_single_path(config, ss, beta) -> MultiUserChannel:
    spec = config.mmwave
    gains, aoas, aods = [], [], []
    for k in range(config.system.users):
        rng = generator(ss, k, CHANNEL)
        aods.append(rng.uniform(*spec.aod_mean_range))
        aoas.append(rng.uniform(*spec.aoa_mean_range))
        gains.append(np.sqrt(beta[k]) * complex_normal(rng, ()))
    return single_path_channel(gains, aoas, aods, config.geometry_bs, config.geometry_ms,
                               large_scale=beta)


def run_trial(config: ScenarioConfig, trial_index: int) -> TrialResult:
    """Evaluate every configured scheme on the channel of ``trial_index``.

    The result depends only on ``(config, trial_index)``.
    """
    start = time.perf_counter()
    system = config.system
    channel = sample_channel(config, trial_index)
    snrs = [db_to_linear(x) for x in config.snr_grid_db]
    outcomes, infeasible = {}, {}
    feedback: tuple[tuple[int, ...], ...] = ()
    for scheme in config.schemes:
        if scheme == "single_path_analytic":
            alphas = [p.gain[0] for p in channel.paths]
            reports = tuple(
                approx_rate_single_path(alphas, system.n_bs, system.n_ms, snr, system.weights)
                for snr in snrs
            )
            outcomes[scheme] = SchemeOutcome(reports, (), 0.0, 0.0)
            continue
        try:
            prepared = PREPARERS[scheme](channel, system)
        except DesignInfeasible as exc:
            infeasible[scheme] = str(exc)
            continue
        if prepared.rf is not None:
            feedback = tuple(tuple(w.selected_indices) for w in prepared.rf.combiners)
        reports, levels, leak = [], [], 0.0
        for snr in snrs:
            design, alloc = design_at(prepared, system, snr)
            reports.append(sum_rate_general(channel, design, snr, scheme))
            levels.append(alloc.water_level_multiplier)
            leak = max(leak, leakage_ratio(design, channel))
        outcomes[scheme] = SchemeOutcome(
            tuple(reports), tuple(levels), null_space_residual(prepared.decomp), leak
        )
    return TrialResult(trial_index, outcomes, infeasible, feedback,
                       time.perf_counter() - start)
