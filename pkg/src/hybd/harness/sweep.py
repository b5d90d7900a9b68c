"""Sweeps over SNR, streams per user or user count, with fixed-order reduction."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Iterable

from .config import ScenarioConfig, scheme_violations
from .trial import TrialResult, run_trial


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    scheme: str
    channel_kind: str
    sweep_param: str
    sweep_value: str
    snr_db: float
    trials: int
    mean_sum_rate_bps_hz: float
    stderr_sum_rate: float
    mean_per_user_rate_min: float
    mean_per_user_rate_max: float
    feasible: bool


def run_trials(config: ScenarioConfig, workers: int = 1) -> list[TrialResult]:
    """All trials of ``config`` (no sweep), returned in trial-index order."""
    indices = range(config.trials)
    if workers <= 1:
        return [run_trial(config, i) for i in indices]
    chunk = max(1, config.trials // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(partial(run_trial, config), indices, chunksize=chunk))


def _mean(xs: list[float]) -> float:
    return math.fsum(xs) / len(xs)


def _stderr(xs: list[float]) -> float:
    n = len(xs)
    if n < 2:
        return 0.0
    m = _mean(xs)
    var = math.fsum((x - m) ** 2 for x in xs) / (n - 1)
    return math.sqrt(var / n)


def aggregate(config: ScenarioConfig, results: list[TrialResult], sweep_param: str,
              sweep_value) -> list[SweepRow]:
    rows = []
    label = "" if sweep_value is None else str(sweep_value)
    for scheme in config.schemes:
        ok = [r for r in results if scheme in r.outcomes]
        feasible = len(ok) == len(results) and not scheme_violations(config, config.system, scheme)
        for j, snr_db in enumerate(config.snr_grid_db):
            value = f"{snr_db:g}" if sweep_param == "snr" else label
            if not feasible:
                stats = (math.nan,) * 4
            else:
                reps = [r.outcomes[scheme].reports[j] for r in ok]
                sums = [rep.sum_rate for rep in reps]
                stats = (
                    _mean(sums),
                    _stderr(sums),
                    _mean([float(rep.per_user_rate.min()) for rep in reps]),
                    _mean([float(rep.per_user_rate.max()) for rep in reps]),
                )
            rows.append(SweepRow(config.name, scheme, config.channel_kind, sweep_param,
                                 value, snr_db, len(results), *stats,
                                 feasible))
    return rows


def run_sweep(config: ScenarioConfig, workers: int = 1, ignore_sweep: bool = False,
              progress=None) -> list[SweepRow]:
    """Mean and standard error of the sum rate for every point, SNR and scheme."""
    if ignore_sweep or config.sweep is None:
        jobs = [(replace(config, sweep=None), "none", None)]
    else:
        jobs = [(config.at(pt), pt.parameter, pt.value) for pt in config.points()]
    rows = []
    for sub, param, value in jobs:
        results = run_trials(sub, workers)
        rows.extend(aggregate(sub, results, param, value))
        if progress is not None:
            progress(param, value, results)
    return rows


def rows_for(rows: Iterable[SweepRow], scheme: str, snr_db: float | None = None) -> list[SweepRow]:
    return [r for r in rows if r.scheme == scheme and (snr_db is None or r.snr_db == snr_db)]
