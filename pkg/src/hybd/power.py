"""Per-stream power allocation.

Solves ``max sum_n w_n ln(1 + gamma_n lambda_n)`` subject to
``sum lambda_n = budget`` and ``lambda_n >= 0``. The optimum is
``lambda_n = max(w_n / v - 1 / gamma_n, 0)``: every stream sees its own water
level ``w_n / v``. The multiplier ``v`` is found by bisection and then
refined in closed form on the active set.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgument, NoUsableStreams

BUDGET_TOL = 1e-10
MAX_ITER = 200


@dataclass(frozen=True)
class AllocationResult:
    lam: np.ndarray
    water_level_multiplier: float
    weights_expanded: np.ndarray
    budget: float
    iterations: int = 0

    @property
    def total(self) -> float:
        return float(self.lam.sum())


def stream_gains(singular_values, snr: float, users: int, streams_per_user: int) -> np.ndarray:
    """``gamma_n = snr / (K N_S) * sigma_n**2`` for singular values in user order."""
    s = np.asarray(singular_values, dtype=float).reshape(-1)
    return snr / (users * streams_per_user) * s**2


def expand_weights(weights, n_streams: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size == 0 or n_streams % w.size:
        raise InvalidArgument(
            f"{n_streams} streams cannot be split evenly over {w.size} users"
        )
    if not np.all(w > 0):
        raise InvalidArgument("weights must be positive")
    return np.repeat(w, n_streams // w.size)


def proportional_waterfill(gamma, weights, budget: float | None = None,
                           tol: float = BUDGET_TOL, max_iter: int = MAX_ITER
                           ) -> AllocationResult:
    """Weighted-sum-rate power loads.

    Parameters
    ----------
    gamma : array_like
        Stream gains in user order, ``K * N_S`` nonnegative entries.
    weights : array_like
        One positive weight per user; expanded over that user's streams.
    budget : float, optional
        Total load, defaults to the number of streams.

    Raises
    ------
    NoUsableStreams
        If every gain is zero.
    """
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if np.any(gamma < 0) or not np.all(np.isfinite(gamma)):
        raise InvalidArgument("stream gains must be finite and nonnegative")
    wexp = expand_weights(weights, gamma.size)
    if budget is None:
        budget = float(gamma.size)
    if not budget > 0:
        raise InvalidArgument("budget must be positive")

    usable = gamma > 0
    if not usable.any():
        raise NoUsableStreams("all stream gains are zero")

    v, iterations = kernels.waterfill_level(
        gamma[usable], wexp[usable], float(budget), tol, max_iter
    )
    lam = np.zeros_like(gamma)
    lam[usable] = np.maximum(wexp[usable] / v - 1.0 / gamma[usable], 0.0)
    return AllocationResult(lam, float(v), wexp, float(budget), int(iterations))


def waterfill(gamma, budget: float | None = None, **kwargs) -> AllocationResult:
    """Classic sum-rate water-filling (all weights one)."""
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    return proportional_waterfill(gamma, np.ones(gamma.size), budget, **kwargs)


def equal_allocation(n_streams: int) -> AllocationResult:
    ones = np.ones(n_streams)
    return AllocationResult(ones, float("nan"), ones, float(n_streams))


def kkt_residual(result: AllocationResult, gamma) -> float:
    """Aggregate violation of the KKT conditions; zero iff optimal."""
    lam = np.asarray(result.lam, dtype=float)
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if lam.shape != gamma.shape:
        raise InvalidArgument("allocation and gains differ in length")
    v = result.water_level_multiplier
    marginal = result.weights_expanded * gamma / (1.0 + gamma * lam)
    slack = np.max(np.abs(lam * (v - marginal)))
    budget = abs(lam.sum() - result.budget)
    primal = np.sum(np.maximum(0.0, -lam))
    # m_n = v - marginal_n must be >= 0 where lambda_n = 0
    dual = np.sum(np.maximum(0.0, marginal - v)[lam <= 0])
    return float(slack + budget + primal + dual)
