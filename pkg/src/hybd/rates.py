"""Spectral efficiency of a given design.

``sum_rate_general`` evaluates the full interference-plus-noise expression;
``sum_rate_bd_closed_form`` is its simplification once inter-user
interference is nulled and the combiners are orthonormal. Noise power is
fixed to one, so ``snr`` is the linear transmit power.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bd import BdDecomposition, HybridDesign
from .channels import MultiUserChannel
from .errors import ConditioningWarning, InvalidArgument
from .power import AllocationResult, proportional_waterfill, waterfill

RIDGE = 1e-12


@dataclass(frozen=True)
class RateReport:
    per_user_rate: np.ndarray
    scheme_label: str
    snr_db: float
    regularized: bool = field(default=False, compare=False)

    @property
    def sum_rate(self) -> float:
        return float(np.sum(self.per_user_rate))

    def __eq__(self, other):
        if not isinstance(other, RateReport):
            return NotImplemented
        return (self.scheme_label == other.scheme_label
                and self.snr_db == other.snr_db
                and np.array_equal(self.per_user_rate, other.per_user_rate))


def db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def linear_to_db(snr: float) -> float:
    return 10.0 * np.log10(snr) if snr > 0 else -np.inf


def _log2det_hpd(a: np.ndarray) -> float:
    _, logdet = np.linalg.slogdet(a)
    return float(logdet / np.log(2.0))


def sum_rate_general(channel: MultiUserChannel | np.ndarray, design: HybridDesign,
                     snr: float, label: str | None = None) -> RateReport:
    """Per-user ``log2 det(I + R_k^{-1} S_k)`` with interference and noise in ``R_k``."""
    if snr < 0:
        raise InvalidArgument("snr must be nonnegative")
    eff = design.effective_channels(channel)
    k_users = design.users
    n_s = design.streams_per_user
    p = snr / (k_users * n_s)
    rates = np.zeros(k_users)
    regularized = False
    for k in range(k_users):
        m_k = design.baseband_combiners[k]
        hm = m_k.conj().T @ eff[k]
        # all users' streams as seen through user k's combiners
        g = hm @ design.baseband_precoder
        sig = g[:, k * n_s:(k + 1) * n_s]
        signal = p * sig @ sig.conj().T
        interf = g.copy()
        interf[:, k * n_s:(k + 1) * n_s] = 0.0
        w = design.combiner_matrix(k)
        noise_dir = m_k if w is None else w @ m_k
        r = p * interf @ interf.conj().T + noise_dir.conj().T @ noise_dir
        r = 0.5 * (r + r.conj().T)
        if np.linalg.cond(r) > 1e12:
            r = r + RIDGE * np.trace(r).real / n_s * np.eye(n_s)
            regularized = True
            warnings.warn(f"user {k}: ill-conditioned interference-plus-noise covariance",
                          ConditioningWarning, stacklevel=2)
        rates[k] = max(0.0, _log2det_hpd(np.eye(n_s) + np.linalg.solve(r, signal)))
    return RateReport(rates, label or design.scheme, linear_to_db(snr), regularized)


def sum_rate_bd_closed_form(decomp: BdDecomposition, allocation: AllocationResult,
                            snr: float, streams_per_user: int, power_scale: float = 1.0,
                            label: str = "closed_form") -> RateReport:
    """``sum_k sum_i log2(1 + snr/(K N_S) * lambda_ki * (c * sigma_ki)**2)``.

    ``power_scale`` is the global factor ``c`` applied to the baseband
    precoder when the total-power constraint was enforced.
    """
    n_s = streams_per_user
    s = decomp.retained_singular_values(n_s).reshape(decomp.users, n_s)
    lam = np.asarray(allocation.lam, dtype=float).reshape(decomp.users, n_s)
    p = snr / (decomp.users * n_s)
    rates = np.log1p(p * lam * (power_scale * s) ** 2).sum(axis=1) / np.log(2.0)
    return RateReport(rates, label, linear_to_db(snr))


def approx_rate_single_path(alphas, n_bs: int, n_ms: int, snr: float,
                            weights=None) -> RateReport:
    """Large-array approximation for single-path ULA channels.

    The equivalent channel becomes ``sqrt(N_BS N_MS) diag(|alpha_k|)`` and
    only water-filling remains.
    """
    alphas = np.asarray(alphas, dtype=complex).reshape(-1)
    k_users = alphas.size
    if k_users < 1:
        raise InvalidArgument("need at least one user")
    gamma = snr / k_users * n_bs * n_ms * np.abs(alphas) ** 2
    if weights is None:
        alloc = waterfill(gamma, budget=float(k_users))
    else:
        alloc = proportional_waterfill(gamma, weights, budget=float(k_users))
    rates = np.log1p(alloc.lam * gamma) / np.log(2.0)
    return RateReport(rates, "single_path_analytic", linear_to_db(snr))
