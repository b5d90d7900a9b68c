"""Brute-force reference solutions for small instances.

These deliberately avoid the production code paths: the water-filling oracle
enumerates active sets instead of bisecting, and the combiner oracle scores
every subset of codebook columns.
"""
from __future__ import annotations

import itertools

import numpy as np


def waterfill_by_enumeration(gamma, wexp, budget: float) -> tuple[np.ndarray, float]:
    """KKT solution found by trying every active set of usable streams."""
    gamma = np.asarray(gamma, dtype=float)
    wexp = np.asarray(wexp, dtype=float)
    n = gamma.size
    usable = [i for i in range(n) if gamma[i] > 0]
    for size in range(len(usable), 0, -1):
        for active in itertools.combinations(usable, size):
            a = list(active)
            v = wexp[a].sum() / (budget + (1.0 / gamma[a]).sum())
            lam_a = wexp[a] / v - 1.0 / gamma[a]
            if np.any(lam_a < -1e-14):
                continue
            rest = [i for i in usable if i not in active]
            if rest and np.any(wexp[rest] * gamma[rest] > v * (1 + 1e-12)):
                continue
            lam = np.zeros(n)
            lam[a] = np.maximum(lam_a, 0.0)
            return lam, float(v)
    raise ValueError("no feasible active set")


def combiner_by_exhaustion(h_k: np.ndarray, m_ms: int) -> tuple[int, ...]:
    """Codebook subset maximizing ``sum_m ||d_m^H H_k||_1**2``, lowest indices on ties."""
    n = h_k.shape[0]
    idx = np.arange(n)
    best, best_val = None, -np.inf
    for subset in itertools.combinations(range(n), m_ms):
        total = 0.0
        for q in subset:
            d = np.exp(2j * np.pi * q * idx / n) / np.sqrt(n)
            total += np.sum(np.abs(d.conj() @ h_k)) ** 2
        if total > best_val * (1 + 1e-12) + 1e-300:
            best, best_val = subset, total
    return tuple(sorted(best))
