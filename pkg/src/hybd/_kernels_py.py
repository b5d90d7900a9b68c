"""Pure-Python/numpy implementations of the hot kernels.

Mirrors ``_kernels.pyx`` operation for operation; used when the compiled
module is unavailable or ``HYBD_PURE_PYTHON`` is set.
"""
import numpy as np


def waterfill_level(gamma, wexp, budget, tol, max_iter):
    """Water-level multiplier ``v`` solving ``sum max(w/v - 1/g, 0) = budget``.

    All ``gamma`` must be positive. Returns ``(v, iterations)``.
    """
    gamma = np.asarray(gamma, dtype=float)
    wexp = np.asarray(wexp, dtype=float)
    n = gamma.shape[0]
    inv_g = 1.0 / gamma
    wg = wexp * gamma
    lo = 0.0
    hi = float(wg.max()) * (1.0 + budget)
    v = hi
    it = 0
    while it < max_iter:
        it += 1
        v = 0.5 * (lo + hi)
        g = 0.0
        for i in range(n):
            x = wexp[i] / v - inv_g[i]
            if x > 0.0:
                g += x
        if abs(g - budget) <= tol:
            break
        if g > budget:
            lo = v
        else:
            hi = v
    # closed-form level for the active set found by bisection
    num = 0.0
    den = budget
    for i in range(n):
        if wg[i] > v:
            num += wexp[i]
            den += inv_g[i]
    if num > 0.0:
        polished = num / den
        for i in range(n):
            if (wg[i] > v) != (wg[i] > polished):
                return v, it
        return polished, it
    return v, it


def l1_scores(codebook, h):
    """``score[q] = sum_n |codebook[:, q]^H h[:, n]|``."""
    return np.abs(np.asarray(codebook).conj().T @ np.asarray(h)).sum(axis=1)
