# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_kernels_py``)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def waterfill_level(gamma, wexp, double budget, double tol, int max_iter):
    cdef const double[::1] g = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(wexp, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0], i
    cdef double[::1] inv_g = np.empty(n)
    cdef double[::1] wg = np.empty(n)
    cdef double lo = 0.0, hi = 0.0, v, s, x, num, den, polished
    cdef int it = 0
    for i in range(n):
        inv_g[i] = 1.0 / g[i]
        wg[i] = w[i] * g[i]
        if i == 0 or wg[i] > hi:
            hi = wg[i]
    hi = hi * (1.0 + budget)
    v = hi
    while it < max_iter:
        it += 1
        v = 0.5 * (lo + hi)
        s = 0.0
        for i in range(n):
            x = w[i] / v - inv_g[i]
            if x > 0.0:
                s += x
        if fabs(s - budget) <= tol:
            break
        if s > budget:
            lo = v
        else:
            hi = v
    num = 0.0
    den = budget
    for i in range(n):
        if wg[i] > v:
            num += w[i]
            den += inv_g[i]
    if num > 0.0:
        polished = num / den
        for i in range(n):
            if (wg[i] > v) != (wg[i] > polished):
                return v, it
        return polished, it
    return v, it


def l1_scores(codebook, h):
    cdef const double complex[:, ::1] d = np.ascontiguousarray(codebook, dtype=np.complex128)
    cdef const double complex[:, ::1] hm = np.ascontiguousarray(h, dtype=np.complex128)
    cdef Py_ssize_t m_dim = d.shape[0], q_dim = d.shape[1], n_dim = hm.shape[1]
    cdef Py_ssize_t q, m, n
    cdef double complex dc
    cdef double[::1] out = np.zeros(q_dim)
    cdef double complex[::1] row = np.empty(n_dim, dtype=np.complex128)
    for q in range(q_dim):
        for n in range(n_dim):
            row[n] = 0
        for m in range(m_dim):
            dc = d[m, q].conjugate()
            for n in range(n_dim):
                row[n] = row[n] + dc * hm[m, n]
        for n in range(n_dim):
            out[q] += sqrt(row[n].real * row[n].real + row[n].imag * row[n].imag)
    return np.asarray(out)
