# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled permanent and symmetric-power kernels.

Same call signatures as ``_kernels_py``; selected at import by
``passive_purify.interferometer`` when the extension is built.
"""

from math import comb

import numpy as np
from libc.math cimport sqrt, lgamma, exp


cdef double complex _ryser(double complex[:, ::1] a, Py_ssize_t n,
                           double complex[::1] rowsum) noexcept nogil:
    cdef long long k, gray, prev = 0, diff
    cdef long long nsub
    cdef Py_ssize_t i, j
    cdef int size = 0
    cdef double complex total = 0.0
    cdef double complex prod
    if n == 0:
        return 1.0
    nsub = (<long long> 1) << n
    for i in range(n):
        rowsum[i] = 0.0
    for k in range(1, nsub):
        gray = k ^ (k >> 1)
        diff = gray ^ prev
        j = 0
        while not (diff & 1):
            diff >>= 1
            j += 1
        if gray & ((<long long> 1) << j):
            for i in range(n):
                rowsum[i] = rowsum[i] + a[i, j]
            size += 1
        else:
            for i in range(n):
                rowsum[i] = rowsum[i] - a[i, j]
            size -= 1
        prev = gray
        prod = 1.0
        for i in range(n):
            prod = prod * rowsum[i]
        if size & 1:
            total = total - prod
        else:
            total = total + prod
    if n & 1:
        return -total
    return total


def permanent(a):
    cdef double complex[:, ::1] m = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = m.shape[0]
    cdef double complex[::1] buf = np.zeros(max(n, 1), dtype=np.complex128)
    return complex(_ryser(m, n, buf))


cdef double _log_fact_prod(const long long[::1] occ) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(occ.shape[0]):
        s += lgamma(occ[i] + 1.0)
    return s


cdef double complex _glynn_multi(double complex[:, ::1] u, const long long[::1] r,
                                 const long long[::1] c, double complex[::1] rowsum,
                                 long long[::1] t, double[:, ::1] binom) noexcept nogil:
    """Permanent of u with row multiplicities r and column multiplicities c.

    Glynn's formula grouped by the number t_j of minus signs on column j:
    2^-N sum_t prod_j (-1)^t_j C(c_j, t_j) prod_i (sum_j (c_j - 2 t_j) u_ij)^r_i.
    """
    cdef Py_ssize_t m = u.shape[0], i, j
    cdef long long photons = 0, p
    cdef double complex total = 0.0, prod
    cdef double weight
    for j in range(m):
        photons += c[j]
        t[j] = 0
    if photons == 0:
        return 1.0
    for i in range(m):
        rowsum[i] = 0.0
        for j in range(m):
            rowsum[i] = rowsum[i] + c[j] * u[i, j]
    while True:
        weight = 1.0
        for j in range(m):
            weight *= binom[c[j], t[j]]
            if t[j] & 1:
                weight = -weight
        prod = 1.0
        for i in range(m):
            for p in range(r[i]):
                prod = prod * rowsum[i]
        total = total + weight * prod
        # odometer step over t_j in [0, c_j]
        j = 0
        while j < m:
            if t[j] < c[j]:
                t[j] += 1
                for i in range(m):
                    rowsum[i] = rowsum[i] - 2.0 * u[i, j]
                break
            for i in range(m):
                rowsum[i] = rowsum[i] + 2.0 * t[j] * u[i, j]
            t[j] = 0
            j += 1
        if j == m:
            break
    return total * exp(-photons * 0.6931471805599453)


cdef double _box(const long long[::1] occ) noexcept nogil:
    cdef double s = 1.0
    cdef Py_ssize_t i
    for i in range(occ.shape[0]):
        s *= occ[i] + 1.0
    return s


def sym_power_matrix(u, rows, cols):
    """Matrix elements per(u[k', k]) / sqrt(prod k'! prod k!) over two occupation lists."""
    cdef double complex[:, ::1] um = np.ascontiguousarray(u, dtype=np.complex128)
    cdef double complex[:, ::1] ut = np.ascontiguousarray(np.asarray(u).T, dtype=np.complex128)
    cdef const long long[:, ::1] r = np.ascontiguousarray(rows, dtype=np.int64)
    cdef const long long[:, ::1] c = np.ascontiguousarray(cols, dtype=np.int64)
    cdef Py_ssize_t nr = r.shape[0], nc = c.shape[0], m = um.shape[0]
    cdef Py_ssize_t i, j, a, b
    cdef long long photons = 0
    if nr:
        photons = int(np.asarray(rows[0]).sum())
    binom_np = np.zeros((photons + 1, photons + 1))
    for a in range(photons + 1):
        for b in range(a + 1):
            binom_np[a, b] = float(comb(a, b))
    cdef double[:, ::1] binom = binom_np
    out_np = np.zeros((nr, nc), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_np
    cdef double complex[::1] buf = np.zeros(max(m, 1), dtype=np.complex128)
    cdef long long[::1] t = np.zeros(max(m, 1), dtype=np.int64)
    cdef double[::1] rlog = np.zeros(max(nr, 1))
    cdef double[::1] clog = np.zeros(max(nc, 1))
    cdef double complex val
    with nogil:
        for i in range(nr):
            rlog[i] = _log_fact_prod(r[i])
        for j in range(nc):
            clog[j] = _log_fact_prod(c[j])
        for i in range(nr):
            for j in range(nc):
                # enumerate the side with fewer multiplicity patterns
                if _box(c[j]) <= _box(r[i]):
                    val = _glynn_multi(um, r[i], c[j], buf, t, binom)
                else:
                    val = _glynn_multi(ut, c[j], r[i], buf, t, binom)
                out[i, j] = val * exp(-0.5 * (rlog[i] + clog[j]))
    return out_np
