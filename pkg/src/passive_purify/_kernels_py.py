"""Pure-Python fallback for the compiled kernels in ``_kernels.pyx``."""

from math import comb, exp, lgamma

import numpy as np


def permanent(a):
    """Ryser's formula, walking subsets in Gray-code order."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    rowsum = np.zeros(n, dtype=complex)
    total = 0j
    prev = 0
    size = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        diff = gray ^ prev
        j = diff.bit_length() - 1
        if gray & diff:
            rowsum += a[:, j]
            size += 1
        else:
            rowsum -= a[:, j]
            size -= 1
        prev = gray
        term = complex(np.prod(rowsum))
        total += -term if size & 1 else term
    return -total if n & 1 else total


def _log_fact(occ):
    return sum(lgamma(int(k) + 1) for k in occ)


def _glynn_multi(u, r, c):
    """Glynn's formula grouped by the number of minus signs per repeated column."""
    photons = int(c.sum())
    if photons == 0:
        return 1.0 + 0j
    t = np.indices(tuple(int(x) + 1 for x in c)).reshape(len(c), -1).T
    weight = np.prod([[(-1) ** tj * comb(int(cj), int(tj)) for tj, cj in zip(row, c)] for row in t], axis=1)
    rowsums = (c[None, :] - 2 * t) @ u.T
    prods = np.prod(rowsums ** r[None, :], axis=1)
    return complex((weight * prods).sum()) / 2.0 ** photons


def sym_power_matrix(u, rows, cols):
    u = np.asarray(u, dtype=complex)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    out = np.zeros((len(rows), len(cols)), dtype=complex)
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            if np.prod(c + 1.0) <= np.prod(r + 1.0):
                val = _glynn_multi(u, r, c)
            else:
                val = _glynn_multi(u.T, c, r)
            out[i, j] = val * exp(-0.5 * (_log_fact(r) + _log_fact(c)))
    return out
