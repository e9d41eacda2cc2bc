"""Compiled inner loops for group-algebra multiplication.

Coefficient vectors arrive as uint16 bit patterns; the transform path works
on int64 lifts of single GF(2) coordinates, where every intermediate is
bounded by 8^k and exact.
"""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True)
def conv_naive(a, b, log_t, exp_t, m):
    """Direct XOR convolution; field products via log/antilog tables.

    Returns (coefficients, number of field products performed).
    """
    n = a.shape[0]
    out = np.zeros(n, dtype=np.uint16)
    products = 0
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        la = log_t[ai]
        base = i
        for j in range(n):
            bj = b[j]
            if bj == 0:
                continue
            out[base ^ j] ^= exp_t[la + log_t[bj]]
            products += 1
    return out, products


@nb.njit(cache=True)
def wht_rows(mat, k):
    """In-place butterfly transform of every row of an int64 matrix."""
    rows = mat.shape[0]
    n = mat.shape[1]
    for r in range(rows):
        h = 1
        while h < n:
            for i in range(0, n, h * 2):
                for j in range(i, i + h):
                    u = mat[r, j]
                    v = mat[r, j + h]
                    mat[r, j] = u + v
                    mat[r, j + h] = u - v
            h *= 2


@nb.njit(cache=True)
def wht_lift_mul(xc, rx, yc, ry, ppow, k):
    """Transform-based XOR convolution over GF(2^d) by coordinate lifting.

    xc/yc hold the nonzero GF(2) coordinate rows of the two operands as 0/1
    int64 vectors; rx/ry are the coordinate indices of those rows.  For each
    row pair the 0/1 convolution is computed as WHT -> pointwise product ->
    WHT -> exact division by 2^k, its mod-2 reduction is scaled by the basis
    product X^(r+s) mod irr (table ppow) and XORed into the result.

    Returns (coefficients, integer-op count of the lifted pipeline).
    """
    n = 1 << k
    X = xc.copy()
    Y = yc.copy()
    wht_rows(X, k)
    wht_rows(Y, k)
    out = np.zeros(n, dtype=np.uint16)
    z = np.empty(n, dtype=np.int64)
    ops = (xc.shape[0] + yc.shape[0]) * k * n
    for i in range(xc.shape[0]):
        for j in range(yc.shape[0]):
            for t in range(n):
                z[t] = X[i, t] * Y[j, t]
            h = 1
            while h < n:
                for lo in range(0, n, h * 2):
                    for t in range(lo, lo + h):
                        u = z[t]
                        v = z[t + h]
                        z[t] = u + v
                        z[t + h] = u - v
                h *= 2
            p = ppow[rx[i] + ry[j]]
            for t in range(n):
                if (z[t] >> k) & 1:
                    out[t] ^= p
            ops += (k + 2) * n
    return out, ops
