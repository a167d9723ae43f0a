"""Numeric hot loops: symmetric eigensolver and brute-force tour search.

Both kernels ship in two flavors: a numba @njit build (default when numba
imports cleanly) and a pure-numpy/python build. Set RTRMT_NUMBA=0 to force
the fallback, RTRMT_NUMBA=1 to require numba (ImportError if unavailable).
The benchmark in benchmarks/bench_kernels.py compares the two.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _jacobi_eigvals(a):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    a = a.copy()
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    for _sweep in range(100):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        if off <= 1e-28:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
    diag = np.zeros(n)
    for i in range(n):
        diag[i] = a[i, i]
    return np.sort(diag)


def _tour_search(cost, k):
    """k best open tours over a cost matrix (row/col 0 = depot, 1..n = tasks).

    Enumerates all n! visit orders in lexicographic order; ties on cost keep
    the lexicographically earlier order. Returns (orders, costs) with at most
    k rows, only finite-cost tours included.
    """
    n = cost.shape[0] - 1
    perm = np.arange(1, n + 1, dtype=np.int64)
    best_costs = np.full(k, np.inf)
    best_orders = np.zeros((k, n), dtype=np.int64)
    while True:
        tot = cost[0, perm[0]]
        for i in range(n - 1):
            tot += cost[perm[i], perm[i + 1]]
        if tot < best_costs[k - 1]:
            pos = k - 1
            while pos > 0 and tot < best_costs[pos - 1]:
                pos -= 1
            for j in range(k - 1, pos, -1):
                best_costs[j] = best_costs[j - 1]
                best_orders[j, :] = best_orders[j - 1, :]
            best_costs[pos] = tot
            best_orders[pos, :] = perm
        # advance to the next lexicographic permutation
        i = n - 2
        while i >= 0 and perm[i] >= perm[i + 1]:
            i -= 1
        if i < 0:
            break
        j = n - 1
        while perm[j] <= perm[i]:
            j -= 1
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
        lo = i + 1
        hi = n - 1
        while lo < hi:
            tmp = perm[lo]
            perm[lo] = perm[hi]
            perm[hi] = tmp
            lo += 1
            hi -= 1
    m = 0
    while m < k and np.isfinite(best_costs[m]):
        m += 1
    return best_orders[:m], best_costs[:m]


def _select_backend():
    flag = os.environ.get("RTRMT_NUMBA", "").strip()
    if flag == "0":
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        if flag == "1":
            raise
        return False
    return True


USING_NUMBA = _select_backend()

if USING_NUMBA:
    from numba import njit

    eigvalsh_small = njit(cache=True)(_jacobi_eigvals)
    tour_search = njit(cache=True)(_tour_search)
else:
    eigvalsh_small = _jacobi_eigvals
    tour_search = _tour_search
