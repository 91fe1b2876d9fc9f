"""Compiled inner loop of the sequence signature kernel."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def levels_batched(K, M, out):
    """Level-wise kernel values for a stack of increment Gram matrices.

    ``K`` has shape ``(a, b, pairs)`` with the pair axis innermost so every
    update vectorises across pairs; ``out`` has shape ``(pairs, M + 1)``.

    A single sweep over rows keeps ``colsum[m, j, p]``, the sum of
    ``A_m[i', j']`` over visited rows ``i'`` and columns ``j' < j``, where
    ``A_1 = K`` and ``A_m[i, j] = K[i, j] * colsum[m - 1, j]``.
    """
    n_rows, n_cols, P = K.shape
    colsum = np.zeros((M + 1, n_cols + 1, P))
    run = np.zeros((M + 1, P))
    old = np.zeros((M + 1, P))
    total = np.zeros((M + 1, P))
    comp = np.zeros((M + 1, P))
    for i in range(n_rows):
        run[:] = 0.0
        old[:] = 0.0
        for j in range(n_cols):
            kj = K[i, j]
            for m in range(M, 1, -1):
                r = run[m]
                o = old[m - 1]
                for p in range(P):
                    r[p] += kj[p] * o[p]
            r = run[1]
            for p in range(P):
                r[p] += kj[p]
            for m in range(1, M + 1):
                o = old[m]
                c = colsum[m, j + 1]
                r = run[m]
                for p in range(P):
                    o[p] = c[p]
                    c[p] += r[p]
        # Row totals enter the level sums with Kahan compensation.
        for m in range(1, M + 1):
            for p in range(P):
                yk = run[m, p] - comp[m, p]
                tk = total[m, p] + yk
                comp[m, p] = (tk - total[m, p]) - yk
                total[m, p] = tk
    for p in range(P):
        out[p, 0] = 1.0
        for m in range(1, M + 1):
            out[p, m] = total[m, p]


@njit(cache=True, nogil=True)
def gather_pairs(G, second_difference, nx, ny, j_start):
    """Pack increment Gram matrices of the requested pairs, pair axis last.

    ``G`` has shape ``(rows, n, cols, k)`` holding state-kernel values when
    ``second_difference`` is set, else ``(rows, n - 1, cols, k - 1)``
    increment inner products.  Entries past a path's own length are zero.
    """
    rows, n, cols, k = G.shape
    if second_difference:
        n -= 1
        k -= 1
    P = 0
    for a in range(rows):
        P += max(cols - j_start[a], 0)
    K = np.zeros((n, k, P))
    pair_row = np.empty(P, dtype=np.int64)
    pair_col = np.empty(P, dtype=np.int64)
    p = 0
    for a in range(rows):
        for b in range(j_start[a], cols):
            pair_row[p] = a
            pair_col[p] = b
            for i in range(nx[a] - 1):
                for j in range(ny[b] - 1):
                    if second_difference:
                        K[i, j, p] = (G[a, i + 1, b, j + 1] - G[a, i + 1, b, j]) - (
                            G[a, i, b, j + 1] - G[a, i, b, j]
                        )
                    else:
                        K[i, j, p] = G[a, i, b, j]
            p += 1
    return K, pair_row, pair_col
