"""Kernels for the alternating average compressed to symmetric/antisymmetric bases.

For operators ``A_1, ..., A_r`` (each p x q), an antisymmetric basis vector
``a_I`` of ``(C^p)^{(x) r}`` and a symmetric basis vector ``s_J`` of
``(C^q)^{(x) r}``, the matrix entry of ``A_1 ^ ... ^ A_r`` is

    <a_I, (A_1 ^ ... ^ A_r) s_J> = scale_J * sum_rho det[A_u[I_s, J_rho(u)]]_{u,s}

where rho runs over all permutations of ``range(r)`` and
``scale_J = 1 / (r! * sqrt(prod mult_J!))`` folds in the 1/r! normalization,
the norm of ``s_J`` and the repeats among the rearrangements of J. Both
implementations below evaluate that sum; the dense Kronecker route in
:mod:`wedgeprob.wedge` is the independent check.
"""

from math import factorial, sqrt

import numpy as np

from ._accel import USE_NUMBA, njit

_CHUNK_ELEMENTS = 1 << 22


def column_scales(cols, r):
    out = np.empty(len(cols))
    for b, idx in enumerate(cols):
        _, counts = np.unique(idx, return_counts=True)
        mult = 1
        for c in counts:
            mult *= factorial(int(c))
        out[b] = 1.0 / (factorial(r) * sqrt(mult))
    return out


@njit(cache=True)
def _det_inplace(a):
    n = a.shape[0]
    det = 1.0 + 0.0j
    for k in range(n):
        piv = k
        best = abs(a[k, k])
        for i in range(k + 1, n):
            if abs(a[i, k]) > best:
                best = abs(a[i, k])
                piv = i
        if best == 0.0:
            return 0.0 + 0.0j
        if piv != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[piv, j]
                a[piv, j] = tmp
            det = -det
        d = a[k, k]
        det *= d
        for i in range(k + 1, n):
            f = a[i, k] / d
            for j in range(k + 1, n):
                a[i, j] -= f * a[k, j]
    return det


@njit(cache=True)
def compressed_wedge_numba(ops, rows, cols, perms, scale):
    r = ops.shape[0]
    n_rows = rows.shape[0]
    n_cols = cols.shape[0]
    n_perm = perms.shape[0]
    out = np.zeros((n_rows, n_cols), dtype=np.complex128)
    work = np.empty((r, r), dtype=np.complex128)
    for a in range(n_rows):
        for b in range(n_cols):
            acc = 0.0 + 0.0j
            for p in range(n_perm):
                for u in range(r):
                    j = cols[b, perms[p, u]]
                    for s in range(r):
                        work[u, s] = ops[u, rows[a, s], j]
                acc += _det_inplace(work)
            out[a, b] = acc * scale[b]
    return out


def compressed_wedge_numpy(ops, rows, cols, perms, scale):
    r = ops.shape[0]
    n_rows, n_cols, n_perm = rows.shape[0], cols.shape[0], perms.shape[0]
    out = np.zeros((n_rows, n_cols), dtype=np.complex128)
    if n_rows == 0 or n_cols == 0:
        return out
    u = np.arange(r)[None, None, None, :, None]
    jdx = cols[:, perms][None, :, :, :, None]
    step = max(1, _CHUNK_ELEMENTS // max(1, n_cols * n_perm * r * r))
    for start in range(0, n_rows, step):
        idx = rows[start:start + step][:, None, None, None, :]
        blocks = ops[u, idx, jdx]
        out[start:start + step] = np.linalg.det(blocks).sum(axis=2)
    return out * scale[None, :]


def compressed_wedge(ops, rows, cols, perms, scale, use_numba=None):
    ops = np.ascontiguousarray(ops, dtype=np.complex128)
    if use_numba is None:
        use_numba = USE_NUMBA
    if rows.shape[0] == 0 or cols.shape[0] == 0:
        return np.zeros((rows.shape[0], cols.shape[0]), dtype=np.complex128)
    if use_numba:
        return compressed_wedge_numba(ops, rows, cols, perms, scale)
    return compressed_wedge_numpy(ops, rows, cols, perms, scale)
