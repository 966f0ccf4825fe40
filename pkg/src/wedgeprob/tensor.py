"""Dense complex linear algebra on tensor products.

Index convention used throughout the package: a vector of ``K (x) H`` with
``dim K = m`` and ``dim H = n`` is stored flat with the K index slow, i.e.
entry ``(i, j)`` lives at position ``i * n + j``. This is the ordering produced
by :func:`numpy.kron` and by ``reshape(m, n)`` in C order.
"""

from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import comb, factorial, sqrt

import numpy as np

from .errors import NumericalError, ResourceGuardError, ValidationError

DEFAULT_REL_TOL = 1e-8
MAX_TENSOR_POWER = 8
MAX_ELEMENTS = 10**7


def as_matrix(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def kron(a, b):
    """Kronecker product with the first factor slow."""
    return np.kron(as_matrix(a), as_matrix(b))


def check_power_budget(d, r):
    if r > MAX_TENSOR_POWER:
        raise ResourceGuardError(f"tensor power r={r} exceeds guard {MAX_TENSOR_POWER}")
    if d**r > MAX_ELEMENTS:
        raise ResourceGuardError(f"d**r = {d}**{r} exceeds element budget {MAX_ELEMENTS}")


@lru_cache(maxsize=None)
def _heap_permutations(r):
    perms = []
    signs = []
    a = list(range(r))
    c = [0] * r
    sign = 1
    perms.append(tuple(a))
    signs.append(sign)
    i = 1
    while i < r:
        if c[i] < i:
            if i % 2 == 0:
                a[0], a[i] = a[i], a[0]
            else:
                a[c[i]], a[i] = a[i], a[c[i]]
            sign = -sign
            perms.append(tuple(a))
            signs.append(sign)
            c[i] += 1
            i = 1
        else:
            c[i] = 0
            i += 1
    return np.array(perms, dtype=np.int64).reshape(len(perms), r), np.array(signs, dtype=np.int64)


def permutations_with_sign(r):
    """All permutations of ``range(r)`` (Heap's order) and their signs.

    Each successive permutation differs from the previous one by a single
    transposition, so the signs alternate.
    """
    if r < 0:
        raise ValidationError("r must be non-negative")
    if r > MAX_TENSOR_POWER:
        raise ResourceGuardError(f"r={r} exceeds guard {MAX_TENSOR_POWER}")
    perms, signs = _heap_permutations(r)
    return perms.copy(), signs.copy()


def sym_multi_indices(d, r):
    return np.array(list(combinations_with_replacement(range(d), r)), dtype=np.int64).reshape(-1, r)


def antisym_multi_indices(d, r):
    return np.array(list(combinations(range(d), r)), dtype=np.int64).reshape(-1, r)


def _flat_index(multi, d):
    out = np.zeros(multi.shape[:-1], dtype=np.int64)
    for t in range(multi.shape[-1]):
        out = out * d + multi[..., t]
    return out


def sym_basis(d, r):
    """Orthonormal basis of the symmetric subspace of ``(C^d)^{(x) r}``.

    Columns are indexed by non-decreasing multi-indices in lexicographic order;
    each column is the normalized sum of ``e_{i_1} (x) ... (x) e_{i_r}`` over all
    distinct rearrangements of its multi-index.
    """
    if d < 1 or r < 1:
        raise ValidationError("sym_basis requires d >= 1 and r >= 1")
    check_power_budget(d, r)
    multis = sym_multi_indices(d, r)
    perms, _ = permutations_with_sign(r)
    out = np.zeros((d**r, len(multis)), dtype=np.complex128)
    for col, idx in enumerate(multis):
        rows = np.unique(_flat_index(idx[perms], d))
        out[rows, col] = 1.0 / sqrt(len(rows))
    return out


def antisym_basis(d, r):
    """Orthonormal basis of the antisymmetric subspace of ``(C^d)^{(x) r}``.

    Columns are indexed by strictly increasing multi-indices; the coefficient of
    the sorted product vector is positive. Empty (zero columns) when ``r > d``.
    """
    if d < 1 or r < 1:
        raise ValidationError("antisym_basis requires d >= 1 and r >= 1")
    check_power_budget(d, r)
    multis = antisym_multi_indices(d, r)
    out = np.zeros((d**r, len(multis)), dtype=np.complex128)
    if len(multis) == 0:
        return out
    perms, signs = permutations_with_sign(r)
    norm = 1.0 / sqrt(factorial(r))
    for col, idx in enumerate(multis):
        out[_flat_index(idx[perms], d), col] = signs * norm
    return out


def numerical_rank(a, rel_tol=DEFAULT_REL_TOL):
    """Rank as the count of singular values above ``rel_tol * sigma_max``.

    Returns ``(rank, singular_values)`` with singular values in descending order.
    """
    if rel_tol < 0:
        raise ValidationError("rel_tol must be non-negative")
    a = as_matrix(a)
    if a.size == 0:
        return 0, np.zeros(0)
    try:
        s = np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    if s[0] == 0.0:
        return 0, s
    return int(np.count_nonzero(s > rel_tol * s[0])), s


def _check_bipartite(a, m, n):
    a = as_matrix(a)
    if a.shape != (m * n, m * n):
        raise ValidationError(f"expected a {(m * n, m * n)} matrix for dims ({m}, {n}), got {a.shape}")
    return a


def partial_trace(a, m, n, which="first"):
    """Trace out one factor of an operator on ``C^m (x) C^n``.

    ``which="first"`` traces over the m-dimensional factor and returns the n x n
    marginal; ``which="second"`` traces over the n-dimensional one.
    """
    t = _check_bipartite(a, m, n).reshape(m, n, m, n)
    if which == "first":
        return np.einsum("ijik->jk", t)
    if which == "second":
        return np.einsum("ijkj->ik", t)
    raise ValidationError(f"which must be 'first' or 'second', got {which!r}")


def partial_transpose(a, m, n):
    """Transpose the indices of the second (n-dimensional) factor."""
    t = _check_bipartite(a, m, n).reshape(m, n, m, n)
    return t.transpose(0, 3, 2, 1).reshape(m * n, m * n)


def sym_dim(d, r):
    return comb(d + r - 1, r)


def antisym_dim(d, r):
    return comb(d, r)
