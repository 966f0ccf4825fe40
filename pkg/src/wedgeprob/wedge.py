"""The alternating average ``v_1 ^ ... ^ v_r`` and the wedge invariant (w, w*).

``v_1 ^ ... ^ v_r = (1/r!) sum_pi sgn(pi) v_pi(1) (x) ... (x) v_pi(r)`` maps the
symmetric subspace of the source tensor power into the antisymmetric subspace
of the target. The invariant ``w`` is the rank of that restriction for the
tuple itself and ``w*`` the rank for the tuple of adjoints. Both are unchanged
by the scalar ``U(r)`` action (the operator is multiplied by ``det lam``) and
by the right ``U(n)`` action, and a separable ``rho_v`` forces ``w, w* <= 1``.
"""

from dataclasses import dataclass, field
from functools import reduce
from math import factorial

import numpy as np

from ._kernels import column_scales, compressed_wedge
from .errors import ResourceGuardError, ValidationError
from .sampling import IsometryTuple
from .tensor import (
    DEFAULT_REL_TOL,
    MAX_TENSOR_POWER,
    antisym_basis,
    antisym_multi_indices,
    numerical_rank,
    permutations_with_sign,
    sym_basis,
    sym_multi_indices,
)

DENSE_MAX_SIDE = 4096
COMPRESSED_MAX_ELEMENTS = 10**7


def _as_ops(ops):
    ops = np.asarray(ops, dtype=np.complex128)
    if ops.ndim != 3 or ops.shape[0] < 1:
        raise ValidationError(f"expected r >= 1 matrices of a common shape, got array of shape {ops.shape}")
    if ops.shape[0] > MAX_TENSOR_POWER:
        raise ResourceGuardError(f"r={ops.shape[0]} exceeds guard {MAX_TENSOR_POWER}")
    return ops


def wedge_operator(ops):
    """Dense ``p^r x q^r`` alternating average of r matrices (each p x q)."""
    ops = _as_ops(ops)
    r, p, q = ops.shape
    if p**r > DENSE_MAX_SIDE or q**r > DENSE_MAX_SIDE:
        raise ResourceGuardError(f"dense wedge of shape {p**r} x {q**r} exceeds side limit {DENSE_MAX_SIDE}")
    perms, signs = permutations_with_sign(r)
    out = np.zeros((p**r, q**r), dtype=np.complex128)
    for perm, sign in zip(perms, signs):
        out += sign * reduce(np.kron, (ops[k] for k in perm))
    return out / factorial(r)


def wedge_restricted(ops, method="compressed", use_numba=None):
    """Matrix of the alternating average from the symmetric to the antisymmetric basis.

    Shape ``C(p, r) x C(q + r - 1, r)``; zero rows when ``r > p``. ``method``
    selects the basis-pair kernel ("compressed") or the dense Kronecker sum
    sandwiched between :func:`antisym_basis` and :func:`sym_basis` ("dense").
    """
    ops = _as_ops(ops)
    r, p, q = ops.shape
    if method == "dense":
        a = antisym_basis(p, r)
        if a.shape[1] == 0:
            return np.zeros((0, sym_basis(q, r).shape[1]), dtype=np.complex128)
        return a.conj().T @ wedge_operator(ops) @ sym_basis(q, r)
    if method != "compressed":
        raise ValidationError(f"unknown method {method!r}")
    rows = antisym_multi_indices(p, r)
    cols = sym_multi_indices(q, r)
    if len(rows) * len(cols) > COMPRESSED_MAX_ELEMENTS:
        raise ResourceGuardError(f"compressed wedge {len(rows)} x {len(cols)} exceeds budget")
    if len(rows) == 0:
        return np.zeros((0, len(cols)), dtype=np.complex128)
    perms, _ = permutations_with_sign(r)
    return compressed_wedge(ops, rows, cols, perms, column_scales(cols, r), use_numba=use_numba)


@dataclass(frozen=True)
class WedgeInvariant:
    w: int
    w_star: int
    sv_w: np.ndarray = field(repr=False)
    sv_w_star: np.ndarray = field(repr=False)
    rel_tol: float = DEFAULT_REL_TOL

    @staticmethod
    def _margin(sv):
        if len(sv) < 2 or sv[0] == 0.0:
            return 0.0
        return float(sv[1] / sv[0])

    @property
    def margin_w(self):
        """``sigma_2 / sigma_1`` of the forward wedge (0 when undefined)."""
        return self._margin(self.sv_w)

    @property
    def margin_w_star(self):
        return self._margin(self.sv_w_star)

    def to_dict(self):
        return {
            "w": self.w,
            "w_star": self.w_star,
            "sv_w": [float(s) for s in self.sv_w],
            "sv_w_star": [float(s) for s in self.sv_w_star],
            "margin_w": self.margin_w,
            "margin_w_star": self.margin_w_star,
            "rel_tol": self.rel_tol,
        }


def wedge_invariants(v, rel_tol=DEFAULT_REL_TOL, method="compressed", use_numba=None):
    comps = v.components if isinstance(v, IsometryTuple) else np.asarray(v, dtype=np.complex128)
    fwd = wedge_restricted(comps, method, use_numba)
    adj = wedge_restricted(np.conj(comps.transpose(0, 2, 1)), method, use_numba)
    w, sv_w = numerical_rank(fwd, rel_tol)
    w_star, sv_w_star = numerical_rank(adj, rel_tol)
    return WedgeInvariant(w, w_star, sv_w, sv_w_star, rel_tol)


def second_compound(g):
    """Matrix of all 2 x 2 minors of ``g`` (rows/cols indexed by pairs i < j)."""
    g = np.asarray(g, dtype=np.complex128)
    ri, rj = np.triu_indices(g.shape[0], 1)
    ci, cj = np.triu_indices(g.shape[1], 1)
    return (g[np.ix_(ri, ci)] * g[np.ix_(rj, cj)]) - (g[np.ix_(ri, cj)] * g[np.ix_(rj, ci)])


def rank_one_defect(g):
    """``||G ^ G||_F / ||G||_F^2``: zero exactly when ``rank G <= 1``.

    The entries of ``G ^ G`` are degree-2 polynomials in G, hence degree-2r
    polynomials in the tuple, so ``{defect == 0}`` is an algebraic subset.
    """
    g = np.asarray(g)
    scale = np.linalg.norm(g) ** 2
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(second_compound(g)) / scale)


def witness_tuple(n, m, r):
    """Explicit tuple of partial isometries with ``w* >= 2`` (needs ``2r <= n <= m``).

    The source basis is split as ``e_1..e_r, f_1..f_r, g_1..g_s`` (s = n - 2r) and
    the target uses the same labels. ``v_k`` sends ``e_k -> e'_1`` and
    ``f_k -> f'_1``; ``v_1`` additionally sends ``g_j -> g'_j``. Then
    ``v^* ^ ... `` carries ``e'_1^{(x) r}`` to ``e_1 ^ ... ^ e_r`` and
    ``f'_1^{(x) r}`` to ``f_1 ^ ... ^ f_r``, two orthogonal unit vectors.
    """
    if not (r >= 1 and 2 * r <= n <= m):
        raise ValidationError(f"witness_tuple needs 1 <= r and 2r <= n <= m, got n={n}, m={m}, r={r}")
    comps = np.zeros((r, m, n), dtype=np.complex128)
    for k in range(r):
        comps[k, 0, k] = 1.0
        comps[k, r, r + k] = 1.0
    for j in range(2 * r, n):
        comps[0, j, j] = 1.0
    return IsometryTuple(comps)
