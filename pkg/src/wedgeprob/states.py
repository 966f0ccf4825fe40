"""Density matrices, marginals, purification and the map ``v -> rho_v``.

Given a faithful state ``omega`` on ``C^n`` with purification ``xi`` in
``C^n (x) C^n``, every isometry tuple ``v`` defines the state

    rho_v = sum_k zeta_k zeta_k^*,    zeta_k = (v_k (x) 1) xi,

on ``C^m (x) C^n`` whose marginal on the second factor is ``omega``. Two tuples
give the same state exactly when they differ by a scalar unitary ``lam in U(r)``
acting as ``v'_i = sum_j lam_ij v_j``; conversely every extension of ``omega``
of rank at most r arises this way (:func:`tuple_from_state`).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .sampling import IsometryTuple
from .tensor import DEFAULT_REL_TOL, as_matrix, numerical_rank, partial_trace

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
FAITHFUL_TOL = 1e-12
DEGENERACY_GAP = 1e-10
PHASE_TOL = 1e-12
MARGINAL_TOL = 1e-8
ROUNDOFF_REL = 1e-13


def _canonical_phase(vec):
    nz = np.flatnonzero(np.abs(vec) > PHASE_TOL)
    if nz.size == 0:
        return vec
    z = vec[nz[0]]
    return vec * (abs(z) / z)


def canonical_eigh(a):
    """Eigendecomposition with a deterministic choice of eigenvectors.

    Eigenvalues come back in descending order. Inside each numerically degenerate
    cluster the eigenvectors are replaced by Gram-Schmidt applied to the
    cluster projector's columns, so the result does not depend on how LAPACK
    happened to rotate the eigenspace; each vector is then phased so that its
    first non-negligible entry is real positive.
    """
    w, u = np.linalg.eigh(a)
    order = np.argsort(w)[::-1]
    w = w[order]
    u = u[:, order]
    out = np.empty_like(u)
    start = 0
    d = len(w)
    while start < d:
        stop = start + 1
        while stop < d and w[stop - 1] - w[stop] < DEGENERACY_GAP:
            stop += 1
        block = u[:, start:stop]
        if stop - start == 1:
            out[:, start] = _canonical_phase(block[:, 0])
        else:
            proj = block @ block.conj().T
            basis = []
            for col in proj.T:
                x = col.copy()
                for b in basis:
                    x -= np.vdot(b, x) * b
                nrm = np.linalg.norm(x)
                if nrm > 1e-6:
                    basis.append(x / nrm)
                if len(basis) == stop - start:
                    break
            for k, b in enumerate(basis):
                out[:, start + k] = _canonical_phase(b)
        start = stop
    return w, out


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix with cached eigendata."""

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, a, check=True):
        a = as_matrix(a)
        if a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValidationError(f"density matrix must be square and non-empty, got {a.shape}")
        if check:
            herm = np.max(np.abs(a - a.conj().T))
            if herm > HERMITIAN_TOL:
                raise ValidationError(f"matrix is not Hermitian (deviation {herm:.3e})")
            tr = np.trace(a).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValidationError(f"trace is {tr:.12g}, expected 1")
        a = 0.5 * (a + a.conj().T)
        w, u = canonical_eigh(a)
        if check and w[-1] < -PSD_TOL:
            raise ValidationError(f"matrix has negative eigenvalue {w[-1]:.3e}")
        a.setflags(write=False)
        return cls(a, w, u)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def rank(self, rel_tol=DEFAULT_REL_TOL):
        return numerical_rank(self.matrix, rel_tol)[0]

    def purity(self):
        return float(np.sum(self.eigenvalues**2))

    def expect(self, x):
        """``trace(rho x)``."""
        return complex(np.trace(self.matrix @ np.asarray(x)))


@dataclass(frozen=True)
class MarginalState:
    n: int
    density: DensityMatrix
    faithful: bool

    @classmethod
    def from_matrix(cls, a, check=True):
        dm = DensityMatrix.from_matrix(a, check=check)
        return cls(dm.dim, dm, bool(dm.eigenvalues[-1] > FAITHFUL_TOL))

    @classmethod
    def maximally_mixed(cls, n):
        return cls.from_matrix(np.eye(n) / n)

    @property
    def matrix(self):
        return self.density.matrix


@dataclass(frozen=True)
class Purification:
    """Unit vector ``xi = sum_i sqrt(lambda_i) e'_i (x) e_i`` in ``C^{r0} (x) C^n``.

    ``e_i`` are the canonical eigenvectors of omega with positive eigenvalues
    ``lambda_i`` (descending) and ``e'_i`` the standard basis of ``C^{r0}``.
    """

    r0: int
    n: int
    vector: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def faithful(self):
        return self.r0 == self.n

    @property
    def coefficients(self):
        """``xi`` reshaped to its ``r0 x n`` coefficient matrix."""
        return self.vector.reshape(self.r0, self.n)

    def inverse_coefficients(self):
        """Right inverse ``X^+`` of the coefficient matrix (``X X^+ = 1_{r0}``)."""
        return np.conj(self.eigenvectors) / np.sqrt(self.eigenvalues)[None, :]


def purify(omega):
    lam = omega.density.eigenvalues
    vecs = omega.density.eigenvectors
    keep = lam > FAITHFUL_TOL
    lam = lam[keep]
    vecs = vecs[:, keep]
    r0 = len(lam)
    n = omega.n
    coeff = np.sqrt(lam)[:, None] * vecs.T
    vec = coeff.reshape(r0 * n)
    vec.setflags(write=False)
    return Purification(r0, n, vec, lam, vecs)


def _tuple_vectors(components, xi):
    # zeta_k as m x n matrices: (v_k (x) 1) xi  <->  v_k X
    return components @ xi.coefficients


def state_from_tuple(v, xi):
    """Density matrix of ``rho_v`` on ``C^m (x) C^n``."""
    if not xi.faithful:
        raise ValidationError("state_from_tuple requires a faithful purification (r0 == n)")
    if v.n != xi.n:
        raise ValidationError(f"tuple acts on C^{v.n} but purification has n={xi.n}")
    zetas = _tuple_vectors(v.components, xi).reshape(v.r, v.m * v.n)
    rho = zetas.T @ zetas.conj()
    return DensityMatrix.from_matrix(rho, check=False)


def operator_from_vector(zeta, xi, m=None):
    """The unique ``v: C^{r0} -> C^m`` with ``(v (x) 1) xi = zeta``.

    ``zeta`` must lie in ``C^m (x) supp(omega)``; for a faithful purification
    this is every vector.
    """
    zeta = np.asarray(zeta, dtype=np.complex128).reshape(-1)
    if m is None:
        if zeta.size % xi.n:
            raise ValidationError(f"vector length {zeta.size} is not a multiple of n={xi.n}")
        m = zeta.size // xi.n
    if zeta.size != m * xi.n:
        raise ValidationError(f"vector length {zeta.size} != m*n = {m * xi.n}")
    return zeta.reshape(m, xi.n) @ xi.inverse_coefficients()


def vector_from_operator(v, xi):
    return (np.asarray(v) @ xi.coefficients).reshape(-1)


def tuple_from_state(rho, r, xi, m=None, tol=MARGINAL_TOL):
    """Invert ``v -> rho_v``: a tuple of length r whose state is ``rho``.

    ``rho`` is split as ``sum_k zeta_k zeta_k^*`` with ``zeta_k`` the scaled
    eigenvectors (zero-padded to r terms), and each ``zeta_k`` is pulled back
    through :func:`operator_from_vector`.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix.from_matrix(rho)
    n = xi.n
    if m is None:
        if rho.dim % n:
            raise ValidationError(f"state dimension {rho.dim} is not a multiple of n={n}")
        m = rho.dim // n
    if rho.dim != m * n:
        raise ValidationError(f"state dimension {rho.dim} != m*n = {m * n}")
    omega_xi = xi.eigenvectors @ np.diag(xi.eigenvalues) @ xi.eigenvectors.conj().T
    marg = partial_trace(rho.matrix, m, n, "first")
    dev = np.max(np.abs(marg - omega_xi))
    if dev > tol:
        raise ValidationError(f"marginal of rho differs from omega by {dev:.3e}")
    lam = rho.eigenvalues
    if len(lam) > r and lam[r] > tol:
        raise ValidationError(f"rho has rank > r={r} (eigenvalue {lam[r]:.3e})")
    k = min(r, len(lam))
    # roundoff-level eigenvalues would otherwise leak in as sqrt(eps) components
    k = min(k, int(np.sum(lam > ROUNDOFF_REL * lam[0])))
    zetas = np.zeros((r, m * n), dtype=np.complex128)
    zetas[:k] = (np.sqrt(np.clip(lam[:k], 0.0, None))[:, None] * rho.eigenvectors[:, :k].T)
    comps = np.stack([operator_from_vector(z, xi, m) for z in zetas])
    return IsometryTuple(comps, atol=max(tol, 1e-10) * 10)


def decomposition_unitary(xis, etas, tol=1e-8, rel_tol=DEFAULT_REL_TOL):
    """Unitary ``lam`` with ``eta_i = sum_j lam_ij xi_j``.

    Requires ``sum xi_k xi_k^* == sum eta_k eta_k^*``. With ``A``, ``B`` the
    matrices whose columns are the xi's and eta's, ``A A^* = B B^*`` lets us
    define a partial isometry ``A^* z -> B^* z`` on the range of ``A^*``; any
    unitary extension ``w`` gives ``B = A w^*``.
    """
    a = np.column_stack([np.asarray(x, dtype=np.complex128).reshape(-1) for x in xis])
    b = np.column_stack([np.asarray(x, dtype=np.complex128).reshape(-1) for x in etas])
    if a.shape != b.shape:
        raise ValidationError(f"families have different shapes {a.shape} vs {b.shape}")
    gram_dev = np.max(np.abs(a @ a.conj().T - b @ b.conj().T))
    if gram_dev > tol:
        raise ValidationError(f"sum of rank-one projections differ by {gram_dev:.3e}")
    r = a.shape[1]
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    k, _ = numerical_rank(a, rel_tol)
    # initial space of w0 is range(A^*); orthonormal basis from A^* u_j / s_j
    init = (a.conj().T @ u[:, :k]) / s[:k]
    final = (b.conj().T @ u[:, :k]) / s[:k]
    w = np.zeros((r, r), dtype=np.complex128)
    w += final @ init.conj().T
    if k < r:
        w += _complement(final, r) @ _complement(init, r).conj().T
    lam = np.conj(w)
    return lam


def _complement(basis, d):
    """Orthonormal basis of the orthogonal complement of ``basis``'s columns."""
    k = basis.shape[1]
    if k == 0:
        return np.eye(d, dtype=np.complex128)
    q, _ = np.linalg.qr(np.hstack([basis, np.eye(d, dtype=np.complex128)]))
    return q[:, k:d]


def tuples_equivalent(v, w, tol=MARGINAL_TOL):
    """True iff ``w = lam . v`` for some scalar unitary ``lam in U(r)``."""
    if v.components.shape != w.components.shape:
        raise ValidationError(f"tuples have different shapes {v.shape} vs {w.shape}")
    xi = purify(MarginalState.maximally_mixed(v.n))
    a = state_from_tuple(v, xi).matrix
    b = state_from_tuple(w, xi).matrix
    return bool(np.max(np.abs(a - b)) <= tol)


def ucp_map(v, a):
    """Unital completely positive map ``a -> sum_k v_k^* a v_k`` (m x m -> n x n)."""
    a = np.asarray(a, dtype=np.complex128)
    return np.einsum("kai,ab,kbj->ij", np.conj(v.components), a, v.components)
