"""Tuples ``v = (v_1, ..., v_r)`` of m x n matrices with ``sum_k v_k^* v_k = 1``.

Stacking the components vertically gives an isometry ``C^n -> C^{rm}``; the set
of such tuples is a homogeneous space for the unitary group ``U(rm)`` acting on
the left, and it carries a unique left-invariant probability law. We realize
that law by taking the polar factor of a complex Ginibre matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .tensor import DEFAULT_REL_TOL, numerical_rank

ISOMETRY_TOL = 1e-10
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class SeededRng:
    """Deterministic stream ``stream_id`` derived from ``master_seed``."""

    master_seed: int
    stream_id: int = 0

    def generator(self):
        seq = np.random.SeedSequence(entropy=int(self.master_seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(seq))


def _as_generator(rng):
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


class IsometryTuple:
    """An r-tuple of m x n complex matrices satisfying ``sum v_k^* v_k = 1_n``.

    Stored as a single ``(r, m, n)`` complex array.
    """

    __slots__ = ("components",)

    def __init__(self, components, check=True, atol=ISOMETRY_TOL):
        comps = np.array(components, dtype=np.complex128)
        if comps.ndim != 3 or 0 in comps.shape:
            raise ValidationError(f"components must have shape (r, m, n) with all dims >= 1, got {comps.shape}")
        if not np.all(np.isfinite(comps)):
            raise ValidationError("components have non-finite entries")
        comps.setflags(write=False)
        self.components = comps
        if check:
            dev = self.isometry_defect()
            if dev > atol:
                raise ValidationError(f"sum v_k^* v_k deviates from identity by {dev:.3e} > {atol:.1e}")

    @property
    def r(self):
        return self.components.shape[0]

    @property
    def m(self):
        return self.components.shape[1]

    @property
    def n(self):
        return self.components.shape[2]

    @property
    def shape(self):
        return self.n, self.m, self.r

    def __len__(self):
        return self.r

    def __getitem__(self, k):
        return self.components[k]

    def __iter__(self):
        return iter(self.components)

    def __repr__(self):
        return f"IsometryTuple(n={self.n}, m={self.m}, r={self.r})"

    def stacked(self):
        """The isometry ``C^n -> C^{rm}`` (component k occupies rows k*m .. k*m+m-1)."""
        return self.components.reshape(self.r * self.m, self.n)

    @classmethod
    def from_stacked(cls, q, r, check=True):
        q = np.asarray(q, dtype=np.complex128)
        if q.shape[0] % r:
            raise ValidationError(f"{q.shape[0]} rows do not split into {r} blocks")
        return cls(q.reshape(r, q.shape[0] // r, q.shape[1]), check=check)

    def adjoints(self):
        return np.conj(self.components.transpose(0, 2, 1))

    def isometry_defect(self):
        q = self.stacked()
        return float(np.max(np.abs(q.conj().T @ q - np.eye(self.n))))

    def inner(self, other):
        """Real inner product ``Re sum_k trace(w_k^* v_k)`` on tuples."""
        return float(np.real(np.vdot(other.components, self.components)))


def random_unitary(d, rng):
    """Haar-distributed d x d unitary (Ginibre, QR, phases of diag(R) removed)."""
    if d < 1:
        raise ValidationError("d must be >= 1")
    gen = _as_generator(rng)
    z = (gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def ginibre(rows, cols, gen):
    return (gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))) / np.sqrt(2.0)


def polar_isometry(g):
    u, s, vh = np.linalg.svd(g, full_matrices=False)
    return u @ vh, s


def sample_haar_tuple(n, m, r, rng, max_attempts=3):
    """Draw a tuple from the unique ``U(rm)``-invariant law on isometry tuples."""
    if min(n, m, r) < 1:
        raise ValidationError("n, m, r must all be >= 1")
    if r * m < n:
        raise ValidationError(f"need r*m >= n, got r*m={r * m} < n={n}")
    gen = _as_generator(rng)
    for _ in range(max_attempts):
        g = ginibre(r * m, n, gen)
        q, s = polar_isometry(g)
        if s[-1] > 1e-12 * s[0]:
            return IsometryTuple(q.reshape(r, m, n))
    raise NumericalError(f"Ginibre draw numerically singular in {max_attempts} attempts")


def _check_unitary(w, name):
    w = np.asarray(w, dtype=np.complex128)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {w.shape}")
    dev = np.max(np.abs(w.conj().T @ w - np.eye(w.shape[0]))) if w.size else 0.0
    if dev > UNITARY_TOL:
        raise ValidationError(f"{name} is not unitary (deviation {dev:.3e})")
    return w


def act_left(w, v):
    """Left action of ``U(rm)``: ``v'_i = sum_j w_ij v_j`` with m x m blocks ``w_ij``."""
    w = _check_unitary(w, "w")
    if w.shape[0] != v.r * v.m:
        raise ValidationError(f"w must be {v.r * v.m} x {v.r * v.m}, got {w.shape}")
    return IsometryTuple.from_stacked(w @ v.stacked(), v.r)


def act_scalar(lam, v):
    """Action of the scalar subgroup ``U(r)``: blocks ``lam_ij * 1_m``."""
    lam = _check_unitary(lam, "lam")
    if lam.shape[0] != v.r:
        raise ValidationError(f"lam must be {v.r} x {v.r}, got {lam.shape}")
    return IsometryTuple(np.einsum("ij,jab->iab", lam, v.components))


def act_right(u, v):
    """Right action of ``U(n)``: ``(v_1 u, ..., v_r u)``."""
    u = _check_unitary(u, "u")
    if u.shape[0] != v.n:
        raise ValidationError(f"u must be {v.n} x {v.n}, got {u.shape}")
    return IsometryTuple(v.components @ u)


def tuple_rank(v, rel_tol=DEFAULT_REL_TOL):
    """Dimension of ``span{v_1, ..., v_r}`` inside the m x n matrices."""
    return numerical_rank(v.components.reshape(v.r, v.m * v.n), rel_tol)[0]
