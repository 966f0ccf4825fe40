"""Sound one-sided separability and entanglement tests, plus certificates.

No complete decision procedure is attempted. Entanglement is certified by the
wedge invariant, by a negative partial transpose, or by a witness; separability
by the purity ball around the maximally mixed state, by PPT when ``mn <= 6``
(where PPT is known to be equivalent to separability), or by an explicit
product decomposition.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError
from .sampling import IsometryTuple, _as_generator, ginibre
from .states import DensityMatrix, purify, state_from_tuple
from .tensor import DEFAULT_REL_TOL, numerical_rank, partial_transpose
from .wedge import wedge_invariants

PPT_TOL = 1e-10
WITNESS_TOL = 1e-10
PPT_EXACT_MAX_DIM = 6
WEIGHT_SUM_TOL = 1e-10


class Status(str, enum.Enum):
    ENTANGLED = "CertifiedEntangled"
    SEPARABLE = "CertifiedSeparable"
    UNDECIDED = "Undecided"


class InconsistentVerdict(AssertionError):
    """An entanglement and a separability certificate fired on the same state."""


@dataclass(frozen=True)
class WedgeCertificate:
    invariant: str
    value: int
    margin: float


@dataclass(frozen=True)
class PPTResult:
    min_eigenvalue: float
    npt: bool
    exact_separable: bool


@dataclass(frozen=True)
class BallResult:
    purity: float
    bound: float
    separable: bool


@dataclass
class ProductDecomposition:
    """``rho = sum_k weight_k (xi_k xi_k^*) (x) (eta_k eta_k^*)`` with unit xi, eta."""

    weights: np.ndarray
    xis: np.ndarray
    etas: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.xis = np.asarray(self.xis, dtype=np.complex128)
        self.etas = np.asarray(self.etas, dtype=np.complex128)
        if np.any(self.weights < 0):
            raise ValidationError("weights must be non-negative")
        if not (len(self.weights) == len(self.xis) == len(self.etas)):
            raise ValidationError("weights, xis and etas must have equal length")

    @property
    def m(self):
        return self.xis.shape[1]

    @property
    def n(self):
        return self.etas.shape[1]

    def __len__(self):
        return len(self.weights)

    def density(self):
        prods = np.einsum("ka,kb->kab", self.xis, self.etas).reshape(len(self), -1)
        return np.einsum("k,ka,kb->ab", self.weights, prods, prods.conj())


@dataclass
class SeparabilityVerdict:
    status: Status
    reasons: list = field(default_factory=list)
    exact: bool = False
    wedge: object = None
    certificates: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "status": self.status.value,
            "tests": [{"name": name, "value": value} for name, value in self.reasons],
            "exact": self.exact,
        }
        if self.wedge is not None:
            out["wedge"] = self.wedge.to_dict()
        return out


def wedge_test(v, rel_tol=DEFAULT_REL_TOL, invariants=None):
    """Certificate of entanglement when ``w > 1`` or ``w* > 1``, else None."""
    inv = invariants if invariants is not None else wedge_invariants(v, rel_tol)
    if inv.w_star > 1:
        return WedgeCertificate("w_star", inv.w_star, inv.margin_w_star)
    if inv.w > 1:
        return WedgeCertificate("w", inv.w, inv.margin_w)
    return None


def _density(rho):
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)


def ppt_test(rho, m, n):
    pt = partial_transpose(_density(rho), m, n)
    lo = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
    npt = lo < -PPT_TOL
    return PPTResult(lo, npt, (not npt) and m * n <= PPT_EXACT_MAX_DIM)


def ball_test(rho, m, n):
    """Purity ball: ``trace rho^2 <= 1/(mn - 1)`` implies separability."""
    a = _density(rho)
    purity = float(np.real(np.vdot(a, a)))
    d = m * n
    if d < 2:
        return BallResult(purity, 1.0, True)
    bound = 1.0 / (d - 1)
    return BallResult(purity, bound, purity <= bound)


def separable_sample(omega, r, m, rng, max_attempts=5, min_eig=1e-6):
    """Random tuple with rank-one components, so that ``rho_v`` is separable.

    Draws ``a_k = x_k y_k^*`` from Ginibre vectors, normalizes by
    ``T = sum a_k^* a_k`` as ``v_k = a_k T^{-1/2}`` (still rank one) and returns
    the tuple together with the explicit product decomposition of ``rho_v``.
    """
    n = omega.n
    if not omega.faithful:
        raise ValidationError("separable_sample requires a faithful omega")
    if r < n:
        raise ValidationError(f"need r >= n for an invertible normalizer, got r={r}, n={n}")
    gen = _as_generator(rng)
    for _ in range(max_attempts):
        x = ginibre(r, m, gen)
        y = ginibre(r, n, gen)
        t = np.einsum("k,ki,kj->ij", np.sum(np.abs(x) ** 2, axis=1), y, y.conj())
        lam, u = np.linalg.eigh(t)
        if lam[0] > min_eig:
            break
    else:
        raise NumericalError(f"normalizer stayed singular after {max_attempts} attempts")
    t_inv_half = (u / np.sqrt(lam)) @ u.conj().T
    # row k of zc is y_k^* T^{-1/2}, so v_k = x_k zc_k
    zc = y.conj() @ t_inv_half
    v = IsometryTuple(np.einsum("ka,kb->kab", x, zc))
    xi = purify(omega)
    # (v_k (x) 1) xi = x_k (x) eta_k, eta_k = zc_k X
    etas = zc @ xi.coefficients
    xn = np.linalg.norm(x, axis=1)
    en = np.linalg.norm(etas, axis=1)
    decomp = ProductDecomposition((xn * en) ** 2, x / xn[:, None], etas / en[:, None])
    return v, decomp


def verify_product_decomposition(rho, decomp, tol=1e-8):
    a = _density(rho)
    if a.shape != (decomp.m * decomp.n, decomp.m * decomp.n):
        raise ValidationError(f"state shape {a.shape} does not match decomposition dims ({decomp.m}, {decomp.n})")
    # any separable state needs at most m^2 n^2 product terms
    if len(decomp) > (decomp.m * decomp.n) ** 2:
        return False
    if abs(decomp.weights.sum() - 1.0) > WEIGHT_SUM_TOL:
        return False
    if not (np.allclose(np.linalg.norm(decomp.xis, axis=1), 1.0, atol=tol)
            and np.allclose(np.linalg.norm(decomp.etas, axis=1), 1.0, atol=tol)):
        return False
    return bool(np.max(np.abs(decomp.density() - a)) <= tol)


def witness_from_pure(zeta, m, n):
    """Witness ``c = alpha 1 - zeta zeta^*`` with alpha the squared top Schmidt coefficient.

    ``alpha`` equals the maximum overlap ``|<x (x) y, zeta>|^2`` over unit product
    vectors, so ``c`` is non-negative on every product state while
    ``<c zeta, zeta> = alpha - 1`` is negative whenever zeta is entangled.
    """
    zeta = np.asarray(zeta, dtype=np.complex128).reshape(-1)
    if zeta.size != m * n:
        raise ValidationError(f"vector length {zeta.size} != m*n = {m * n}")
    nrm = np.linalg.norm(zeta)
    if abs(nrm - 1.0) > 1e-10:
        raise ValidationError(f"zeta must be a unit vector (norm {nrm:.12g})")
    s = np.linalg.svd(zeta.reshape(m, n), compute_uv=False)
    alpha = float(s[0] ** 2)
    c = alpha * np.eye(m * n) - np.outer(zeta, zeta.conj())
    return c, alpha


def witness_value(c, rho):
    return float(np.real(np.trace(np.asarray(c) @ _density(rho))))


def verify_separating_unitary(v, mu, rel_tol=DEFAULT_REL_TOL, tol=1e-10):
    """Check a candidate ``mu`` for the unitary characterization of separability.

    ``rho_v`` is separable iff some ``q x q`` unitary ``mu`` (``q = m^2 n^2``)
    makes every ``sum_j mu_ij v_j`` (j <= r) of rank at most one. This only
    verifies a given ``mu``; finding one is not attempted.
    """
    q = v.m**2 * v.n**2
    mu = np.asarray(mu, dtype=np.complex128)
    if mu.shape != (q, q):
        raise ValidationError(f"mu must be {q} x {q}, got {mu.shape}")
    if np.max(np.abs(mu.conj().T @ mu - np.eye(q))) > tol:
        return False
    combos = np.einsum("ij,jab->iab", mu[:, : v.r], v.components)
    return all(numerical_rank(c, rel_tol)[0] <= 1 for c in combos)


def decide(v, xi, rel_tol=DEFAULT_REL_TOL, tests=("wedge", "ppt", "ball"), rho=None, dims=None):
    """Aggregate the configured tests into a verdict for ``rho_v``.

    ``rho`` may be passed when already known; ``dims = (m, n)`` overrides the
    tuple's dimensions for the state-level tests (needed when the tuple lives on
    the support of a non-faithful marginal).
    """
    m, n = dims if dims is not None else (v.m, v.n)
    reasons = []
    entangled = separable = exact = False
    inv = None
    certs = {}
    if "wedge" in tests:
        inv = wedge_invariants(v, rel_tol)
        cert = wedge_test(v, invariants=inv)
        reasons.append(("wedge_w", inv.w))
        reasons.append(("wedge_w_star", inv.w_star))
        if cert is not None:
            certs["wedge"] = cert
            entangled = True
    if rho is None and ("ppt" in tests or "ball" in tests):
        rho = state_from_tuple(v, xi)
    if "ppt" in tests:
        ppt = ppt_test(rho, m, n)
        reasons.append(("ppt_min_eigenvalue", ppt.min_eigenvalue))
        if ppt.npt:
            certs["ppt"] = ppt
            entangled = True
            exact = m * n <= PPT_EXACT_MAX_DIM
        elif ppt.exact_separable:
            certs["ppt_exact"] = ppt
            separable = exact = True
    if "ball" in tests:
        ball = ball_test(rho, m, n)
        reasons.append(("ball_purity", ball.purity))
        if ball.separable:
            certs["ball"] = ball
            separable = True
    if entangled and separable:
        raise InconsistentVerdict(f"conflicting certificates {sorted(certs)} for a state at (m, n) = ({m}, {n})")
    status = Status.ENTANGLED if entangled else Status.SEPARABLE if separable else Status.UNDECIDED
    return SeparabilityVerdict(status, reasons, exact, inv, certs)
