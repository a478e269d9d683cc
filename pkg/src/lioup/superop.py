"""Vectorization of density matrices and assembly of (hybrid) Liouvillians.

Two superoperator bases are supported:

* generalized Gell-Mann: Hermitian trace-orthogonal set, Tr(s_i s_j) = 2 d_ij,
  ordered symmetric pairs (j<k lexicographic), antisymmetric pairs, diagonal
  matrices by increasing rank, identity-proportional element last.  Components
  of rho are Tr(rho s_i)/2.
* Fock-Liouville: column stacking, |rho>>[i + d*j] = rho_ij, i.e. the
  |i> (x) |j*> convention with the column index running fastest.

The hybrid Liouvillian is L(q) = -i Hhat_NH + q Lambdahat
= -i Hhat + Gammahat + q Lambdahat: the relaxation part is always fully
included, only the quantum-jump (repopulation) term is q-weighted.
"""

import functools
from dataclasses import dataclass

import numpy as np

from .model import LindbladSystem

GELLMANN = "gellmann"
FOCKLIOUVILLE = "fockliouville"


@dataclass(frozen=True)
class BasisTag:
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in (GELLMANN, FOCKLIOUVILLE):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if not 2 <= self.dim <= 16:
            raise ValueError("basis dimension must be in [2, 16]")


@dataclass(frozen=True)
class GellMannBasis:
    dim: int
    matrices: np.ndarray  # (dim^2, dim, dim), identity-proportional element last

    @property
    def tag(self):
        return BasisTag(GELLMANN, self.dim)


@dataclass(frozen=True)
class SuperOperator:
    """A d^2 x d^2 matrix tagged with its basis convention and origin."""

    matrix: np.ndarray
    basis: BasisTag
    origin: str  # "nhh" | "hybrid" | "liouvillian"
    q: float | None = None
    parts: dict | None = None

    def to_json(self):
        return {
            "basis": {"kind": self.basis.kind, "dim": self.basis.dim},
            "origin": self.origin,
            "q": self.q,
            "matrix": matrix_to_json(self.matrix),
        }


def matrix_to_json(m):
    """Nested lists of [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


@functools.lru_cache(maxsize=None)
def _gellmann_cached(d):
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            mats.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            mats.append(m)
    for l in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -l
        mats.append(m * np.sqrt(2.0 / (l * (l + 1))))
    mats.append(np.sqrt(2.0 / d) * np.eye(d, dtype=complex))
    return np.array(mats)


def gellmann_basis(d):
    """Generalized Gell-Mann basis for a d-level system (Pauli set at d=2)."""
    if not 2 <= d <= 16:
        raise ValueError("d must be in [2, 16]")
    return GellMannBasis(dim=d, matrices=_gellmann_cached(d))


def _as_gm(basis):
    if isinstance(basis, GellMannBasis):
        return basis
    if isinstance(basis, BasisTag) and basis.kind == GELLMANN:
        return gellmann_basis(basis.dim)
    raise ValueError("a Gell-Mann basis is required here")


def vectorize(rho, basis):
    """Coefficient vector of a d x d operator in the given basis."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    if rho.shape != (d, d):
        raise ValueError("rho must be square")
    if isinstance(basis, GellMannBasis) or (
            isinstance(basis, BasisTag) and basis.kind == GELLMANN):
        gm = _as_gm(basis)
        if gm.dim != d:
            raise ValueError("dimension mismatch between rho and basis")
        return 0.5 * np.einsum("ab,iba->i", rho, gm.matrices)
    if isinstance(basis, BasisTag) and basis.kind == FOCKLIOUVILLE:
        if basis.dim != d:
            raise ValueError("dimension mismatch between rho and basis")
        return rho.flatten(order="F")
    raise ValueError(f"unknown basis {basis!r}")


def devectorize(vec, basis):
    vec = np.asarray(vec, dtype=complex)
    if isinstance(basis, GellMannBasis) or (
            isinstance(basis, BasisTag) and basis.kind == GELLMANN):
        gm = _as_gm(basis)
        if vec.shape != (gm.dim ** 2,):
            raise ValueError("vector has wrong length for this basis")
        return np.einsum("i,iab->ab", vec, gm.matrices)
    if isinstance(basis, BasisTag) and basis.kind == FOCKLIOUVILLE:
        d = basis.dim
        if vec.shape != (d ** 2,):
            raise ValueError("vector has wrong length for this basis")
        return vec.reshape((d, d), order="F")
    raise ValueError(f"unknown basis {basis!r}")


def superop_of_map(apply_fn, basis):
    """Matrix of a linear map on operators, M_ij = Tr(map(s_j) s_i)/2."""
    gm = _as_gm(basis)
    images = np.array([apply_fn(s) for s in gm.matrices])
    return 0.5 * np.einsum("jab,iba->ij", images, gm.matrices)


def h_superop(h, basis):
    """Hamiltonian superoperator Hhat_ij = Tr([H, s_j] s_i)/2.

    Requires Hermitian input (antisymmetric, purely imaginary output); route
    non-Hermitian generators through nhh_superop instead.
    """
    h = np.asarray(h, dtype=complex)
    scale = max(np.linalg.norm(h), 1.0)
    if np.linalg.norm(h - h.conj().T) > 1e-10 * scale:
        raise ValueError("h_superop requires a Hermitian matrix; use nhh_superop")
    return superop_of_map(lambda s: h @ s - s @ h, basis)


def _gamma_superop_from_op(g, basis):
    return superop_of_map(lambda s: -0.5 * (g @ s + s @ g), basis)


def gamma_superop(jumps, basis):
    """Relaxation superoperator, -1/4 sum Tr({L^dag L, s_j} s_i); symmetric, real."""
    gm = _as_gm(basis)
    d = gm.dim
    g = sum((np.asarray(l, dtype=complex).conj().T @ np.asarray(l, dtype=complex)
             for l in jumps), np.zeros((d, d), dtype=complex))
    return _gamma_superop_from_op(g, gm)


def lambda_superop(jumps, basis):
    """Quantum-jump (repopulation) superoperator, 1/2 sum Tr(L s_j L^dag s_i)."""
    gm = _as_gm(basis)
    ops = [np.asarray(l, dtype=complex) for l in jumps]

    def apply_fn(s):
        out = np.zeros_like(s)
        for l in ops:
            out += l @ s @ l.conj().T
        return out

    return superop_of_map(apply_fn, gm)


def nhh_superop(h_nh, basis):
    """Superoperator of the jump-free generator rho -> -i(H rho - rho H^dag).

    Accepts an arbitrary (non-Hermitian) H; its spectrum is the pairwise set
    -i(E_i - E_j^*) of the operator eigenvalues.
    """
    h_nh = np.asarray(h_nh, dtype=complex)
    d = h_nh.shape[0]
    if isinstance(basis, BasisTag) and basis.kind == FOCKLIOUVILLE:
        if basis.dim != d:
            raise ValueError("dimension mismatch")
        eye = np.eye(d)
        m = -1j * (np.kron(eye, h_nh) - np.kron(h_nh.conj(), eye))
        return SuperOperator(matrix=m, basis=basis, origin="nhh", q=0.0)
    gm = _as_gm(basis)
    if gm.dim != d:
        raise ValueError("dimension mismatch")
    herm = 0.5 * (h_nh + h_nh.conj().T)
    g = 1j * (h_nh - h_nh.conj().T)  # h_nh = herm - i g / 2, g Hermitian
    m = -1j * h_superop(herm, gm) + _gamma_superop_from_op(g, gm)
    return SuperOperator(matrix=m, basis=gm.tag, origin="nhh", q=0.0,
                         parts={"h_part": h_superop(herm, gm),
                                "gamma_part": _gamma_superop_from_op(g, gm)})


def hybrid_liouvillian(sys: LindbladSystem, q, basis) -> SuperOperator:
    """Hybrid Liouvillian L(q) = -i Hhat + Gammahat + q Lambdahat.

    q = 0 is the NHH superoperator of the system, q = 1 the full Lindblad
    generator (tagged "liouvillian").  `basis` may be a GellMannBasis, a
    BasisTag, or one of the strings "gellmann" / "fockliouville".
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    if isinstance(basis, str):
        basis = BasisTag(basis, sys.dim)
    origin = "liouvillian" if q == 1.0 else "hybrid"
    if isinstance(basis, BasisTag) and basis.kind == FOCKLIOUVILLE:
        m = _fock_liouville_matrix(sys, q)
        return SuperOperator(matrix=m, basis=basis, origin=origin, q=float(q))
    gm = _as_gm(basis)
    if gm.dim != sys.dim:
        raise ValueError("dimension mismatch between system and basis")
    ops = sys.jump_ops()
    hhat = h_superop(sys.hamiltonian, gm)
    ghat = gamma_superop(ops, gm)
    lhat = lambda_superop(ops, gm)
    m = -1j * hhat + ghat + q * lhat
    return SuperOperator(matrix=m, basis=gm.tag, origin=origin, q=float(q),
                         parts={"h_part": hhat, "gamma_part": ghat,
                                "lambda_part": lhat})


def _fock_liouville_matrix(sys: LindbladSystem, q):
    d = sys.dim
    eye = np.eye(d)
    h = sys.hamiltonian
    # column stacking: vec(A rho B) = (B^T kron A) vec(rho)
    m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for op in sys.jump_ops():
        ll = op.conj().T @ op
        m += q * np.kron(op.conj(), op)
        m -= 0.5 * (np.kron(eye, ll) + np.kron(ll.T, eye))
    return m


def fock_liouville(sys: LindbladSystem, q) -> SuperOperator:
    """Kronecker-assembled Liouvillian with the jump term weighted by q."""
    return hybrid_liouvillian(sys, q, BasisTag(FOCKLIOUVILLE, sys.dim))


def isotropic_extension(base: SuperOperator, gamma_g, q) -> SuperOperator:
    """Add isotropic ground relaxation to an effective three-level Liouvillian.

    In the Gell-Mann basis with the identity element last this is the diagonal
    correction -gamma * diag(1, ..., 1, 1-q): a uniform -gamma shift of the
    whole spectrum at q = 0, and of everything except the stationary state at
    q = 1.
    """
    if gamma_g < 0:
        raise ValueError("gamma_g must be non-negative")
    if base.basis.kind != GELLMANN or base.basis.dim != 3:
        raise ValueError("isotropic extension expects the 3-level Gell-Mann form")
    if base.q is not None and abs(base.q - q) > 1e-12:
        raise ValueError("q must match the q of the base hybrid Liouvillian")
    diag = np.full(9, gamma_g)
    diag[-1] = gamma_g * (1.0 - q)
    m = base.matrix - np.diag(diag)
    return SuperOperator(matrix=m, basis=base.basis, origin=base.origin,
                         q=base.q, parts=base.parts)
