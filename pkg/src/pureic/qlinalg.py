"""Dense complex linear algebra for projective measurements.

Kets are 1-D complex arrays and operators are 2-D complex arrays.  The
container types below (:class:`OrthonormalBasis`, :class:`ProjectionSet`,
:class:`ComplementBasis`) validate on construction and are treated as
immutable afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every module.

    ``tol_unit`` governs normalization/orthonormality checks, ``tol_herm``
    selfadjointness, ``tol_zero`` vanishing of traces and residuals, and
    ``tol_rank`` the relative singular value cutoff for numerical rank.
    """

    tol_unit: float = 1e-10
    tol_herm: float = 1e-10
    tol_zero: float = 1e-9
    tol_rank: float = 1e-8

    def __post_init__(self):
        for name in ("tol_unit", "tol_herm", "tol_zero", "tol_rank"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")


DEFAULT_TOLS = Tolerances()


def as_ket(psi, tols: Tolerances = DEFAULT_TOLS, normalized: bool = True) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size == 0:
        raise ValueError(f"a ket must be a nonempty 1-D array, got shape {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise ValueError("ket has non-finite entries")
    if normalized and abs(np.linalg.norm(psi) - 1.0) > tols.tol_unit:
        raise ValueError(f"ket is not normalized (norm {np.linalg.norm(psi):.3e})")
    return psi


def as_selfadjoint(A, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("operator has non-finite entries")
    if np.max(np.abs(A - A.conj().T), initial=0.0) > tols.tol_herm:
        raise ValueError("operator is not selfadjoint")
    return A


def equivalent_kets(psi, phi, tol: float = 1e-8) -> bool:
    """True if the two unit vectors differ only by a global phase."""
    return abs(abs(np.vdot(psi, phi)) - 1.0) <= tol


def ket_to_dm(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    """Pure state from normalized i.i.d. standard complex Gaussians."""
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


# --- Hilbert-Schmidt geometry -------------------------------------------------


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product tr(A* B)."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape or A.ndim != 2:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def numerical_rank(T, tol_rank: float = DEFAULT_TOLS.tol_rank) -> int:
    """Number of singular values above ``tol_rank`` times the largest one."""
    T = np.asarray(T, dtype=complex)
    if not np.all(np.isfinite(T)):
        raise ValueError("matrix has non-finite entries")
    s = np.linalg.svd(T, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol_rank * s[0]))


def sa_to_real(A) -> np.ndarray:
    """Real coordinates of a selfadjoint matrix (or a stack of them).

    Diagonal entries come first, then sqrt(2)*Re and sqrt(2)*Im of the strict
    upper triangle, so that tr(AB) equals the Euclidean dot product.
    """
    A = np.asarray(A, dtype=complex)
    d = A.shape[-1]
    iu = np.triu_indices(d, 1)
    diag = np.real(np.diagonal(A, axis1=-2, axis2=-1))
    upper = A[..., iu[0], iu[1]]
    return np.concatenate(
        [diag, np.sqrt(2) * upper.real, np.sqrt(2) * upper.imag], axis=-1
    )


def real_to_sa(v, d: int) -> np.ndarray:
    """Inverse of :func:`sa_to_real`."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != d * d:
        raise ValueError(f"expected {d * d} real coordinates, got {v.shape[-1]}")
    iu = np.triu_indices(d, 1)
    k = len(iu[0])
    out = np.zeros(v.shape[:-1] + (d, d), dtype=complex)
    idx = np.arange(d)
    out[..., idx, idx] = v[..., :d]
    upper = (v[..., d : d + k] + 1j * v[..., d + k :]) / np.sqrt(2)
    out[..., iu[0], iu[1]] = upper
    out[..., iu[1], iu[0]] = upper.conj()
    return out


def _nullspace(G: np.ndarray, tol_rank: float) -> tuple[np.ndarray, int]:
    """Orthonormal rows spanning the (right) nullspace of ``G`` and rank(G)."""
    n = G.shape[1]
    if G.shape[0] == 0:
        return np.eye(n), 0
    _, s, vh = np.linalg.svd(G)
    rank = int(np.sum(s > tol_rank * s[0])) if s[0] > 0 else 0
    return vh[rank:], rank


def _canonical_sign(rows: np.ndarray) -> np.ndarray:
    # Make the largest-magnitude coordinate of each row positive.
    rows = rows.copy()
    for i, r in enumerate(rows):
        j = int(np.argmax(np.abs(r)))
        if r[j] < 0:
            rows[i] = -r
    return rows


# --- bases and projections ----------------------------------------------------


@dataclass(frozen=True)
class OrthonormalBasis:
    """A basis of C^d stored row-wise: ``vectors[j]`` is the j-th basis vector."""

    vectors: np.ndarray
    tol: float = field(default=DEFAULT_TOLS.tol_unit, compare=False, repr=False)

    def __post_init__(self):
        V = np.array(self.vectors, dtype=complex)
        if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] == 0:
            raise ValueError(f"a basis needs d vectors of length d, got shape {V.shape}")
        if not np.all(np.isfinite(V)):
            raise ValueError("basis has non-finite entries")
        dev = np.max(np.abs(V.conj() @ V.T - np.eye(V.shape[0])))
        if dev > self.tol:
            raise ValueError(f"basis is not orthonormal (max deviation {dev:.3e})")
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.vectors)

    def orthonormality_error(self) -> float:
        V = self.vectors
        return float(np.max(np.abs(V.conj() @ V.T - np.eye(self.dim))))

    @classmethod
    def standard(cls, d: int) -> "OrthonormalBasis":
        return cls(np.eye(d, dtype=complex))

    @classmethod
    def from_unitary(cls, U) -> "OrthonormalBasis":
        """Basis formed by the columns of a unitary matrix."""
        return cls(np.asarray(U, dtype=complex).T)

    @classmethod
    def eigenbasis(cls, H) -> "OrthonormalBasis":
        """Eigenbasis of a selfadjoint matrix, ordered by ascending eigenvalue."""
        _, vecs = np.linalg.eigh(np.asarray(H, dtype=complex))
        return cls(vecs.T)


def random_basis(d: int, rng: np.random.Generator) -> OrthonormalBasis:
    return OrthonormalBasis.from_unitary(random_unitary(d, rng))


@dataclass(frozen=True)
class ProjectionSet:
    """Rank-1 projections grouped by source basis; shape ``(m, d, d, d)``."""

    projections: np.ndarray

    @property
    def dim(self) -> int:
        return self.projections.shape[-1]

    @property
    def n_groups(self) -> int:
        return self.projections.shape[0]

    def flat(self) -> np.ndarray:
        d = self.dim
        return self.projections.reshape(-1, d, d)


def _common_dim(bases: Sequence[OrthonormalBasis]) -> int:
    if len(bases) == 0:
        raise ValueError("at least one basis is required")
    dims = {b.dim for b in bases}
    if len(dims) != 1:
        raise ValueError(f"bases have mismatched dimensions {sorted(dims)}")
    return dims.pop()


def projections_of(bases: Sequence[OrthonormalBasis]) -> ProjectionSet:
    bases = [b if isinstance(b, OrthonormalBasis) else OrthonormalBasis(b) for b in bases]
    _common_dim(bases)
    V = np.stack([b.vectors for b in bases])  # (m, d, d): basis, vector, entry
    P = np.einsum("mji,mjk->mjik", V, V.conj())
    P.setflags(write=False)
    return ProjectionSet(P)


@dataclass(frozen=True)
class ComplementBasis:
    """HS-orthonormal selfadjoint basis of the operators orthogonal to a ProjectionSet."""

    dim: int
    ops: np.ndarray  # (k, d, d)
    family_rank: int = 0

    def __len__(self):
        return self.ops.shape[0]

    def real_coords(self) -> np.ndarray:
        return sa_to_real(self.ops).reshape(len(self), self.dim * self.dim)


def selfadjoint_complement(
    projs: ProjectionSet, tols: Tolerances = DEFAULT_TOLS
) -> ComplementBasis:
    """Real-linear basis of selfadjoint T with tr(P T) = 0 for every projection.

    The result has real dimension d^2 minus the real rank of the projection
    family; elements are traceless because each group sums to the identity.
    """
    d = projs.dim
    G = sa_to_real(projs.flat())
    null, rank = _nullspace(G, tols.tol_rank)
    null = _canonical_sign(null)
    ops = real_to_sa(null, d) if len(null) else np.zeros((0, d, d), dtype=complex)
    ops.setflags(write=False)
    return ComplementBasis(dim=d, ops=ops, family_rank=rank)


def _complex_span(ops: Sequence[np.ndarray], d: int, tol_rank: float) -> np.ndarray:
    rows = [np.eye(d, dtype=complex).ravel()] + [np.asarray(A, dtype=complex).ravel() for A in ops]
    M = np.array(rows)
    _, s, vh = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > tol_rank * s[0]))
    return vh[:rank]


def _span_residual(basis: np.ndarray, ops: Sequence[np.ndarray]) -> float:
    worst = 0.0
    for A in ops:
        a = np.asarray(A, dtype=complex).ravel()
        nrm = np.linalg.norm(a)
        if nrm == 0:
            continue
        r = a - basis.T @ (basis.conj() @ a)
        worst = max(worst, float(np.linalg.norm(r) / nrm))
    return worst


def operator_system_equal(A, B, tols: Tolerances = DEFAULT_TOLS) -> bool:
    """Whether span(A + {I}) equals span(B + {I}) as complex subspaces."""
    A = [np.asarray(x, dtype=complex) for x in A]
    B = [np.asarray(x, dtype=complex) for x in B]
    shapes = {x.shape for x in A + B}
    if len(shapes) > 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")
    d = shapes.pop()[0] if shapes else 1
    span_a = _complex_span(A, d, tols.tol_rank)
    span_b = _complex_span(B, d, tols.tol_rank)
    return (
        _span_residual(span_a, B) < tols.tol_zero
        and _span_residual(span_b, A) < tols.tol_zero
    )


# --- Pauli matrices -------------------------------------------------------------

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


def dot_sigma(n) -> np.ndarray:
    """n . sigma for a real 3-vector n."""
    return np.tensordot(np.asarray(n, dtype=float), PAULIS, axes=1)
