"""Spin-1 measurements along four directions.

For the eigenbases of n_k . L (k = 1..4) the complement of the measurement
operator system is Phi(ker M), where M is a 4x5 real matrix built from the
direction components and Phi maps R^5 into the traceless selfadjoint 3x3
matrices orthogonal to L_x, L_y, L_z.  The bases distinguish all pure states
iff rank M = 4 and Phi(x) is invertible for the kernel vector x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criterion import Status, Verdict, _not_ic, _spectral_witness, check_d3_four_bases
from .qlinalg import DEFAULT_TOLS, OrthonormalBasis, Tolerances, projections_of

_S2 = np.sqrt(2.0)

L_X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _S2
L_Y = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / _S2
L_Z = np.diag([1.0, 0.0, -1.0]).astype(complex)

# det(Phi(x)) = DET_SCALE * cubic(x); checked symbolically and in the tests.
DET_SCALE = -2.0


def spin_ops() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return L_X.copy(), L_Y.copy(), L_Z.copy()


def as_direction(n, tol: float = DEFAULT_TOLS.tol_unit) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or not np.all(np.isfinite(n)):
        raise ValueError(f"a direction is a finite real 3-vector, got {n!r}")
    if abs(np.linalg.norm(n) - 1.0) > tol:
        raise ValueError(f"direction must have unit norm (norm {np.linalg.norm(n):.6g})")
    return n


def spin_along(n) -> np.ndarray:
    n = as_direction(n)
    return n[0] * L_X + n[1] * L_Y + n[2] * L_Z


def spin_projections(n) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenprojections (P_{+1}, P_0, P_{-1}) of n . L."""
    S = spin_along(n)
    S2 = S @ S
    return (S2 + S) / 2, np.eye(3) - S2, (S2 - S) / 2


def spin_basis(n) -> OrthonormalBasis:
    """Eigenbasis of n . L ordered as eigenvalues +1, 0, -1."""
    vecs = []
    for P in spin_projections(n):
        w, v = np.linalg.eigh(P)
        vecs.append(v[:, -1])
    return OrthonormalBasis(np.array(vecs))


def build_M(dirs) -> np.ndarray:
    N = np.array([as_direction(n) for n in dirs])
    if N.shape[0] != 4:
        raise ValueError(f"expected four directions, got {N.shape[0]}")
    nx, ny, nz = N.T
    return np.column_stack(
        [
            2 * _S2 * nx * nz,
            -2 * _S2 * ny * nz,
            nx**2 - ny**2,
            -2 * nx * ny,
            3 * nz**2 - 1,
        ]
    )


def phi_map(x) -> np.ndarray:
    x1, x2, x3, x4, x5 = np.asarray(x, dtype=complex)
    return np.array(
        [
            [x5, x1 + 1j * x2, x3 + 1j * x4],
            [x1 - 1j * x2, -2 * x5, -x1 - 1j * x2],
            [x3 - 1j * x4, -x1 + 1j * x2, x5],
        ]
    )


def determinant_cubic(x) -> float:
    """2 x1 x2 x4 + x3 (x1^2 - x2^2) + x5 (x1^2 + x2^2 + x5^2 - x3^2 - x4^2)."""
    x1, x2, x3, x4, x5 = np.asarray(x, dtype=float)
    return float(
        2 * x1 * x2 * x4
        + x3 * (x1**2 - x2**2)
        + x5 * (x1**2 + x2**2 + x5**2 - x3**2 - x4**2)
    )


@dataclass
class SpinCriterionReport:
    M: np.ndarray
    rank_M: int
    kernel_vector: np.ndarray | None
    determinant_value: float
    verdict: Verdict

    def to_json(self) -> dict:
        return {
            "M": self.M.tolist(),
            "rank_M": self.rank_M,
            "kernel_vector": None if self.kernel_vector is None else self.kernel_vector.tolist(),
            "determinant_value": self.determinant_value,
            "verdict": self.verdict.to_json(),
        }


def _canonical(x: np.ndarray) -> np.ndarray:
    x = x / np.linalg.norm(x)
    nz = np.flatnonzero(np.abs(x) > 1e-12)
    return -x if nz.size and x[nz[0]] < 0 else x


def spin1_verdict(dirs, tols: Tolerances = DEFAULT_TOLS) -> SpinCriterionReport:
    dirs = [as_direction(n, tols.tol_unit) for n in dirs]
    M = build_M(dirs)
    _, s, vh = np.linalg.svd(M)
    rank = int(np.sum(s > tols.tol_rank * s[0])) if s[0] > 0 else 0
    bases = [spin_basis(n) for n in dirs]
    exact = check_d3_four_bases(bases, tols)
    if rank != 4:
        verdict = exact
        verdict.diagnostics = dict(verdict.diagnostics, condition="rank(M) < 4")
        return SpinCriterionReport(M, rank, None, 0.0, verdict)
    x = _canonical(vh[-1])
    cubic = determinant_cubic(x)
    ic = abs(cubic) > tols.tol_zero
    diag = {
        "method": "spin-1 matrix criterion",
        "cross_check": exact.status.value,
        "agrees": (exact.status is Status.IC) == ic,
    }
    if ic:
        verdict = Verdict(Status.IC, 1, None, diag)
    else:
        # Phi(x) is then a singular element of the complement.
        w = _spectral_witness(phi_map(x), projections_of(bases))
        verdict = _not_ic(1, w, tols, diag)
    return SpinCriterionReport(M, rank, x, cubic, verdict)


# A quadruple of directions that satisfies both conditions.
EXAMPLE_DIRECTIONS = (
    (0.0, 0.0, 1.0),
    (1 / _S2, 1 / _S2, 0.0),
    (1 / _S2, 0.0, 1 / _S2),
    (0.0, np.sqrt(3) / 2, 0.5),
)
