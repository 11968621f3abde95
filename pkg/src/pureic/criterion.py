"""Deciding whether a set of bases distinguishes all pure states.

The central object is the real space of selfadjoint operators orthogonal to
every measurement projection.  A rank-2 element of that space is, after
rescaling, a difference of two pure states with identical statistics; if no
such element exists the bases are informationally complete for pure states.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .qlinalg import (
    DEFAULT_TOLS,
    ComplementBasis,
    OrthonormalBasis,
    ProjectionSet,
    Tolerances,
    _common_dim,
    _nullspace,
    as_ket,
    as_selfadjoint,
    ket_to_dm,
    numerical_rank,
    projections_of,
    real_to_sa,
    sa_to_real,
    selfadjoint_complement,
)

# Threshold for the exact-zero overlap case of the two-basis construction.
_EXACT_ZERO = 1e-14
# Restarts are evaluated in fixed-size chunks so results do not depend on
# the number of worker threads.
_CHUNK = 8


class Status(str, enum.Enum):
    IC = "IC"
    NOT_IC = "NotIC"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class WitnessPair:
    """Two nonparallel unit vectors whose pure states have equal statistics."""

    psi_plus: np.ndarray
    psi_minus: np.ndarray
    residual: float

    @property
    def overlap(self) -> float:
        return float(abs(np.vdot(self.psi_plus, self.psi_minus)))

    def to_json(self) -> dict:
        from .formats import encode_vector

        return {
            "psi_plus": encode_vector(self.psi_plus),
            "psi_minus": encode_vector(self.psi_minus),
            "residual": float(self.residual),
        }


@dataclass
class Verdict:
    status: Status
    complement_dim: int
    witness: WitnessPair | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "complement_dim": int(self.complement_dim),
            "witness": None if self.witness is None else self.witness.to_json(),
            "diagnostics": self.diagnostics,
        }


def _witness(psi_plus, psi_minus, projs: ProjectionSet | None, fallback: float) -> WitnessPair:
    if projs is None:
        residual = fallback
    else:
        D = ket_to_dm(psi_plus) - ket_to_dm(psi_minus)
        residual = float(np.max(np.abs(np.einsum("kij,ji->k", projs.flat(), D))))
    return WitnessPair(psi_plus, psi_minus, residual)


def pair_residual(bases: Sequence[OrthonormalBasis], psi1, psi2) -> float:
    """Largest outcome-probability gap between two pure states."""
    V = np.stack([b.vectors for b in bases])
    p1 = np.abs(V.conj() @ np.asarray(psi1)) ** 2
    p2 = np.abs(V.conj() @ np.asarray(psi2)) ** 2
    return float(np.max(np.abs(p1 - p2)))


def _as_state(rho, tols: Tolerances) -> np.ndarray:
    rho = as_selfadjoint(rho, tols)
    if abs(np.trace(rho).real - 1.0) > tols.tol_unit:
        raise ValueError("state must have unit trace")
    if np.linalg.eigvalsh(rho)[0] < -tols.tol_zero:
        raise ValueError("state must be a positive operator")
    return rho


def distinguishes(bases, rho1, rho2, tols: Tolerances = DEFAULT_TOLS) -> bool:
    """Whether some basis vector has a different outcome probability in the two states."""
    bases = list(bases)
    d = _common_dim(bases)
    rho1 = _as_state(rho1, tols)
    rho2 = _as_state(rho2, tols)
    if rho1.shape != (d, d) or rho2.shape != (d, d):
        raise ValueError("state dimension does not match the bases")
    V = np.stack([b.vectors for b in bases]).reshape(-1, d)
    gaps = np.einsum("ki,ij,kj->k", V.conj(), rho1 - rho2, V).real
    return bool(np.max(np.abs(gaps)) > tols.tol_zero)


def two_basis_counterexample(
    B1: OrthonormalBasis, B2: OrthonormalBasis, tols: Tolerances = DEFAULT_TOLS
) -> WitnessPair:
    """Indistinguishable pair psi_pm = (phi_1 +- eta)/sqrt(2) for two bases.

    eta is orthogonal to the first vector of ``B1`` and makes
    Re(<phi_1, chi_k><chi_k, eta>) vanish for every vector chi_k of ``B2``.
    """
    if B1.dim != B2.dim:
        raise ValueError("bases have mismatched dimensions")
    if B1.dim < 2:
        raise ValueError("dimension must be at least 2")
    phi1 = B1.vectors[0]
    chi1, chi2 = B2.vectors[0], B2.vectors[1]
    a1 = np.vdot(phi1, chi1)
    a2 = np.vdot(phi1, chi2)
    if abs(a1) <= _EXACT_ZERO:
        eta = chi1
    elif abs(a2) <= _EXACT_ZERO:
        eta = chi2
    else:
        scale = 1j * abs(a1 * a2) / np.sqrt(abs(a1) ** 2 + abs(a2) ** 2)
        eta = scale * (chi1 / a1 - chi2 / a2)
    psi_plus = (phi1 + eta) / np.sqrt(2)
    psi_minus = (phi1 - eta) / np.sqrt(2)
    projs = projections_of([B1, B2])
    return _witness(psi_plus, psi_minus, projs, 0.0)


# --- numerical witness search -----------------------------------------------


@dataclass(frozen=True)
class _SearchResult:
    objective: float
    index: int
    frame: np.ndarray
    iterations: int


def _range_ops(complement: ComplementBasis) -> np.ndarray:
    """Selfadjoint orthonormal basis of the orthogonal complement of ``complement``."""
    d = complement.dim
    C = complement.real_coords()
    if len(C) == 0:
        Q = np.eye(d * d)
    else:
        Q, _ = _nullspace(C, 1e-12)
    return real_to_sa(Q, d)


def _objective(Qops: np.ndarray, X: np.ndarray):
    p, m = X[:, 0], X[:, 1]
    g = (
        np.einsum("i,rij,j->r", p.conj(), Qops, p).real
        - np.einsum("i,rij,j->r", m.conj(), Qops, m).real
    )
    return float(g @ g), g


def _retract(X: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(X)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _descend(Qops, X, target, max_iter=500):
    """Riemannian gradient descent on orthonormal 2-frames with step halving."""
    f, g = _objective(Qops, X)
    step = 0.25
    it = 0
    prev = None
    for it in range(1, max_iter + 1):
        if f < target:
            break
        S = np.tensordot(g, Qops, axes=1)
        G = 4.0 * np.stack([S @ X[:, 0], -(S @ X[:, 1])], axis=1)
        XhG = X.conj().T @ G
        xi = G - X @ ((XhG + XhG.conj().T) / 2)
        gnorm2 = float(np.vdot(xi, xi).real)
        if gnorm2 < 1e-300:
            break
        if prev is not None:
            # Barzilai-Borwein guess for the initial trial step.
            s, y = prev[0], xi - prev[1]
            sy = float(np.vdot(s, y).real)
            if sy > 0:
                step = min(float(np.vdot(s, s).real) / sy, 1e3)
        t = step
        while True:
            Xn = _retract(X - t * xi)
            fn, gn = _objective(Qops, Xn)
            if fn <= f - 1e-4 * t * gnorm2 or t < 1e-16:
                break
            t *= 0.5
        if fn >= f:
            break
        prev = (-t * xi, xi)
        X, f, g = Xn, fn, gn
        step = t
    return X, f, it


def _restart(Qops, d, seq: np.random.SeedSequence, index: int, target: float) -> _SearchResult:
    rng = np.random.default_rng(seq)
    Z = rng.standard_normal((d, 2)) + 1j * rng.standard_normal((d, 2))
    X = _retract(Z)
    X, f, it = _descend(Qops, X, target)
    return _SearchResult(f, index, X, it)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PUREIC_THREADS", "1")))
    except ValueError:
        return 1


def witness_search(
    complement: ComplementBasis,
    restarts: int = 50,
    seed: int = 0,
    tols: Tolerances = DEFAULT_TOLS,
    projs: ProjectionSet | None = None,
    info: dict | None = None,
) -> WitnessPair | None:
    """Search for orthonormal psi_pm with P_plus - P_minus inside the complement.

    The objective is the squared HS distance of P_plus - P_minus to the
    complement subspace.  Each restart uses its own child seed; the first
    chunk of restarts containing a success returns its best member, ranked by
    (objective, restart index).  Returns None if no restart succeeds.
    """
    if len(complement) == 0:
        raise ValueError("complement is empty; there is nothing to search")
    d = complement.dim
    Qops = _range_ops(complement)
    target = tols.tol_zero**2
    children = np.random.SeedSequence(seed).spawn(restarts)
    best: _SearchResult | None = None
    used = 0
    threads = _threads()
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for start in range(0, restarts, _CHUNK):
            idx = range(start, min(start + _CHUNK, restarts))
            if pool is None:
                results = [_restart(Qops, d, children[i], i, target) for i in idx]
            else:
                results = list(pool.map(lambda i: _restart(Qops, d, children[i], i, target), idx))
            used = idx[-1] + 1
            chunk_best = min(results, key=lambda r: (r.objective, r.index))
            if best is None or chunk_best.objective < best.objective:
                best = chunk_best
            if chunk_best.objective < target:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    if info is not None:
        info.update(restarts_used=used, min_objective=None if best is None else best.objective)
    if best is None or best.objective >= target:
        return None
    X = best.frame
    return _witness(X[:, 0], X[:, 1], projs, float(np.sqrt(best.objective)))


# --- exact constructions ----------------------------------------------------


def _spectral_witness(T: np.ndarray, projs: ProjectionSet | None) -> WitnessPair:
    """psi_plus/psi_minus from the extreme eigenvectors of a traceless T."""
    _, vecs = np.linalg.eigh(T)
    return _witness(vecs[:, -1], vecs[:, 0], projs, 0.0)


def _singular_in_span_d3(ops: np.ndarray) -> np.ndarray:
    """A singular nonzero element of span(ops[0], ops[1]) for 3x3 selfadjoint ops.

    theta -> det(cos(theta) T1 + sin(theta) T2) is odd under theta -> theta+pi,
    so it changes sign on [0, pi].
    """
    T1, T2 = ops[0], ops[1]

    def h(theta):
        return float(np.linalg.det(np.cos(theta) * T1 + np.sin(theta) * T2).real)

    h0 = h(0.0)
    if h0 == 0.0:
        return T1
    # Find a sign change on a grid first; brentq needs a bracket.
    grid = np.linspace(0.0, np.pi, 65)
    vals = [h(t) for t in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            theta = a
            break
        if fa * fb < 0:
            theta = brentq(h, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            break
    else:
        theta = np.pi
    return np.cos(theta) * T1 + np.sin(theta) * T2


def _generator_rank(T: np.ndarray, tol_rank: float) -> int:
    # Eigenvalues at the tolerance count as zero (conservative).
    ev = np.abs(np.linalg.eigvalsh(T))
    top = ev.max()
    if top == 0:
        return 0
    return int(np.sum(ev > tol_rank * top))


def _not_ic(complement_dim: int, witness: WitnessPair, tols: Tolerances, diag: dict) -> Verdict:
    diag = dict(diag, witness_residual=witness.residual)
    if witness.residual <= tols.tol_zero:
        return Verdict(Status.NOT_IC, complement_dim, witness, diag)
    diag["note"] = "witness residual above tol_zero; no certificate issued"
    return Verdict(Status.INCONCLUSIVE, complement_dim, None, diag)


def certify_pure_ic(
    bases: Sequence[OrthonormalBasis],
    restarts: int = 50,
    seed: int = 0,
    tols: Tolerances = DEFAULT_TOLS,
) -> Verdict:
    """Tri-state certificate of pure-state informational completeness.

    IC is returned only from an exact argument: an empty complement, or a
    one-dimensional complement whose generator has rank at least 3.  NotIC
    always carries a witness pair.  For larger complements in d >= 4 a
    failed search yields Inconclusive.
    """
    bases = list(bases)
    d = _common_dim(bases)
    projs = projections_of(bases)
    comp = selfadjoint_complement(projs, tols)
    k = len(comp)
    diag: dict = {"dim": d, "n_bases": len(bases)}
    if k == 0:
        return Verdict(Status.IC, 0, None, dict(diag, method="empty complement"))
    if k == 1:
        T = comp.ops[0]
        r = _generator_rank(T, tols.tol_rank)
        diag.update(method="generator rank", generator_rank=r)
        if r >= 3:
            return Verdict(Status.IC, 1, None, diag)
        return _not_ic(1, _spectral_witness(T, projs), tols, diag)
    if d == 2:
        # Every nonzero traceless 2x2 selfadjoint operator has rank 2.
        diag.update(method="qubit complement element")
        return _not_ic(k, _spectral_witness(comp.ops[0], projs), tols, diag)
    if d == 3:
        diag.update(method="singular pencil element")
        T = _singular_in_span_d3(comp.ops)
        w = _spectral_witness(T, projs)
        if w.residual <= tols.tol_zero:
            return _not_ic(k, w, tols, diag)
    info: dict = {}
    w = witness_search(comp, restarts, seed, tols, projs=projs, info=info)
    diag.update(method="witness search", **info)
    if w is None:
        return Verdict(Status.INCONCLUSIVE, k, None, diag)
    return _not_ic(k, w, tols, diag)


def check_d3_four_bases(bases: Sequence[OrthonormalBasis], tols: Tolerances = DEFAULT_TOLS) -> Verdict:
    """Exact decision for four bases of C^3.

    IC iff the complement is {0} or spanned by one invertible selfadjoint
    operator.
    """
    bases = list(bases)
    if len(bases) != 4:
        raise ValueError(f"expected exactly four bases, got {len(bases)}")
    d = _common_dim(bases)
    if d != 3:
        raise ValueError(f"expected dimension 3, got {d}")
    projs = projections_of(bases)
    comp = selfadjoint_complement(projs, tols)
    k = len(comp)
    if k == 0:
        return Verdict(Status.IC, 0, None, {"method": "empty complement"})
    if k == 1:
        T = comp.ops[0]
        ev = np.linalg.eigvalsh(T)
        diag = {"method": "generator invertibility", "generator_eigenvalues": ev.tolist()}
        if _generator_rank(T, tols.tol_rank) == 3:
            return Verdict(Status.IC, 1, None, diag)
        return _not_ic(1, _spectral_witness(T, projs), tols, diag)
    T = _singular_in_span_d3(comp.ops)
    return _not_ic(k, _spectral_witness(T, projs), tols, {"method": "singular pencil element"})
