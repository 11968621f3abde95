"""Product bases of C^2 (x) C^2 and indistinguishable maximally entangled states.

A maximally entangled state is (U (x) I) Omega_0 with U in SU(2).  On such
states the local Bloch terms of every product basis vanish, so four product
bases only measure f(R_U) in R^4, a linear function of the rotation R_U.
Two rotations with equal f give two different states with identical
statistics; :func:`find_entangled_collision` searches for such a pair.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .criterion import _CHUNK, _threads, pair_residual
from .qlinalg import DEFAULT_TOLS, PAULIS, OrthonormalBasis, Tolerances, dot_sigma
from .spin1 import as_direction

OMEGA0 = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class BlochPair:
    """Bloch directions of the two local bases forming one product basis."""

    m: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", as_direction(self.m))
        object.__setattr__(self, "n", as_direction(self.n))


@dataclass(frozen=True)
class CollisionResult:
    R1: np.ndarray
    R2: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    f_residual: float
    state_overlap: float
    probabilities1: np.ndarray  # (4 bases, 4 outcomes)
    probabilities2: np.ndarray
    diagnostics: dict

    @property
    def probability_gap(self) -> float:
        return float(np.max(np.abs(self.probabilities1 - self.probabilities2)))

    def to_json(self) -> dict:
        from .formats import encode_vector

        return {
            "R1": self.R1.tolist(),
            "R2": self.R2.tolist(),
            "omega1": encode_vector(self.omega1),
            "omega2": encode_vector(self.omega2),
            "f_residual": self.f_residual,
            "state_overlap": self.state_overlap,
            "probabilities1": self.probabilities1.tolist(),
            "probabilities2": self.probabilities2.tolist(),
            "probability_gap": self.probability_gap,
            "diagnostics": self.diagnostics,
        }


class CollisionNotFound(RuntimeError):
    pass


def bloch_projection(n) -> np.ndarray:
    """(I + n . sigma) / 2."""
    return (np.eye(2) + dot_sigma(as_direction(n))) / 2


def bloch_eigvecs(n) -> tuple[np.ndarray, np.ndarray]:
    """Unit eigenvectors of n . sigma for +1 and -1, with a fixed phase convention."""
    nx, ny, nz = as_direction(n)
    if nz >= 0:
        s = np.sqrt(2 * (1 + nz))
        plus = np.array([1 + nz, nx + 1j * ny]) / s
        minus = np.array([-(nx - 1j * ny), 1 + nz]) / s
    else:
        s = np.sqrt(2 * (1 - nz))
        plus = np.array([nx - 1j * ny, 1 - nz]) / s
        minus = np.array([1 - nz, -(nx + 1j * ny)]) / s
    return plus, minus


def product_basis(pair: BlochPair) -> OrthonormalBasis:
    a = bloch_eigvecs(pair.m)
    b = bloch_eigvecs(pair.n)
    return OrthonormalBasis(np.array([np.kron(u, v) for u in a for v in b]))


def product_bases(pairs) -> list[OrthonormalBasis]:
    return [product_basis(p) for p in _as_pairs(pairs)]


def sigma_operators(pair: BlochPair) -> list[np.ndarray]:
    """m.sigma (x) I, I (x) n.sigma, m.sigma (x) n.sigma."""
    ms, ns = dot_sigma(pair.m), dot_sigma(pair.n)
    I2 = np.eye(2)
    return [np.kron(ms, I2), np.kron(I2, ns), np.kron(ms, ns)]


def _as_pairs(pairs) -> list[BlochPair]:
    out = [p if isinstance(p, BlochPair) else BlochPair(*p) for p in pairs]
    if len(out) != 4:
        raise ValueError(f"expected four Bloch pairs, got {len(out)}")
    return out


def _check_unitary(U, tol: float) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(2))) > tol:
        raise ValueError("matrix is not unitary")
    return U


def max_entangled_state(U, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    U = _check_unitary(U, tols.tol_unit)
    return np.kron(U, np.eye(2)) @ OMEGA0


def rotation_of_unitary(U, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """R_U with U* (x . sigma) U = (R_U x) . sigma for all real x.

    Entrywise (R_U)_{ab} = tr(sigma_a U* sigma_b U) / 2.  With this
    convention R_{UV} = R_V R_U.
    """
    U = _check_unitary(U, tols.tol_unit)
    if abs(np.linalg.det(U) - 1) > 1e-8:
        raise ValueError("expected a special unitary matrix (det U = 1)")
    conj = np.einsum("ij,bjk,kl->bil", U.conj().T, PAULIS, U)
    return np.einsum("aji,bij->ab", PAULIS, conj).real / 2


def su2_of_quaternion(q) -> np.ndarray:
    """q0 I - i (q1 sx + q2 sy + q3 sz) for a unit quaternion q."""
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q)
    return q[0] * np.eye(2) - 1j * np.tensordot(q[1:], PAULIS, axes=1)


def h_literal(pairs, A) -> np.ndarray:
    """h_j(A) = tr(((A m_j) . sigma (x) n_j . sigma) |Omega_0><Omega_0|)."""
    A = np.asarray(A, dtype=float)
    out = np.empty(4)
    for j, p in enumerate(_as_pairs(pairs)):
        op = np.kron(dot_sigma(A @ p.m), dot_sigma(p.n))
        out[j] = np.vdot(OMEGA0, op @ OMEGA0).real
    return out


_FLIP = np.array([1.0, -1.0, 1.0])


def h_fast(pairs, A) -> np.ndarray:
    """h_j(A) = n~_j^T A m_j with n~ = (n_x, -n_y, n_z)."""
    pairs = _as_pairs(pairs)
    Mv = np.array([p.m for p in pairs])
    Nt = np.array([p.n for p in pairs]) * _FLIP
    return np.einsum("ja,ab,jb->j", Nt, np.asarray(A, dtype=float), Mv)


@functools.lru_cache(maxsize=1)
def verify_fast_path(samples: int = 1000, seed: int = 20240501) -> float:
    """Largest disagreement between h_fast and h_literal on random inputs.

    Raises if the two formulas disagree beyond 1e-12.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        dirs = rng.standard_normal((8, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pairs = [BlochPair(dirs[2 * j], dirs[2 * j + 1]) for j in range(4)]
        A = rng.standard_normal((3, 3))
        worst = max(worst, float(np.max(np.abs(h_fast(pairs, A) - h_literal(pairs, A)))))
    if worst > 1e-12:
        raise AssertionError(f"h fast path disagrees with the trace formula by {worst:.3e}")
    return worst


def h_functionals(pairs, A, fast: bool = False) -> np.ndarray:
    if fast:
        verify_fast_path()
        return h_fast(pairs, A)
    return h_literal(pairs, A)


def _probabilities(bases, psi) -> np.ndarray:
    V = np.stack([b.vectors for b in bases])
    return np.abs(V.conj() @ psi) ** 2


@dataclass(frozen=True)
class _Attempt:
    objective: float
    index: int
    q1: np.ndarray
    q2: np.ndarray

    @property
    def overlap(self) -> float:
        # |<omega_1, omega_2>| = |q1 . q2|
        return float(abs(self.q1 @ self.q2))


def _attempt(pairs, seq, index, separation) -> _Attempt:
    rng = np.random.default_rng(seq)
    Mv = np.array([p.m for p in pairs])
    Nt = np.array([p.n for p in pairs]) * _FLIP
    bound = 1 - 2 * separation

    def rot(q):
        return rotation_of_unitary(su2_of_quaternion(q))

    def resid(v):
        v1, v2 = v[:4], v[4:]
        q1, q2 = v1 / np.linalg.norm(v1), v2 / np.linalg.norm(v2)
        diff = np.einsum("ja,ab,jb->j", Nt, rot(q1) - rot(q2), Mv)
        excess = max(0.0, abs(q1 @ q2) - bound)
        return np.concatenate(
            [diff, [10.0 * excess, np.linalg.norm(v1) - 1, np.linalg.norm(v2) - 1]]
        )

    v0 = rng.standard_normal(8)
    v0[:4] /= np.linalg.norm(v0[:4])
    v0[4:] /= np.linalg.norm(v0[4:])
    sol = least_squares(resid, v0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    q1 = sol.x[:4] / np.linalg.norm(sol.x[:4])
    q2 = sol.x[4:] / np.linalg.norm(sol.x[4:])
    r = resid(np.concatenate([q1, q2]))
    obj = float(np.max(np.abs(r[:4])))
    if abs(q1 @ q2) > 1 - separation:
        obj = np.inf
    return _Attempt(obj, index, q1, q2)


def find_entangled_collision(
    pairs,
    seed: int = 0,
    restarts: int = 64,
    separation: float = 1e-3,
    tols: Tolerances = DEFAULT_TOLS,
) -> CollisionResult:
    """Two maximally entangled states with identical statistics in four product bases.

    Restarts run in chunks; in the first chunk with a success the pair of
    smallest overlap is returned.  Raises CollisionNotFound when no restart
    reaches ||f(R1) - f(R2)||_inf < tol_zero with overlap at most
    1 - separation.
    """
    if not separation > 0:
        raise ValueError("separation must be positive")
    pairs = _as_pairs(pairs)
    verify_fast_path()
    children = np.random.SeedSequence(seed).spawn(restarts)
    threads = _threads()
    best = None
    used = 0
    for start in range(0, restarts, _CHUNK):
        idx = list(range(start, min(start + _CHUNK, restarts)))
        run = lambda i: _attempt(pairs, children[i], i, separation)  # noqa: E731
        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(threads) as pool:
                results = list(pool.map(run, idx))
        else:
            results = [run(i) for i in idx]
        used = idx[-1] + 1
        hits = [a for a in results if a.objective < tols.tol_zero]
        if hits:
            # Among successes prefer the most separated pair.
            best = min(hits, key=lambda a: (a.overlap, a.index))
            break
        chunk_best = min(results, key=lambda a: (a.objective, a.index))
        if best is None or chunk_best.objective < best.objective:
            best = chunk_best
    if best is None or not best.objective < tols.tol_zero:
        raise CollisionNotFound(
            f"no collision found in {used} restarts (best residual {None if best is None else best.objective})"
        )
    U1, U2 = su2_of_quaternion(best.q1), su2_of_quaternion(best.q2)
    R1, R2 = rotation_of_unitary(U1), rotation_of_unitary(U2)
    omega1, omega2 = max_entangled_state(U1), max_entangled_state(U2)
    f_res = float(np.max(np.abs(h_fast(pairs, R1) - h_fast(pairs, R2))))
    bases = product_bases(pairs)
    p1, p2 = _probabilities(bases, omega1), _probabilities(bases, omega2)
    gap = float(np.max(np.abs(p1 - p2)))
    if gap > tols.tol_zero:
        raise CollisionNotFound(f"rotation collision found but probabilities differ by {gap:.3e}")
    assert gap == pair_residual(bases, omega1, omega2)
    return CollisionResult(
        R1=R1, R2=R2, omega1=omega1, omega2=omega2,
        f_residual=f_res,
        state_overlap=float(abs(np.vdot(omega1, omega2))),
        probabilities1=p1, probabilities2=p2,
        diagnostics={"restarts_used": used, "winning_restart": best.index, "seed": seed},
    )
