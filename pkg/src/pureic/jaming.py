"""Four bases from orthogonal polynomials, and pure-state recovery from their statistics.

A family of orthogonal polynomials is stored by its three-term recurrence

    p_{k+1}(x) = (a_k x + b_k) p_k(x) - c_k p_{k-1}(x),   p_{-1} = 0,  p_0 = const.

The first two bases are the normalized vectors (p_0(z), ..., p_{d-1}(z)) at
the roots of p_d and of p_{d-1} (the latter completed by e_d); the other two
carry the extra phases e^{i k alpha}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal, lu_factor, lu_solve
from scipy.optimize import least_squares

from .qlinalg import DEFAULT_TOLS, OrthonormalBasis, Tolerances, as_ket

KINDS = ("hermite", "legendre", "chebyshev")


class InconsistentDataError(ValueError):
    """Probability data not produced by any pure state through the given bases."""


@dataclass(frozen=True)
class OrthoPolyFamily:
    """Polynomials p_0 .. p_{count-1} given by recurrence coefficients.

    ``a``, ``b``, ``c`` have length ``count - 1``; entry k produces p_{k+1}.
    ``c[0]`` is ignored.  ``p0`` is the constant value of p_0.
    """

    kind: str
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    p0: float = 1.0
    weight: str = field(default="", compare=False)

    def __post_init__(self):
        for name in ("a", "b", "c"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.a) == len(self.b) == len(self.c)):
            raise ValueError("recurrence lists must have equal length")
        if self.p0 == 0 or np.any(self.a == 0):
            raise ValueError("leading coefficients must be nonzero")

    @property
    def count(self) -> int:
        return len(self.a) + 1

    @property
    def leading(self) -> np.ndarray:
        """Leading coefficients c_0, ..., c_{count-1}."""
        return self.p0 * np.concatenate([[1.0], np.cumprod(self.a)])


def hermite(count: int) -> OrthoPolyFamily:
    """Normalized Hermite polynomials, orthonormal for exp(-x^2)/sqrt(pi) on the real line."""
    k = np.arange(count - 1)
    return OrthoPolyFamily(
        "hermite",
        a=np.sqrt(2.0 / (k + 1)),
        b=np.zeros(count - 1),
        c=np.sqrt(k / (k + 1.0)),
        weight="exp(-x^2)/sqrt(pi) on (-inf, inf)",
    )


def legendre(count: int) -> OrthoPolyFamily:
    """sqrt(2n+1) P_n, orthonormal for the weight 1/2 on [-1, 1]."""
    k = np.arange(count - 1, dtype=float)
    # x p_k = beta_{k+1} p_{k+1} + beta_k p_{k-1}, beta_k = k / sqrt(4k^2 - 1)
    beta_next = (k + 1) / np.sqrt(4 * (k + 1) ** 2 - 1)
    beta = np.where(k > 0, k / np.sqrt(np.maximum(4 * k**2 - 1, 1)), 0.0)
    return OrthoPolyFamily(
        "legendre", a=1 / beta_next, b=np.zeros(count - 1), c=beta / beta_next,
        weight="1/2 on [-1, 1]",
    )


def chebyshev(count: int) -> OrthoPolyFamily:
    """p_0 = 1, p_n = sqrt(2) T_n, orthonormal for 1/(pi sqrt(1-x^2)) on [-1, 1]."""
    k = np.arange(count - 1)
    beta_next = np.where(k == 0, 1 / np.sqrt(2), 0.5)
    beta = np.where(k == 0, 0.0, np.where(k == 1, 1 / np.sqrt(2), 0.5))
    return OrthoPolyFamily(
        "chebyshev", a=1 / beta_next, b=np.zeros(count - 1), c=beta / beta_next,
        weight="1/(pi sqrt(1-x^2)) on [-1, 1]",
    )


def family(kind: str, count: int) -> OrthoPolyFamily:
    builders = {"hermite": hermite, "legendre": legendre, "chebyshev": chebyshev}
    if kind not in builders:
        raise ValueError(f"unknown family {kind!r}; choose from {', '.join(KINDS)}")
    if count < 2:
        raise ValueError("a family needs at least two polynomials")
    return builders[kind](count)


def poly_values(fam: OrthoPolyFamily, n_max: int, x) -> np.ndarray:
    """Array of shape (n_max + 1, *x.shape) holding p_0(x) .. p_{n_max}(x)."""
    if n_max >= fam.count or n_max < 0:
        raise IndexError(f"polynomial index {n_max} out of range for a family of {fam.count}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = fam.p0
    if n_max >= 1:
        out[1] = (fam.a[0] * x + fam.b[0]) * out[0]
    for k in range(1, n_max):
        out[k + 1] = (fam.a[k] * x + fam.b[k]) * out[k] - fam.c[k] * out[k - 1]
    return out


def poly_eval(fam: OrthoPolyFamily, n: int, x):
    """p_n(x) by forward recurrence."""
    if n < 0:
        raise IndexError("polynomial index must be nonnegative")
    v = poly_values(fam, n, x)[n]
    return float(v) if v.ndim == 0 else v


def jacobi_matrix(fam: OrthoPolyFamily, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the symmetric n x n Jacobi matrix."""
    if n < 1 or n >= fam.count:
        raise IndexError(f"need 1 <= n < {fam.count}, got {n}")
    a, b, c = fam.a, fam.b, fam.c
    diag = -b[:n] / a[:n]
    prod = c[1:n] / (a[: n - 1] * a[1:n])
    if np.any(prod <= 0):
        raise ValueError("degenerate recurrence: off-diagonal products must be positive")
    return diag, np.sqrt(prod)


def poly_roots(fam: OrthoPolyFamily, n: int) -> np.ndarray:
    """The n real roots of p_n in increasing order (Jacobi matrix eigenvalues)."""
    diag, off = jacobi_matrix(fam, n)
    if n == 1:
        return diag.copy()
    return np.sort(eigh_tridiagonal(diag, off, eigvals_only=True))


def christoffel_darboux_residual(fam: OrthoPolyFamily, n: int, x: float, y: float) -> float:
    if x == y:
        raise ValueError("the Christoffel-Darboux formula requires x != y")
    if n + 1 >= fam.count:
        raise IndexError(f"need n + 1 < {fam.count}")
    px = poly_values(fam, n + 1, x)
    py = poly_values(fam, n + 1, y)
    lhs = float(np.dot(px[: n + 1], py[: n + 1]))
    lead = fam.leading
    rhs = lead[n] / lead[n + 1] * (px[n + 1] * py[n] - px[n] * py[n + 1]) / (x - y)
    return abs(lhs - float(rhs))


# --- the four bases --------------------------------------------------------


@dataclass(frozen=True)
class JamingConfig:
    """Dimension, polynomial family and twist phase.

    ``alpha`` must not be a rational multiple of pi; the default 1.0 rad
    satisfies this since pi is irrational.
    """

    dim: int
    family: OrthoPolyFamily | None = None
    alpha: float = 1.0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        if self.family is None:
            object.__setattr__(self, "family", hermite(2 * self.dim))
        if self.family.count < self.dim + 1:
            raise ValueError(
                f"family has {self.family.count} polynomials; dimension {self.dim} needs {self.dim + 1}"
            )

    @classmethod
    def of(cls, dim: int, kind: str = "hermite", alpha: float = 1.0) -> "JamingConfig":
        return cls(dim, family(kind, 2 * dim), alpha)


@dataclass(frozen=True)
class _Nodes:
    x: np.ndarray  # roots of p_d
    y: np.ndarray  # roots of p_{d-1}
    vx: np.ndarray  # (d, d): row j = (p_0(x_j), ..., p_{d-1}(x_j))
    vy: np.ndarray  # (d-1, d)


def _nodes(config: JamingConfig) -> _Nodes:
    d, fam = config.dim, config.family
    x = poly_roots(fam, d)
    y = poly_roots(fam, d - 1)
    vx = poly_values(fam, d - 1, x).T
    vy = poly_values(fam, d - 1, y).T
    vy[:, -1] = 0.0  # p_{d-1}(y_j) = 0 exactly
    return _Nodes(x, y, vx, vy)


def _normalize_rows(V: np.ndarray) -> np.ndarray:
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def jaming_bases(config: JamingConfig) -> list[OrthonormalBasis]:
    d = config.dim
    nd = _nodes(config)
    phase = np.exp(1j * config.alpha * np.arange(d))
    e_last = np.zeros((1, d))
    e_last[0, -1] = 1.0
    B1 = _normalize_rows(nd.vx)
    B2 = np.vstack([_normalize_rows(nd.vy), e_last])
    B3 = _normalize_rows(nd.vx * phase)
    B4 = np.vstack([_normalize_rows(nd.vy * phase), e_last])
    return [OrthonormalBasis(B.astype(complex), tol=1e-8) for B in (B1, B2, B3, B4)]


# --- statistics --------------------------------------------------------------


@dataclass(frozen=True)
class ProbabilityData:
    """Outcome probabilities, one row per basis."""

    table: np.ndarray
    alpha: float = 1.0
    family: str = "hermite"
    tol: float = field(default=DEFAULT_TOLS.tol_unit, compare=False, repr=False)

    def __post_init__(self):
        T = np.array(self.table, dtype=float)
        if T.ndim != 2 or T.shape[0] != 4:
            raise ValueError(f"probability table must have 4 rows, got shape {T.shape}")
        if not np.all(np.isfinite(T)) or np.any(T < -self.tol):
            raise ValueError("probabilities must be finite and nonnegative")
        dev = np.max(np.abs(T.sum(axis=1) - 1.0))
        if dev > self.tol:
            raise ValueError(f"probability rows must sum to 1 (deviation {dev:.3e})")
        T.setflags(write=False)
        object.__setattr__(self, "table", T)

    @property
    def dim(self) -> int:
        return self.table.shape[1]


def simulate_probabilities(bases, psi, tols: Tolerances = DEFAULT_TOLS, *, alpha=1.0, family="hermite") -> ProbabilityData:
    bases = list(bases)
    psi = as_ket(psi, tols)
    if any(b.dim != psi.size for b in bases):
        raise ValueError("state dimension does not match the bases")
    V = np.stack([b.vectors for b in bases])
    table = np.abs(V.conj() @ psi) ** 2
    return ProbabilityData(table, alpha=alpha, family=family)


# --- reconstruction ----------------------------------------------------------


class _Interpolator:
    """Top coefficients of polynomials of degree <= 2d-2 known at the 2d-1 nodes.

    Values are expanded in the family's own basis p_0..p_{2d-2} when it is
    long enough (well conditioned at these nodes), else in monomials.
    """

    def __init__(self, fam: OrthoPolyFamily, z: np.ndarray):
        n = len(z)
        self.lead = fam.leading
        if fam.count >= n:
            V = poly_values(fam, n - 1, z).T
            self.scale = fam.leading[:n]
        else:
            s = max(1.0, float(np.max(np.abs(z))))
            V = np.vander(z / s, n, increasing=True)
            self.scale = s ** -np.arange(n, dtype=float)
        self.lu = lu_factor(V)

    def coefficient(self, values: np.ndarray, degree: int) -> float:
        """Monomial coefficient of z^degree, assuming nothing of higher degree."""
        g = lu_solve(self.lu, values)
        return float(g[degree] * self.scale[degree])


def _fix_phase(xi: np.ndarray, thr: float) -> np.ndarray:
    nz = np.flatnonzero(np.abs(xi) > thr)
    if nz.size == 0:
        return xi
    k = nz[0]
    return xi * (abs(xi[k]) / xi[k])


def _induction(Fv, Gv, nodes_p, interp, lead, alpha, d, zero_thr):
    """Amplitudes xi_0..xi_{d-1} from the values of F = |q|^2 and G = |q_alpha|^2."""
    phase = np.exp(-1j * alpha * np.arange(d))
    xi = np.zeros(d, dtype=complex)
    e = d
    while e > 0:
        top = interp.coefficient(Fv, 2 * e - 2)
        mod2 = top / lead[e - 1] ** 2
        if mod2 > zero_thr:
            break
        e -= 1  # trailing amplitude vanishes: truncate
    if e == 0:
        raise InconsistentDataError("statistics do not determine a nonzero amplitude")
    xi[e - 1] = np.sqrt(mod2)
    for n in range(1, e):
        deg = 2 * e - 2 - n
        Fk = np.abs(nodes_p @ xi) ** 2
        Gk = np.abs(nodes_p @ (phase * xi)) ** 2
        denom = 2 * lead[e - 1] * lead[e - 1 - n]
        re_u = interp.coefficient(Fv - Fk, deg) / denom
        re_ut = interp.coefficient(Gv - Gk, deg) / denom
        s = np.sin(n * alpha)
        if abs(s) < 1e-12:
            raise ValueError(f"alpha is too close to a rational multiple of pi (sin({n} alpha) = {s:.2e})")
        im_u = (re_ut - re_u * np.cos(n * alpha)) / s
        u = re_u + 1j * im_u  # xi_{e-1} * conj(xi_{e-1-n})
        xi[e - 1 - n] = np.conj(u) / xi[e - 1]
    return xi


def _refine(xi: np.ndarray, V: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Gauss-Newton polish of the amplitudes against the full probability table."""
    d = xi.size

    def resid(v):
        psi = v[:d] + 1j * v[d:]
        return (np.abs(V @ psi) ** 2 - target).ravel()

    sol = least_squares(
        resid, np.concatenate([xi.real, xi.imag]), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15
    )
    return sol.x[:d] + 1j * sol.x[d:]


def reconstruct_pure_state(
    data: ProbabilityData,
    config: JamingConfig,
    tols: Tolerances = DEFAULT_TOLS,
    max_residual: float = 1e-8,
    refine: bool = True,
) -> np.ndarray:
    """Unit vector reproducing ``data`` through the bases of ``config``.

    The amplitudes are recovered from the top down, as the coefficients of
    the interpolated statistics polynomials are peeled off degree by
    degree.  Trailing amplitudes that vanish shorten the recursion.  The
    global phase makes the first nonzero amplitude real and positive.

    Raises InconsistentDataError when the reconstructed state does not
    reproduce the table within ``max_residual`` (max norm).
    """
    d = config.dim
    if data.dim != d:
        raise ValueError(f"data has dimension {data.dim}, config has {d}")
    nd = _nodes(config)
    z = np.concatenate([nd.x, nd.y])
    nodes_p = np.vstack([nd.vx, nd.vy])  # row i: p_k(z_i), k < d
    norms = np.sum(nodes_p**2, axis=1)
    T = data.table
    Fv = np.concatenate([T[0], T[1, : d - 1]]) * norms
    Gv = np.concatenate([T[2], T[3, : d - 1]]) * norms
    interp = _Interpolator(config.family, z)
    xi = _induction(Fv, Gv, nodes_p, interp, config.family.leading, config.alpha, d, tols.tol_zero)

    bases = jaming_bases(config)
    V = np.stack([b.vectors for b in bases]).conj()
    if refine and np.max(np.abs(np.abs(V @ xi) ** 2 - T)) > 1e-13:
        xi = _refine(xi, V, T)
    nrm = np.linalg.norm(xi)
    if not np.isfinite(nrm) or nrm == 0:
        raise InconsistentDataError("reconstruction failed to produce a finite state")
    xi = _fix_phase(xi / nrm, np.sqrt(tols.tol_zero))
    residual = float(np.max(np.abs(np.abs(V @ xi) ** 2 - T)))
    if residual > max_residual:
        raise InconsistentDataError(
            f"statistics are inconsistent with a pure state (residual {residual:.3e})"
        )
    return xi
