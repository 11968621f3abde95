"""Lower bounds on the number of operators and bases that determine pure states.

``s`` counts selfadjoint operators, ``b`` orthonormal bases.  Each basis
contributes at most d - 1 independent operators, so (d - 1) b >= s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def binary_ones(d: int) -> int:
    """Number of 1s in the binary expansion of d - 1."""
    return bin(_check_dim(d) - 1).count("1")


def s_lower_branches(d: int) -> dict[str, int]:
    """Every applicable branch of the operator-count bound, keyed by its condition."""
    d = _check_dim(d)
    a = binary_ones(d)
    out = {"all d": 4 * d - 2 * a - 3}
    if d % 2 == 1 and a % 4 == 2:
        out["d odd, alpha = 2 mod 4"] = 4 * d - 2 * a - 2
    if d % 2 == 1 and a % 4 == 3:
        out["d odd, alpha = 3 mod 4"] = 4 * d - 2 * a - 1
    return out


def s_lower_bound(d: int) -> int:
    return max(s_lower_branches(d).values())


def b_lower_bound(d: int) -> int:
    d = _check_dim(d)
    return -(-s_lower_bound(d) // (d - 1))


def f_of(x: float) -> float:
    """4 - (2 log2(x - 1) + 1) / (x - 1), a real lower bound on b."""
    if not x > 1:
        raise ValueError("f is defined for x > 1")
    t = x - 1
    return 4 - (2 * math.log2(t) + 1) / t


def f_prime(x: float) -> float:
    if not x > 1:
        raise ValueError("f is defined for x > 1")
    t = x - 1
    return (2 * math.log2(t) + 1 - 2 / math.log(2)) / t**2


def f_minimizer() -> float:
    """Unique zero of f' on (1, inf), found numerically."""
    return brentq(f_prime, 1.5, 10.0, xtol=1e-14)


F_MINIMIZER_CLOSED_FORM = 1 + math.e / math.sqrt(2)


def known_answer(d: int) -> tuple[str, tuple[int, ...]]:
    """Minimal number of bases: ``("exactly", (k,))`` or ``("range", (3, 4))``."""
    d = _check_dim(d)
    if d == 2:
        return ("exactly", (3,))
    if d == 4:
        return ("range", (3, 4))
    return ("exactly", (4,))


@dataclass(frozen=True)
class BoundsReport:
    d: int
    alpha_ones: int
    s_lower: int
    b_lower: int
    f_value: float
    known_answer: tuple[str, tuple[int, ...]]
    s_branch: str

    @property
    def three_bases_capacity(self) -> int:
        """3 (d - 1): operators available from three bases."""
        return 3 * (self.d - 1)

    def to_json(self) -> dict:
        kind, vals = self.known_answer
        return {
            "d": self.d,
            "alpha_ones": self.alpha_ones,
            "s_lower": self.s_lower,
            "three_bases_capacity": self.three_bases_capacity,
            "b_lower": self.b_lower,
            "f_value": self.f_value,
            "s_branch": self.s_branch,
            "known_answer": {"kind": kind, "values": list(vals)},
        }


def bounds_report(d: int) -> BoundsReport:
    d = _check_dim(d)
    branches = s_lower_branches(d)
    branch = max(branches, key=branches.get)
    return BoundsReport(
        d=d,
        alpha_ones=binary_ones(d),
        s_lower=branches[branch],
        b_lower=b_lower_bound(d),
        f_value=f_of(d),
        known_answer=known_answer(d),
        s_branch=branch,
    )


def bounds_table(d_max: int) -> list[BoundsReport]:
    return [bounds_report(d) for d in range(2, _check_dim(d_max) + 1)]


def markdown_table(rows: list[BoundsReport]) -> str:
    lines = ["| d | s_d | 3(d-1) |", "|---|---|---|"]
    lines += [f"| {r.d} | {r.s_lower} | {r.three_bases_capacity} |" for r in rows]
    return "\n".join(lines) + "\n"
