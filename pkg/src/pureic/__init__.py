"""Pure-state informational completeness of orthonormal bases."""

from .criterion import (
    Status,
    Verdict,
    WitnessPair,
    certify_pure_ic,
    check_d3_four_bases,
    distinguishes,
    two_basis_counterexample,
    witness_search,
)
from .jaming import JamingConfig, jaming_bases, reconstruct_pure_state, simulate_probabilities
from .qlinalg import OrthonormalBasis, Tolerances, projections_of, selfadjoint_complement

__version__ = "0.1.0"
