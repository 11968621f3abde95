"""Probe the unresolved case: do three random bases in d = 4 fail to be IC?

For each random triple the witness search either finds two pure states
with equal statistics (NotIC) or gives up (Inconclusive).  The smallest
objective reached is reported so near misses are visible.
"""

import argparse
import time

import numpy as np

from pureic.criterion import witness_search
from pureic.jaming import JamingConfig, jaming_bases
from pureic.qlinalg import projections_of, random_basis, selfadjoint_complement


def probe(bases, restarts, seed):
    projs = projections_of(bases)
    comp = selfadjoint_complement(projs)
    info = {}
    w = witness_search(comp, restarts=restarts, seed=seed, projs=projs, info=info)
    return len(comp), w, info


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--restarts", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    found = 0
    t0 = time.perf_counter()
    for i in range(args.trials):
        bases = [random_basis(4, rng) for _ in range(3)]
        dim, w, info = probe(bases, args.restarts, args.seed + i)
        status = "NotIC" if w is not None else "Inconclusive"
        found += w is not None
        extra = f"residual {w.residual:.1e}, overlap {w.overlap:.3f}" if w else f"min objective {info['min_objective']:.2e}"
        print(f"trial {i:3d}: complement dim {dim}, {status}, restarts {info['restarts_used']}, {extra}")
    print(f"\n{found}/{args.trials} random triples have a witness ({time.perf_counter() - t0:.1f}s)")

    # Three of the four polynomial bases, for comparison.
    for drop in range(4):
        bases = [b for k, b in enumerate(jaming_bases(JamingConfig.of(4))) if k != drop]
        dim, w, info = probe(bases, args.restarts, args.seed)
        print(f"polynomial bases without #{drop + 1}: dim {dim}, {'NotIC' if w else 'Inconclusive'}")


if __name__ == "__main__":
    main()
