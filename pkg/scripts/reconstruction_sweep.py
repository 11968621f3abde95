"""Reconstruction accuracy against dimension for each polynomial family."""

import argparse
import time

import numpy as np

from pureic.jaming import KINDS, JamingConfig, jaming_bases, reconstruct_pure_state, simulate_probabilities
from pureic.qlinalg import random_ket


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dmax", type=int, default=10)
    ap.add_argument("--states", type=int, default=100)
    ap.add_argument("--no-refine", action="store_true")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print("family     d  max(1-F)   seconds")
    for kind in KINDS:
        for d in range(2, args.dmax + 1):
            config = JamingConfig.of(d, kind)
            bases = jaming_bases(config)
            t0 = time.perf_counter()
            worst = 0.0
            for _ in range(args.states):
                psi = random_ket(d, rng)
                try:
                    got = reconstruct_pure_state(
                        simulate_probabilities(bases, psi), config, refine=not args.no_refine
                    )
                    worst = max(worst, 1 - abs(np.vdot(psi, got)) ** 2)
                except ValueError:
                    worst = 1.0
            print(f"{kind:9s} {d:2d}  {worst:.2e}  {time.perf_counter() - t0:.3f}")


if __name__ == "__main__":
    main()
