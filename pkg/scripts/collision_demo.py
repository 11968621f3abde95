"""Find two maximally entangled two-qubit states that four random product bases cannot tell apart."""

import argparse

import numpy as np

from pureic.product4 import BlochPair, find_entangled_collision


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--configs", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    np.set_printoptions(precision=4, suppress=True)
    for k in range(args.configs):
        dirs = rng.standard_normal((8, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pairs = [BlochPair(dirs[2 * j], dirs[2 * j + 1]) for j in range(4)]
        res = find_entangled_collision(pairs, seed=k)
        print(f"config {k}: overlap {res.state_overlap:.4f}, probability gap {res.probability_gap:.1e}")
        print("  R1 =", res.R1.round(4).tolist())
        print("  R2 =", res.R2.round(4).tolist())


if __name__ == "__main__":
    main()
