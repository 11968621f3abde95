"""Print the operator and basis count bounds for d = 2..N as markdown."""

import argparse

from pureic.bounds import bounds_table, f_minimizer


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("n", type=int, nargs="?", default=12)
    args = ap.parse_args()
    print("| d | alpha | s_d | 3(d-1) | b_lower | f(d) | branch |")
    print("|---|---|---|---|---|---|---|")
    for r in bounds_table(args.n):
        print(
            f"| {r.d} | {r.alpha_ones} | {r.s_lower} | {r.three_bases_capacity} | "
            f"{r.b_lower} | {r.f_value:.4f} | {r.s_branch} |"
        )
    print(f"\nf is minimal at x = {f_minimizer():.12f}")


if __name__ == "__main__":
    main()
