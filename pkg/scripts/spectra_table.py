"""Lowest radial eigenvalues of the Witten tower and the wormhole against mass.

Prints lambda_{n,k} - (1 + n^2 + M^2) for the Witten sectors (positive by the
Hardy inequality) and lambda_k for the wormhole.
"""

import argparse

import numpy as np

from bubblewaves.spectral import RadialOperatorSpec, solve_discrete


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--masses", default="0.5,1,2,4")
    p.add_argument("--count", type=int, default=4)
    args = p.parse_args()
    masses = [float(m) for m in args.masses.split(",")]
    print("witten: lambda_{n,k} - (1 + n^2 + M^2)")
    for M in masses:
        for n in (0, 1, 2):
            lam = solve_discrete(RadialOperatorSpec("witten", M, n), args.count).eigenvalues
            gap = lam - (1 + n * n + M * M)
            print(f"  M={M:4.2f} n={n}  " + "  ".join(f"{g:10.6f}" for g in gap))
    print("wormhole: lambda_k")
    for M in masses:
        lam = solve_discrete(RadialOperatorSpec("wormhole", M), args.count).eigenvalues
        print(f"  M={M:4.2f}      " + "  ".join(f"{v:10.6f}" for v in lam))
        spacing = np.diff(lam)
        print(f"           spacing {spacing.min():.4f} .. {spacing.max():.4f}")


if __name__ == "__main__":
    main()
