"""Massless wormhole packets cross to the other sheet; massive ones stay trapped.

Prints the fraction of the norm on each sheet against time for a one-sided
massless packet, then the far-field mass of the massive control.
"""

import argparse

import numpy as np

from bubblewaves import fields


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--eps", type=int, default=-1, choices=(-1, 1))
    args = p.parse_args()
    print("   t   entering-sheet fraction")
    for t in (0.0, 5.0, 10.0, 15.0, 20.0, 25.0):
        if t == 0.0:
            x, _ = fields.traversal_grid()
            f, _ = fields.one_sided_packet(x, args.eps)
            frac = np.sum(np.abs(f[np.sign(x) == args.eps]) ** 2) / np.sum(np.abs(f) ** 2)
        else:
            frac = fields.traversability_check(l=args.l, eps=args.eps, t_final=t).leakage
        print(f"{t:5.1f}   {frac:.3e}")
    rep = fields.massive_confinement(l=args.l)
    print(f"massive control: {rep.status}, far-field mass {rep.detail['far_mass']:.2e}")


if __name__ == "__main__":
    main()
