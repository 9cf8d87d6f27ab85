"""In/out amplitudes of a random Witten tower: phases, energies and isometry.

Every mode scatters by a unimodular phase, l = 0 modes pass unchanged, and the
asymptotic energy is the same at both ends.
"""

import argparse

import numpy as np

from bubblewaves import desitter, fields


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modes", type=int, default=8)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    spectra = fields.tower_spectra("witten", args.mass, (0, 1), count=4)
    entries = {}
    for _ in range(args.modes):
        n, k, l = int(rng.integers(0, 2)), int(rng.integers(0, 4)), int(rng.integers(0, 5))
        m = int(rng.integers(-l, l + 1))
        entries[(n, k, l, m)] = tuple(complex(*rng.normal(size=2)) for _ in range(2))
    coefs = fields.ModeCoefficients("witten", args.mass, spectra, entries)
    amps = fields.wave_operators(coefs)
    print(" n k l  m      mu    arg S+      |w_out+|/|w_in+|")
    for key in sorted(amps):
        n, k, l, m = key
        mu = coefs.mu(n, k)
        phase = desitter.amplitude_phase(l, mu)
        a = amps[key]
        print(f" {n} {k} {l} {m:2d}  {mu:7.4f}  {np.angle(phase):+.6f}  {abs(a.w_out_plus) / abs(a.w_in_plus):.15f}")
    e_in, e_out = fields.asymptotic_energy(coefs, amps, "in"), fields.asymptotic_energy(coefs, amps, "out")
    d_in = fields.asymptotic_data(coefs, amps, "in")
    d_out = fields.scattering(d_in)
    print(f"E_in = {e_in:.15e}  E_out = {e_out:.15e}")
    print(f"weighted-norm defect {abs(fields.weighted_norm(d_out) / fields.weighted_norm(d_in) - 1):.2e}")
    for T in (2.0, 5.0, 10.0):
        d = fields.difference(fields.synthesize(coefs, T, "profile"), fields.free_profile(coefs, amps, T, "out"))
        print(f"t={T:4.1f}  E(v - v_out)/E_out = {fields.energy(d, coefs, 'asymptotic') / e_out:.3e}")


if __name__ == "__main__":
    main()
