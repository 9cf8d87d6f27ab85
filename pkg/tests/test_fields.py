import mpmath as mp
import numpy as np
import pytest

from bubblewaves import desitter, fields, spectral
from bubblewaves.errors import ConvergenceError, DomainError
from bubblewaves.fields import AsymptoticData, ModeCoefficients


def _rc(rng, n=None):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


@pytest.fixture
def field3(witten_spectra, rng):
    keys = [(0, 0, 0, 0), (0, 1, 1, 0), (1, 0, 2, 1), (1, 2, 1, -1)]
    return ModeCoefficients("witten", 1.0, witten_spectra, {k: (complex(_rc(rng)), complex(_rc(rng))) for k in keys})


@pytest.fixture
def worm3(wormhole_spectra, rng):
    keys = [(0, 0, 0, 0), (0, 1, 1, 1), (0, 3, 2, 0)]
    return ModeCoefficients("wormhole", 1.0, wormhole_spectra, {k: (complex(_rc(rng)), complex(_rc(rng))) for k in keys})


def _coefficient(sp, values, k):
    return complex(sp.eigenvectors[:, k] @ (sp.weights * values))


class TestAnalysis:
    @pytest.mark.parametrize("kind", ["field", "profile"])
    def test_round_trip_witten(self, witten_spectra, rng, kind):
        sp0, sp1 = witten_spectra[0], witten_spectra[1]
        f = {(0, 1, 0): sp0.eigenvectors[:, :3] @ _rc(rng, 3), (1, 2, -2): sp1.eigenvectors[:, :2] @ _rc(rng, 2)}
        g = {(0, 1, 0): sp0.eigenvectors[:, 1:4] @ _rc(rng, 3)}
        c = fields.analyze(f, g, witten_spectra, kind=kind)
        s = fields.synthesize(c, 0.0, kind=kind)
        for key in f:
            assert np.max(np.abs(s.values[key] - f[key])) < 1e-10
            ref = g.get(key, np.zeros(len(sp0.x)))
            assert np.max(np.abs(s.rates[key] - ref)) < 1e-10

    def test_round_trip_wormhole_field(self, wormhole_spectra, rng):
        sp = wormhole_spectra[0]
        f = {(0, 2, 1): sp.eigenvectors[:, :4] @ _rc(rng, 4) / np.cosh(sp.x)}
        g = {(0, 2, 1): sp.eigenvectors[:, 2:5] @ _rc(rng, 3) / np.cosh(sp.x)}
        c = fields.analyze(f, g, wormhole_spectra, "wormhole", 1.0, kind="field")
        s = fields.synthesize(c, 0.0)
        assert np.max(np.abs(s.values[(0, 2, 1)] - f[(0, 2, 1)])) < 1e-10
        assert np.max(np.abs(s.rates[(0, 2, 1)] - g[(0, 2, 1)])) < 1e-10

    def test_static_single_mode(self, witten_spectra):
        sp = witten_spectra[0]
        c = fields.analyze({(0, 3, 2): 0.7 * sp.eigenvectors[:, 2]}, {}, witten_spectra, drop=1e-12)
        assert list(c.entries) == [(0, 2, 3, 2)]
        ap, am = c.entries[(0, 2, 3, 2)]
        assert abs(ap - am) < 1e-12 * abs(ap)

    def test_empty(self, witten_spectra):
        c = fields.analyze({}, {}, witten_spectra)
        assert c.entries == {}
        s = fields.synthesize(c, 1.0)
        assert s.values == {} and len(s.x) == len(witten_spectra[0].x)

    def test_unresolved_data(self, witten_spectra):
        x = witten_spectra[0].x
        spike = np.exp(-(((x - 3.0) / 0.05) ** 2))
        with pytest.raises(ConvergenceError):
            fields.analyze({(0, 0, 0): spike}, {}, witten_spectra)

    def test_index_errors(self, witten_spectra):
        z = np.zeros(len(witten_spectra[0].x))
        with pytest.raises(DomainError):
            fields.analyze({(0, 1, 2): z}, {}, witten_spectra)
        with pytest.raises(DomainError):
            fields.analyze({(5, 0, 0): z}, {}, witten_spectra)
        with pytest.raises(DomainError):
            ModeCoefficients("witten", 1.0, witten_spectra, {(0, 99, 0, 0): (1, 1)})
        with pytest.raises(DomainError):
            fields.synthesize(ModeCoefficients("witten", 1.0, witten_spectra), 0.0, kind="bogus")


class TestEvolution:
    @pytest.mark.parametrize("t", [-2.0, 0.0, 2.0])
    def test_pde_residual(self, field3, t):
        assert fields.pde_residual(field3, t) < 1e-4

    def test_residual_is_a_difference_error(self, field3):
        # the centred-difference error scales like dt^2
        a, b = fields.pde_residual(field3, 1.0, dt=2e-3), fields.pde_residual(field3, 1.0, dt=1e-3)
        assert 3.0 < a / b < 5.0

    def test_energy_decreases_forward(self, field3):
        E = [fields.energy(fields.synthesize(field3, t), field3) for t in np.linspace(0, 4, 21)]
        assert np.all(np.diff(E) <= 0)
        E = [fields.energy(fields.synthesize(field3, t), field3) for t in np.linspace(-4, 0, 21)]
        assert np.all(np.diff(E) >= 0)

    @pytest.mark.parametrize("t", [-1.5, 0.7, 2.5])
    def test_energy_identity(self, field3, t):
        dt = 1e-4
        d = (fields.energy(fields.synthesize(field3, t + dt), field3) - fields.energy(fields.synthesize(field3, t - dt), field3)) / (2 * dt)
        r = fields.energy_rate(fields.synthesize(field3, t), field3)
        assert abs(d - r) < 1e-6 * abs(r)

    def test_energy_rate_kind(self, field3):
        with pytest.raises(DomainError):
            fields.energy_rate(fields.synthesize(field3, 0.0, kind="profile"), field3)


class TestWaveOperators:
    @pytest.mark.parametrize("coefs", ["field3", "worm3"])
    def test_asymptotic_energy_conserved(self, coefs, request):
        c = request.getfixturevalue(coefs)
        amps = fields.wave_operators(c)
        e_in, e_out = fields.asymptotic_energy(c, amps, "in"), fields.asymptotic_energy(c, amps, "out")
        assert abs(e_in - e_out) < 1e-12 * e_in

    @pytest.mark.parametrize("coefs", ["field3", "worm3"])
    def test_asymptotic_energy_is_the_late_profile_energy(self, coefs, request):
        c = request.getfixturevalue(coefs)
        e = fields.asymptotic_energy(c, fields.wave_operators(c), "out")
        late = fields.energy(fields.synthesize(c, 15.0, kind="profile"), c, kind="asymptotic")
        assert abs(late - e) < 1e-8 * e

    @pytest.mark.parametrize("coefs", ["field3", "worm3"])
    @pytest.mark.parametrize("which,sign", [("out", 1), ("in", -1)])
    def test_profile_approaches_free_wave(self, coefs, which, sign, request):
        c = request.getfixturevalue(coefs)
        amps = fields.wave_operators(c)
        scale = fields.asymptotic_energy(c, amps, which)

        def gap(T):
            d = fields.difference(fields.synthesize(c, sign * T, kind="profile"), fields.free_profile(c, amps, sign * T, which))
            return fields.energy(d, c, kind="asymptotic") / scale

        assert gap(10.0) < 1e-12
        assert gap(4.0) < gap(2.0)

    def test_free_propagator_matches_free_profile(self, field3):
        amps = fields.wave_operators(field3)
        data = fields.asymptotic_data(field3, amps, "out")
        moved = fields.merge(fields.propagate(fields.frequency_split(data), 1.0))
        snap = fields.free_profile(field3, amps, 1.0, "out")
        for j, (n, k, l, m) in enumerate(sorted(amps)):
            sp = field3.spectra[n]
            others = sum(1 for (n2, k2, l2, m2) in amps if (n2, l2, m2) == (n, l, m) and k2 == k)
            assert others == 1
            assert abs(_coefficient(sp, snap.values[(n, l, m)], k) - moved.v[j]) < 1e-8
            assert abs(_coefficient(sp, snap.rates[(n, l, m)], k) - moved.vp[j]) < 1e-8


class TestScattering:
    @pytest.mark.parametrize("coefs", ["field3", "worm3"])
    def test_maps_in_to_out(self, coefs, request):
        c = request.getfixturevalue(coefs)
        amps = fields.wave_operators(c)
        out = fields.scattering(fields.asymptotic_data(c, amps, "in"))
        ref = fields.asymptotic_data(c, amps, "out")
        assert np.allclose(out.v, ref.v, rtol=1e-12, atol=0) and np.allclose(out.vp, ref.vp, rtol=1e-12, atol=0)

    def _data(self, rng, n=30):
        mu = np.sort(rng.uniform(0.2, 8.0, n))
        return AsymptoticData(mu, rng.integers(0, 8, n), _rc(rng, n), _rc(rng, n))

    def test_split_and_merge(self, rng):
        d = self._data(rng)
        sp = fields.frequency_split(d)
        assert np.allclose(sp.pos.vp, 1j * d.mu * sp.pos.v) and np.allclose(sp.neg.vp, -1j * d.mu * sp.neg.v)
        back = fields.merge(sp)
        assert np.allclose(back.v, d.v, atol=1e-14) and np.allclose(back.vp, d.vp, atol=1e-14)

    def test_parts_are_orthogonal(self, rng):
        d = self._data(rng)
        sp = fields.frequency_split(d)
        total = fields.weighted_norm(d)
        assert abs(fields.weighted_norm(sp.pos) + fields.weighted_norm(sp.neg) - total) < 1e-12 * total

    def test_isometry_and_symplectic(self, rng):
        d1, d2 = self._data(rng), None
        d2 = d1.like(_rc(rng, len(d1.mu)), _rc(rng, len(d1.mu)))
        n0 = fields.weighted_norm(d1)
        assert abs(fields.weighted_norm(fields.scattering(d1)) - n0) < 1e-12 * n0
        s0 = fields.symplectic_form(d1, d2)
        s1 = fields.symplectic_form(fields.scattering(d1), fields.scattering(d2))
        assert abs(s1 - s0) < 1e-11 * max(1, abs(s0))

    def test_preserves_frequency_sign(self, rng):
        sp = fields.frequency_split(self._data(rng))
        zero = sp.neg.like(np.zeros_like(sp.neg.v), np.zeros_like(sp.neg.vp))
        out = fields.scattering(fields.FrequencySplit(sp.pos, zero))
        assert np.all(out.neg.v == 0) and np.all(out.neg.vp == 0)

    def test_commutes_with_free_evolution(self, rng):
        sp = fields.frequency_split(self._data(rng))
        a = fields.scattering(fields.propagate(sp, 0.8))
        b = fields.propagate(fields.scattering(sp), 0.8)
        assert np.allclose(a.pos.v, b.pos.v, atol=1e-13) and np.allclose(a.neg.v, b.neg.v, atol=1e-13)

    def test_spherical_modes_do_not_scatter(self, rng):
        d = self._data(rng)
        d = AsymptoticData(d.mu, np.zeros_like(d.ell), d.v, d.vp)
        out = fields.scattering(d)
        assert np.allclose(out.v, d.v, atol=1e-13) and np.allclose(out.vp, d.vp, atol=1e-13)

    def test_rejects_zero_frequency(self):
        with pytest.raises(DomainError):
            AsymptoticData([0.0, 1.0], [0, 0], [1, 1], [1, 1])


class TestResonances:
    def test_l2_poles(self):
        r = fields.resonance_scan(2)
        up = sorted((p.zeta for p in r["poles"] if p.zeta.imag > 0), key=lambda z: z.imag)
        assert len(up) == 2
        assert abs(up[0] - 1j) < 1e-8 and abs(up[1] - 2j) < 1e-8

    def test_l1_single_pole(self):
        r = fields.resonance_scan(1)
        up = [p.zeta for p in r["poles"] if p.zeta.imag > 0]
        assert len(up) == 1 and abs(up[0] - 1j) < 1e-8

    def test_zeros_mirror_poles(self):
        r = fields.resonance_scan(2)
        poles = sorted((p.zeta for p in r["poles"] if p.zeta.imag > 0), key=abs)
        zeros = sorted((-z.zeta for z in r["zeros"] if z.zeta.imag < 0), key=abs)
        assert len(poles) == len(zeros) == 2 and np.allclose(poles, zeros, atol=1e-8)

    def test_residue_by_difference(self):
        # residue at i zeta0 against a small-circle numerical derivative of 1/phase
        r = fields.resonance_scan(1)
        p = [p for p in r["poles"] if p.zeta.imag > 0][0]
        h = 1e-6
        inv = lambda z: 1 / desitter.amplitude_phase(1, z)  # noqa: E731
        deriv = (inv(p.zeta + h) - inv(p.zeta - h)) / (2 * h)
        assert abs(p.residue - 1 / deriv) < 1e-5 * abs(p.residue)

    @pytest.mark.parametrize("l,n", [(1, 0), (2, 0), (2, 1), (3, 2)])
    def test_profile_against_mpmath(self, l, n):
        mp.mp.dps = 30
        for t in (-2.0, -0.4, 0.3, 1.7):
            w, dw = fields.resonance_profile(l, n, np.array([t]))
            ref = complex(mp.legenp(l, -(n + 1), mp.tanh(t), type=2))
            assert abs(w[0] - ref.real) < 1e-12 * max(1, abs(ref)) and abs(ref.imag) < 1e-20

    @pytest.mark.parametrize("l,n", [(1, 0), (2, 1), (3, 0)])
    def test_profile_solves_mode_equation(self, l, n):
        t = np.linspace(-5, 5, 20001)
        h = t[1] - t[0]
        w, dw = fields.resonance_profile(l, n, t)
        ddw = np.gradient(dw, h)
        r = ddw - ((n + 1) ** 2 - l * (l + 1) / np.cosh(t) ** 2) * w
        # second-order differences: h^2 ~ 2.5e-7
        assert np.max(np.abs(r[5:-5])) < 1e-5 * np.max(np.abs(w))
        assert np.max(np.abs(np.gradient(w, h) - dw)[5:-5]) < 1e-5 * np.max(np.abs(w))

    def test_profile_decay(self):
        t = np.linspace(5, 15, 50)
        w, _ = fields.resonance_profile(3, 1, t)
        assert abs(np.polyfit(np.log(np.cosh(t)), np.log(np.abs(w)), 1)[0] + 2) < 1e-3

    def test_errors(self):
        with pytest.raises(DomainError):
            fields.resonance_scan(0)
        with pytest.raises(DomainError):
            fields.resonance_profile(2, 2, 0.0)


class TestTraversability:
    @pytest.mark.parametrize("eps", [-1, 1])
    @pytest.mark.parametrize("l", [1, 2])
    def test_packet_traverses(self, eps, l):
        rep = fields.traversability_check(l=l, eps=eps)
        assert rep.status == "traversed" and rep.leakage < 1e-4
        assert rep.entering_sheet == eps
        assert rep.detail["out_state_deviation"] < 1e-6

    def test_mirror_symmetry(self):
        a = fields.traversability_check(eps=-1)
        b = fields.traversability_check(eps=1)
        assert abs(a.leakage - b.leakage) < 1e-12 + 1e-6 * a.leakage
        assert np.allclose(np.abs(a.detail["v"][1:]), np.abs(b.detail["v"][1:][::-1]), atol=1e-10)

    def test_wrong_direction_rejected(self):
        x, _ = fields.traversal_grid()
        f, g = fields.one_sided_packet(x, -1)
        with pytest.raises(DomainError):
            fields.traversability_check(f, -g, eps=-1)

    def test_two_sided_rejected(self):
        x, _ = fields.traversal_grid()
        f, g = fields.one_sided_packet(x, -1)
        f2, g2 = fields.one_sided_packet(x, -1, x0=10.0)
        with pytest.raises(DomainError):
            fields.traversability_check(f + f2, g + g2, eps=-1)

    def test_infrared_rejected(self):
        x, _ = fields.traversal_grid()
        f, g = fields.one_sided_packet(x, -1, sigma=4.0, k0=0.0, x0=-30.0)
        with pytest.raises(DomainError):
            fields.traversability_check(f, g, eps=-1)

    def test_argument_errors(self):
        with pytest.raises(DomainError):
            fields.traversability_check(eps=0)
        with pytest.raises(DomainError):
            fields.traversability_check(l=0)
        with pytest.raises(DomainError):
            fields.traversability_check(np.zeros(3), np.zeros(3))

    def test_massive_control_is_confined(self):
        rep = fields.massive_confinement(times=np.linspace(0, 25, 11))
        assert rep.status == "confined" and rep.detail["far_mass"] < 1e-8


class TestMasslessWitten:
    def test_round_trip(self, transform):
        u = fields.smooth_packet(transform.x, 1.0)
        cc = fields.analyze({(0, 1, 0): u}, {}, transform)
        s = fields.synthesize(cc, 0.0)
        assert np.max(np.abs(s.values[(0, 1, 0)] - u)) < 1e-5

    def test_matches_mode_evolution(self, transform):
        # each spectral sample evolves by the closed-form mode solution
        u = fields.smooth_packet(transform.x, 1.0)
        cc = fields.analyze_continuous({(2, 0): u}, {}, transform)
        uh = spectral.forward_transform(u, transform)
        j = 300
        lam = transform.lambdas[j]
        sol = desitter.ModeSolution(lam, 2, *desitter.coeffs_from_cauchy(lam, 2, desitter.ModeCauchyData(uh[j], 0)))
        ap, am = cc.entries[(2, 0)]
        assert abs(ap[j] - sol.A_plus) < 1e-12 * abs(sol.A_plus) and abs(am[j] - sol.A_minus) < 1e-12 * abs(sol.A_minus)

    def test_disperses(self, transform):
        assert fields.dispersion_ratio(transform, t=40.0) <= 0.1

    def test_continuous_requires_n0(self, transform):
        with pytest.raises(DomainError):
            fields.analyze({(1, 0, 0): np.zeros(len(transform.x))}, {}, transform)


class TestSerialization:
    def test_coefficients_round_trip(self, field3, tmp_path):
        p = tmp_path / "c.txt"
        fields.write_coefficients(field3, p, header=["# header: test"])
        back = fields.read_coefficients(p, field3.spectra)
        assert back.entries == field3.entries and back.M == field3.M and back.spacetime == "witten"

    def test_mismatched_spectra(self, field3, wormhole_spectra, tmp_path):
        p = tmp_path / "c.txt"
        fields.write_coefficients(field3, p)
        with pytest.raises((DomainError, KeyError)):
            fields.read_coefficients(p, wormhole_spectra)

    def test_snapshot_columns(self, field3, tmp_path):
        p = tmp_path / "s.csv"
        snap = fields.synthesize(field3, 0.5)
        fields.write_snapshot(snap, p)
        lines = p.read_text().splitlines()
        assert lines[0] == "t,x,n,l,m,Re,Im"
        assert len(lines) == 1 + len(snap.values) * len(snap.x)
        t, x, n, l, m, re, im = lines[1].split(",")
        key = sorted(snap.values)[0]
        assert (int(n), int(l), int(m)) == key and complex(float(re), float(im)) == snap.values[key][0]

    def test_continuous_columns(self, transform, tmp_path):
        cc = fields.analyze_continuous({(0, 0): fields.smooth_packet(transform.x)}, {}, transform, delta=0.1)
        p = tmp_path / "cc.txt"
        fields.write_continuous(cc, p)
        lines = p.read_text().splitlines()
        assert lines[0] == "# delta=0.1" and lines[1] == "l,m,lambda,ReA+,ImA+,ReA-,ImA-"
        assert len(lines) == 2 + len(transform.mu)
