import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from bubblewaves import desitter as ds
from bubblewaves.desitter import ModeCauchyData, ModeSolution
from bubblewaves.errors import DomainError

lams = st.floats(1.05, 30.0)
ells = st.integers(0, 5)
cplx = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def ferrers_mp(l, mu, xi):
    mp.mp.dps = 30
    f = lambda z: mp.legenp(l, 1j * mu, z, type=2)  # noqa: E731
    return complex(f(xi)), complex(mp.diff(f, xi))


def evolve(lam, l, w0, w0p, t_end):
    """Independent complex RK integration of w'' = -(lam - 1 + l(l+1)/cosh^2 t) w from t = 0."""
    f = lambda t, y: [y[1], -(lam - 1 + l * (l + 1) / np.cosh(t) ** 2) * y[0]]  # noqa: E731
    sol = solve_ivp(f, (0.0, t_end), np.array([w0, w0p], complex), method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    return sol.sol


class TestClosedForm:
    @pytest.mark.parametrize("l", [0, 1, 2, 4])
    @pytest.mark.parametrize("lam", [1.3, 5.0, 17.0])
    def test_matches_ode(self, lam, l):
        sol = ModeSolution(lam, l, 0.7 - 0.2j, 0.3 + 0.5j)
        w0, w0p = ds.mode_value(sol, 0.0)
        for t_end in (4.0, -4.0):
            ref = evolve(lam, l, complex(w0), complex(w0p), t_end)
            t = np.linspace(0, t_end, 9)
            w, dw = ds.mode_value(sol, t)
            y = ref(t)
            scale = np.max(np.abs(y[0]))
            assert np.max(np.abs(w - y[0])) < 1e-9 * scale
            assert np.max(np.abs(dw - y[1])) < 1e-9 * scale * np.sqrt(lam)

    @pytest.mark.parametrize("l,lam,t", [(0, 2.0, 0.3), (1, 5.0, -0.7), (3, 10.0, 1.1)])
    def test_ferrers_terms_against_mpmath(self, l, lam, t):
        mu = np.sqrt(lam - 1)
        p, dp = ferrers_mp(l, mu, np.tanh(t))
        w, dw = ds.mode_value(ModeSolution(lam, l, 1.0, 0.0), t)
        assert abs(w - p) < 1e-12 * abs(p)
        assert abs(dw - dp / np.cosh(t) ** 2) < 1e-10 * max(1, abs(dp))

    @given(lams, st.floats(-3, 3))
    def test_l0_is_a_plane_wave(self, lam, t):
        mu = np.sqrt(lam - 1)
        w, _ = ds.mode_value(ModeSolution(lam, 0, 1.0, 0.0), t)
        ref = complex(mp.exp(1j * mu * t) * mp.rgamma(1 - 1j * mu))
        assert abs(w - ref) < 1e-12 * max(1, abs(ref))


class TestCauchyMap:
    @pytest.mark.parametrize("l", [0, 1, 2, 3])
    @pytest.mark.parametrize("lam", [1.5, 4.0, 26.0])
    def test_against_mpmath_solve(self, lam, l):
        mu = np.sqrt(lam - 1)
        data = ModeCauchyData(0.4 - 1.1j, 0.9 + 0.2j)
        p, dp = ferrers_mp(l, mu, 0.0)
        # w = A+ P(tanh t) + A- P(-tanh t): w(0) = (A+ + A-) p, w'(0) = (A+ - A-) dp
        s, d = data.w0 / p, data.w0p / dp
        ref = (0.5 * (s + d), 0.5 * (s - d))
        got = ds.coeffs_from_cauchy(lam, l, data)
        assert np.allclose(got, ref, rtol=1e-10, atol=0)

    @given(lams, ells, cplx, cplx)
    def test_reproduces_data(self, lam, l, a, b):
        sol = ModeSolution(lam, l, *ds.coeffs_from_cauchy(lam, l, ModeCauchyData(a, b)))
        w, dw = ds.mode_value(sol, 0.0)
        assert abs(w - a) < 1e-10 * (1 + abs(a) + abs(b))
        assert abs(dw - b) < 1e-10 * (1 + abs(a) + abs(b))


class TestAsymptotics:
    @pytest.mark.parametrize("l", [0, 1, 3])
    @pytest.mark.parametrize("lam", [2.0, 9.0])
    def test_free_wave_fits(self, lam, l):
        mu = np.sqrt(lam - 1)
        sol = ModeSolution(lam, l, 0.3 + 0.4j, -0.8 + 0.1j)
        w0, w0p = ds.mode_value(sol, 0.0)
        amp = ds.asymptotic_amplitudes(sol)
        for sign, expect in ((1, (amp.w_out_plus, amp.w_out_minus)), (-1, (amp.w_in_plus, amp.w_in_minus))):
            ref = evolve(lam, l, complex(w0), complex(w0p), 26.0 * sign)
            t = sign * np.linspace(24.0, 26.0, 81)
            y = ref(t)
            c = ds.fit_free_wave(t, y[0], y[1], mu)
            assert np.allclose(c, expect, rtol=1e-8, atol=1e-9)

    @given(lams, ells)
    def test_scatter_phase_is_unimodular(self, lam, l):
        for sign in (1, -1):
            assert abs(abs(ds.scatter_phase(l, lam, sign)) - 1) < 1e-12

    @given(lams, ells)
    def test_phase_consistent_with_amplitudes(self, lam, l):
        amp = ds.asymptotic_amplitudes(ModeSolution(lam, l, 1.0, 1.0))
        assert abs(amp.w_out_plus - ds.scatter_phase(l, lam, 1) * amp.w_in_plus) < 1e-12 * abs(amp.w_out_plus)
        assert abs(amp.w_out_minus - ds.scatter_phase(l, lam, -1) * amp.w_in_minus) < 1e-12 * abs(amp.w_out_minus)

    @given(st.floats(-3, 3), st.floats(-3, 3), ells)
    def test_phase_reflection(self, a, b, l):
        z = complex(a, b)
        if min(abs(1j * z + k) for k in range(1, l + 2)) < 1e-3:
            return
        assert abs(ds.amplitude_phase(l, z) * ds.amplitude_phase(l, -z) - 1) < 1e-10

    def test_l0_does_not_scatter(self):
        assert abs(ds.scatter_phase(0, 3.0) - 1) < 1e-14

    def test_scatter_mode(self):
        out = ds.scatter_mode(2, 5.0, 1.0, 2j)
        assert abs(out[0] - ds.scatter_phase(2, 5.0)) < 1e-15
        assert abs(out[1] - 2j * ds.scatter_phase(2, 5.0, -1)) < 1e-15


class TestEnergy:
    @given(lams, ells, cplx, cplx)
    def test_cauchy_formula(self, lam, l, a, b):
        data = ModeCauchyData(a, b)
        sol = ModeSolution(lam, l, *ds.coeffs_from_cauchy(lam, l, data))
        e1, e2 = ds.energy_at_infinity(sol), ds.energy_from_cauchy(lam, l, data)
        assert abs(e1 - e2) <= 1e-9 * max(e1, 1e-300)

    @pytest.mark.parametrize("l", [0, 2])
    def test_limit_of_mode_energy(self, l):
        sol = ModeSolution(3.0, l, 0.2 + 0.1j, -0.5j)
        for t in (-30.0, 30.0):
            assert abs(ds.mode_energy(sol, t) - ds.energy_at_infinity(sol)) < 1e-10 * ds.energy_at_infinity(sol)

    @given(lams, ells, cplx, cplx)
    def test_estimate_between_extremes(self, lam, l, a, b):
        if abs(a) + abs(b) < 1e-6:
            return
        lo, hi = ds.ratio_extremes(lam, l)
        r = ds.estimate_ratio(lam, l, ModeCauchyData(a, b))
        assert lo * (1 - 1e-10) <= r <= hi * (1 + 1e-10)
        assert 0 < lo <= hi


class TestErrors:
    def test_mode_solution(self):
        with pytest.raises(DomainError):
            ModeSolution(1.0, 0, 1, 0)
        with pytest.raises(DomainError):
            ModeSolution(2.0, -1, 1, 0)
        with pytest.raises(DomainError):
            ModeSolution(2.0, 0, np.nan, 0)

    def test_cauchy(self):
        with pytest.raises(DomainError):
            ModeCauchyData(np.inf, 0)
        with pytest.raises(DomainError):
            ds.coeffs_from_cauchy(0.5, 0, ModeCauchyData(1, 0))
        with pytest.raises(DomainError):
            ds.ode_oracle(2.0, 1.5, ModeCauchyData(1, 0), (0, 1))
