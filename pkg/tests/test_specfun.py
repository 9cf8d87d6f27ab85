import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import laguerre

from bubblewaves.errors import DomainError
from bubblewaves.specfun import (
    FerrersArg,
    LegendreQArg,
    ferrers_p,
    ferrers_p_t,
    ferrers_p_values,
    gamma_complex,
    hyp2f1_series,
    laguerre_deriv,
    lambert_w22,
    lambert_w22_delta,
    legendre_p_minus,
    legendre_q_olver,
    loggamma_complex,
    olver_q_x,
    rgamma_complex,
    w22_series,
)

mp.mp.dps = 30


def olver_q_mp(mu, X):
    """Olver's Q_{-1/2}^{i mu/2}(X) from the mpmath type-3 Legendre Q."""
    m = 0.5j * mu
    return complex(mp.exp(-1j * mp.pi * m) * mp.legenq(-0.5, m, X, type=3) / mp.gamma(0.5 + m))


class TestGamma:
    @given(st.floats(-8, 8), st.floats(-20, 20))
    def test_matches_mpmath(self, a, b):
        z = complex(a, b)
        if abs(z - round(a)) < 1e-3 and round(a) <= 0:
            return
        ref = complex(mp.gamma(z))
        assert abs(gamma_complex(z) - ref) <= 1e-12 * abs(ref)

    @given(st.floats(0.5, 30), st.floats(-30, 30))
    def test_log_gamma_exponentiates(self, a, b):
        z = complex(a, b)
        ref = complex(mp.loggamma(z))
        assert abs(np.exp(loggamma_complex(z) - ref) - 1) < 1e-12

    def test_reciprocal_vanishes_at_poles(self):
        assert np.all(rgamma_complex(np.array([0, -1, -5], dtype=complex)) == 0)

    def test_pole_raises(self):
        with pytest.raises(DomainError):
            gamma_complex(-2.0)

    def test_reflection(self):
        z = 0.3 + 0.7j
        assert abs(gamma_complex(z) * gamma_complex(1 - z) - np.pi / np.sin(np.pi * z)) < 1e-13


class TestHypergeometric:
    @pytest.mark.parametrize("a,b,c,z", [(0.5, 1.5j, 1 + 0.2j, 0.6), (1.25 + 0.5j, 0.75 + 0.5j, 1, 0.9), (2, -3, 0.5, -0.7)])
    def test_matches_mpmath(self, a, b, c, z):
        ref = complex(mp.hyp2f1(a, b, c, z))
        assert abs(hyp2f1_series(a, b, c, z) - ref) < 1e-12 * max(1, abs(ref))

    def test_outside_disc_raises(self):
        with pytest.raises(DomainError):
            hyp2f1_series(1, 1, 2, 1.0)


class TestFerrers:
    @given(st.integers(0, 10), st.floats(0, 8), st.floats(-0.97, 0.97))
    def test_matches_mpmath(self, l, mu, xi):
        ref = complex(mp.legenp(l, 1j * mu, xi, type=2))
        val = ferrers_p(FerrersArg(l, mu, xi))
        scale = max(abs(ref), abs(complex(mp.legenp(l, 1j * mu, 0, type=2))), 1e-3)
        assert abs(val - ref) < 1e-10 * scale

    def test_degree_zero_is_a_plane_wave(self):
        # P_0^{i mu}(tanh t) = e^{i mu t} / Gamma(1 - i mu)
        t = np.linspace(-30, 30, 61)
        mu = 1.7
        p, dp = ferrers_p_t(0, 1j * mu, t)
        ref = np.exp(1j * mu * t) / gamma_complex(1 - 1j * mu)
        assert np.max(np.abs(p - ref)) < 1e-13
        assert np.max(np.abs(dp - 1j * mu * ref)) < 1e-12

    @given(st.integers(0, 8), st.floats(0.1, 6), st.floats(-5, 5))
    def test_t_derivative_against_differences(self, l, mu, t):
        h = 1e-4
        p, dp = ferrers_p_t(l, 1j * mu, t)
        pp, _ = ferrers_p_t(l, 1j * mu, t + h)
        pm, _ = ferrers_p_t(l, 1j * mu, t - h)
        fd = (pp - pm) / (2 * h)
        assert abs(dp - fd) < 1e-6 * max(1, abs(dp))

    def test_large_t_stays_finite(self):
        p, dp = ferrers_p_t(3, 2j, np.array([40.0, -40.0]))
        assert np.all(np.isfinite(p)) and np.all(np.isfinite(dp))

    def test_vectorized_values(self):
        xi = np.linspace(-0.9, 0.9, 7)
        vals = ferrers_p_values(2, 1.3j, xi)
        for x, v in zip(xi, vals):
            assert abs(v - ferrers_p(FerrersArg(2, 1.3, x))) < 1e-15

    @pytest.mark.parametrize("args", [(-1, 1.0, 0.0), (1.5, 1.0, 0.0), (1, -1.0, 0.0), (1, 1.0, 1.0)])
    def test_invalid_arguments(self, args):
        with pytest.raises(DomainError):
            FerrersArg(*args)


class TestLegendreHalf:
    @pytest.mark.parametrize("mu", [0.0, 0.3, 1.0, 3.5, 9.0])
    @pytest.mark.parametrize("x", [0.02, 0.3, 1.0, 4.0])
    def test_q_matches_mpmath(self, mu, x):
        X = 1 / np.tanh(2 * x)
        if mu == 0.0:
            ref = olver_q_mp(1e-12, X).real
        else:
            ref = olver_q_mp(mu, X).real
        assert abs(olver_q_x(mu, x) - ref) < 1e-10 * max(1, abs(ref))

    def test_q_wrapper_agrees(self):
        X = 1.7
        x = 0.25 * np.log((X + 1) / (X - 1))
        assert abs(legendre_q_olver(LegendreQArg(2.0, X)) - olver_q_x(2.0, x)) < 1e-14

    @pytest.mark.parametrize("mu,X", [(0.5, 1.2), (2.0, 3.0), (4.0, 10.0)])
    def test_p_minus_matches_mpmath(self, mu, X):
        ref = complex(mp.legenp(-0.5, -0.5j * mu, X, type=3))
        assert abs(legendre_p_minus(mu, X) - ref) < 1e-11 * max(1, abs(ref))

    def test_q_domain(self):
        with pytest.raises(DomainError):
            olver_q_x(1.0, np.array([0.0, 1.0]))
        with pytest.raises(DomainError):
            LegendreQArg(1.0, 1.0)


class TestLambert:
    @given(st.floats(1e-300, 1e6))
    def test_residual(self, s):
        d = lambert_w22_delta(s)
        lhs = np.exp(np.log(d) - np.log(4 + d) + 2 + d)
        assert abs(lhs - s) < 1e-12 * s

    def test_against_root_finder(self):
        for s in (1e-5, 0.3, 7.0, 1e4):
            f = lambda W: mp.log(W - 2) - mp.log(W + 2) + W - mp.log(s)  # noqa: E731
            ref = mp.findroot(f, (mp.mpf(2) + mp.mpf(10) ** -20, mp.mpf(20)), solver="bisect")
            assert abs(lambert_w22(s) - float(ref)) < 1e-12 * float(ref)

    def test_origin(self):
        assert lambert_w22(0.0) == 2.0

    def test_series(self):
        s = np.linspace(0, 0.1, 51)
        assert np.max(np.abs(w22_series(s) - lambert_w22(s)) / lambert_w22(s)) < 1e-4

    def test_monotone(self):
        s = np.logspace(-10, 6, 400)
        assert np.all(np.diff(lambert_w22(s)) > 0)

    @pytest.mark.parametrize("bad", [-1.0, np.inf, np.nan])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            lambert_w22(bad)


class TestLaguerre:
    @pytest.mark.parametrize("n", [1, 2, 5, 12])
    def test_against_numpy(self, n):
        x = np.linspace(0, 40, 9)
        c = np.zeros(n + 1)
        c[-1] = 1
        ref = laguerre.lagval(x, laguerre.lagder(c))
        assert np.allclose(laguerre_deriv(n, x), ref, rtol=1e-10, atol=1e-10)

    def test_rejects_zero(self):
        with pytest.raises(DomainError):
            laguerre_deriv(0, 1.0)
