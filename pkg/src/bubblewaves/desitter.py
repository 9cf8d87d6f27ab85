"""One Kaluza-Klein mode on dS^3: w'' + (lambda - 1) w + l(l+1) w / cosh^2 t = 0.

For lambda > 1 and mu = sqrt(lambda - 1) the solutions are

    w(t) = A+ P_l^{i mu}(tanh t) + A- P_l^{i mu}(-tanh t)

with Ferrers functions P.  Each Ferrers term is a single frequency at both
ends (e^{+i mu t} for A+, e^{-i mu t} for A-), so scattering is a pure phase.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, DomainError
from .specfun import ferrers_p_t, gamma_complex, rgamma_complex

__all__ = [
    "ModeSolution",
    "ModeCauchyData",
    "AsymptoticAmplitudes",
    "mode_value",
    "coeffs_from_cauchy",
    "asymptotic_amplitudes",
    "amplitude_phase",
    "scatter_phase",
    "scatter_mode",
    "mode_energy",
    "energy_at_infinity",
    "energy_from_cauchy",
    "ode_oracle",
    "fit_free_wave",
    "estimate_ratio",
    "ratio_extremes",
]


@dataclass(frozen=True)
class ModeSolution:
    lam: float
    l: int
    A_plus: complex
    A_minus: complex

    def __post_init__(self):
        if not self.lam > 1.0:
            raise DomainError("mode solutions need lambda > 1")
        if int(self.l) != self.l or self.l < 0:
            raise DomainError("l must be a non-negative integer")
        for a in (self.A_plus, self.A_minus):
            if not np.isfinite(complex(a)):
                raise DomainError("coefficients must be finite")

    @property
    def mu(self):
        return float(np.sqrt(self.lam - 1.0))


@dataclass(frozen=True)
class ModeCauchyData:
    w0: complex
    w0p: complex

    def __post_init__(self):
        if not (np.isfinite(complex(self.w0)) and np.isfinite(complex(self.w0p))):
            raise DomainError("Cauchy data must be finite")


@dataclass(frozen=True)
class AsymptoticAmplitudes:
    w_in_plus: complex
    w_in_minus: complex
    w_out_plus: complex
    w_out_minus: complex


def _check_lam(lam, l):
    if not lam > 1.0:
        raise DomainError("lambda must exceed 1")
    if int(l) != l or l < 0:
        raise DomainError("l must be a non-negative integer")
    return float(np.sqrt(lam - 1.0))


def mode_value(sol, t):
    """(w(t), w'(t)) of the closed-form solution."""
    t = np.asarray(t, dtype=float)
    order = 1j * sol.mu
    p, dp = ferrers_p_t(sol.l, order, t)
    q, dq = ferrers_p_t(sol.l, order, -t)
    return sol.A_plus * p + sol.A_minus * q, sol.A_plus * dp - sol.A_minus * dq


def coeffs_from_cauchy(lam, l, data):
    """(A+, A-) reproducing w(0) = w0, w'(0) = w0p.

    From the values P_l^a(0) and dP_l^a/dxi(0) of the Ferrers function:
    A+- = 2^{-i mu}/(2 sqrt pi) [G(l/2+1-i mu/2) G(1/2-l/2-i mu/2) w0
                                 -+ 1/2 G((l+1)/2-i mu/2) G(-l/2-i mu/2) w0p].
    """
    mu = _check_lam(lam, l)
    c = 2.0 ** (-1j * mu) / (2.0 * np.sqrt(np.pi))
    even = gamma_complex(0.5 * l + 1 - 0.5j * mu) * gamma_complex(0.5 - 0.5 * l - 0.5j * mu)
    odd = 0.5 * gamma_complex(0.5 * (l + 1) - 0.5j * mu) * gamma_complex(-0.5 * l - 0.5j * mu)
    ap = c * (even * data.w0 - odd * data.w0p)
    am = c * (even * data.w0 + odd * data.w0p)
    if not (np.isfinite(ap) and np.isfinite(am)):
        raise DomainError("non-finite coefficients")
    return complex(ap), complex(am)


def _edge_factor(l, mu):
    """(-1)^l Gamma(l+1+i mu) / (Gamma(l+1-i mu) Gamma(1+i mu))."""
    return (-1) ** l * gamma_complex(l + 1 + 1j * mu) * rgamma_complex(l + 1 - 1j * mu) * rgamma_complex(1 + 1j * mu)


def asymptotic_amplitudes(sol):
    """Free-wave amplitudes w ~ w+ e^{i mu t} + w- e^{-i mu t} as t -> -inf (in) and +inf (out)."""
    mu = sol.mu
    near = rgamma_complex(1 - 1j * mu)
    far = _edge_factor(sol.l, mu)
    return AsymptoticAmplitudes(
        w_in_plus=complex(far * sol.A_plus),
        w_in_minus=complex(near * sol.A_minus),
        w_out_plus=complex(near * sol.A_plus),
        w_out_minus=complex(far * sol.A_minus),
    )


def amplitude_phase(l, zeta):
    """(-1)^l G(1 + i zeta) G(l+1 - i zeta) / (G(1 - i zeta) G(l+1 + i zeta)) for complex zeta.

    For real zeta = mu this is the unimodular factor w_out^+ / w_in^+; zeta -> -zeta
    gives the factor for the negative frequency.
    """
    zeta = np.asarray(zeta, dtype=complex)
    num = gamma_complex(1 + 1j * zeta) * gamma_complex(l + 1 - 1j * zeta)
    out = (-1) ** l * num * rgamma_complex(1 - 1j * zeta) * rgamma_complex(l + 1 + 1j * zeta)
    return complex(out) if out.ndim == 0 else out


def scatter_phase(l, lam, sign=+1):
    """w_out^{+-} / w_in^{+-}: (-1)^l G(1 +- i mu) G(l+1 -+ i mu) / (G(1 -+ i mu) G(l+1 +- i mu))."""
    mu = _check_lam(lam, l)
    return amplitude_phase(l, mu if sign > 0 else -mu)


def scatter_mode(l, lam, w_in_plus, w_in_minus):
    """(w_out+, w_out-) from the incoming amplitudes."""
    return scatter_phase(l, lam, +1) * w_in_plus, scatter_phase(l, lam, -1) * w_in_minus


def mode_energy(sol, t):
    """E(w; t) = |w'|^2/2 + (lambda - 1 + l(l+1)/cosh^2 t) |w|^2 / 2."""
    w, dw = mode_value(sol, t)
    return _energy(sol.lam, sol.l, t, w, dw)


def _energy(lam, l, t, w, dw):
    t = np.asarray(t, dtype=float)
    return 0.5 * np.abs(dw) ** 2 + 0.5 * (lam - 1.0 + l * (l + 1) / np.cosh(t) ** 2) * np.abs(w) ** 2


def energy_at_infinity(sol):
    """lim E(w; t) as |t| -> inf, from the coefficients."""
    mu = sol.mu
    return float(mu / np.pi * np.sinh(np.pi * mu) * (abs(sol.A_plus) ** 2 + abs(sol.A_minus) ** 2))


def energy_from_cauchy(lam, l, data):
    """lim E(w; t) as |t| -> inf, from the Cauchy data at t = 0."""
    mu = _check_lam(lam, l)
    g = abs(gamma_complex(0.5 * l + 1 - 0.5j * mu) * rgamma_complex(0.5 * l + 0.5 - 0.5j * mu)) ** 2
    ep, em = np.exp(0.5 * np.pi * mu), np.exp(-0.5 * np.pi * mu)
    s = (-1) ** l
    a = g * abs(data.w0) ** 2 / (ep + s * em) ** 2
    b = 0.25 * abs(data.w0p) ** 2 / (g * (ep - s * em) ** 2)
    return float(2.0 * mu * np.sinh(np.pi * mu) * (a + b))


def ode_oracle(lam, l, data, t_span, tol=1e-10, t_eval=None):
    """Adaptive RK integration of the mode equation from Cauchy data at t_span[0].

    Returns (t, w, w').  Usable for lambda <= 1 as a diagnostic.
    """
    if int(l) != l or l < 0:
        raise DomainError("l must be a non-negative integer")
    k2 = lam - 1.0
    ll = l * (l + 1)

    def f(t, y):
        return [y[1], -(k2 + ll / np.cosh(t) ** 2) * y[0]]

    sol = solve_ivp(
        f,
        t_span,
        np.array([data.w0, data.w0p], dtype=complex),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        t_eval=t_eval,
        dense_output=t_eval is None,
    )
    if sol.status < 0:
        raise ConvergenceError(f"mode integration failed: {sol.message}", (sol.t[-1], sol.y[:, -1]))
    return sol.t, sol.y[0], sol.y[1]


def fit_free_wave(t, w, dw, mu):
    """Least-squares (c+, c-) with w ~ c+ e^{i mu t} + c- e^{-i mu t} on a window, using w and w'."""
    t = np.asarray(t, dtype=float)
    ep, em = np.exp(1j * mu * t), np.exp(-1j * mu * t)
    A = np.vstack([np.column_stack([ep, em]), np.column_stack([1j * mu * ep, -1j * mu * em])])
    b = np.concatenate([w, dw])
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    return complex(c[0]), complex(c[1])


def _ratio_weights(lam, l):
    mu = float(np.sqrt(lam - 1.0))
    th = np.tanh(0.5 * np.pi * mu)
    k = l + 1 + mu
    if l % 2 == 0:
        return th * k, 1.0 / (th * k)
    return k / th, th / k


def estimate_ratio(lam, l, data):
    """mu (|w+|^2 + |w-|^2) divided by the tanh/coth-weighted Cauchy norm of the two-sided estimate."""
    mu = _check_lam(lam, l)
    A = coeffs_from_cauchy(lam, l, data)
    amp = asymptotic_amplitudes(ModeSolution(lam, l, *A))
    top = mu * (abs(amp.w_in_plus) ** 2 + abs(amp.w_in_minus) ** 2)
    a, b = _ratio_weights(lam, l)
    return float(top / (a * abs(data.w0) ** 2 + b * abs(data.w0p) ** 2))


def ratio_extremes(lam, l):
    """Min and max of estimate_ratio over all Cauchy data at fixed (lambda, l)."""
    r0 = estimate_ratio(lam, l, ModeCauchyData(1.0, 0.0))
    r1 = estimate_ratio(lam, l, ModeCauchyData(0.0, 1.0))
    return min(r0, r1), max(r0, r1)
