"""Special-function kernels.

Complex Gamma (Lanczos), Ferrers functions of integer degree and complex
order, Olver-normalized Legendre functions of degree -1/2, the generalized
Lambert function W(+2,-2) and derivatives of Laguerre polynomials.

Conventions follow DLMF chapter 14:

* Ferrers function of the first kind on (-1, 1):
  P_l^a(xi) = ((1+xi)/(1-xi))^(a/2) F(l+1, -l; 1-a; (1-xi)/2) / Gamma(1-a).
* Olver's function of the second kind on (1, oo):
  Q_nu^a(X) = sqrt(pi) (X^2-1)^(a/2) / (2^(nu+1) X^(nu+a+1))
              * F(nu/2+a/2+1, nu/2+a/2+1/2; nu+3/2; 1/X^2) / Gamma(nu+3/2).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "FerrersArg",
    "LegendreQArg",
    "gamma_complex",
    "rgamma_complex",
    "loggamma_complex",
    "ferrers_p",
    "ferrers_p_values",
    "ferrers_p_t",
    "legendre_q_olver",
    "olver_q_x",
    "legendre_p_minus",
    "hyp2f1_series",
    "lambert_w22",
    "lambert_w22_delta",
    "w22_series",
    "laguerre_deriv",
]

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class FerrersArg:
    """Argument of P_l^{i mu}(xi)."""

    l: int
    mu: float
    xi: float

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise DomainError(f"degree l must be a non-negative integer, got {self.l}")
        if self.mu < 0:
            raise DomainError(f"order mu must be non-negative, got {self.mu}")
        if not abs(self.xi) < 1.0:
            raise DomainError(f"|xi| < 1 required, got xi={self.xi}")


@dataclass(frozen=True)
class LegendreQArg:
    """Argument of Q_{-1/2}^{i mu/2}(X)."""

    mu: float
    X: float

    def __post_init__(self):
        if self.mu < 0:
            raise DomainError(f"order mu must be non-negative, got {self.mu}")
        if not self.X > 1.0:
            raise DomainError(f"X > 1 required, got X={self.X}")


# --------------------------------------------------------------------------
# Gamma
# --------------------------------------------------------------------------


def _is_pole(z):
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _loggamma_right(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    x = np.full(z.shape, _LANCZOS_P[0], dtype=complex)
    for k in range(1, len(_LANCZOS_P)):
        x = x + _LANCZOS_P[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def loggamma_complex(z):
    """A branch of log Gamma(z); exp of it is Gamma(z).

    The imaginary part is not normalized to the principal branch, so use it
    only through exponentials or differences.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(_is_pole(z)):
        bad = z[_is_pole(z)].ravel()[0]
        raise DomainError(f"Gamma has a pole at z={bad.real:g}")
    left = z.real < 0.5
    out = np.empty(z.shape, dtype=complex)
    zr = np.where(left, 1.0 - z, z)
    lg = _loggamma_right(zr)
    out[~left] = lg[~left]
    if np.any(left):
        zl = z[left]
        out[left] = np.log(np.pi) - np.log(np.sin(np.pi * zl)) - lg[left]
    return out if out.ndim else out[()]


def gamma_complex(z):
    """Gamma(z) for complex z by the Lanczos approximation with reflection."""
    z = np.asarray(z, dtype=complex)
    if np.any(_is_pole(z)):
        bad = z[_is_pole(z)].ravel()[0]
        raise DomainError(f"Gamma has a pole at z={bad.real:g}")
    left = z.real < 0.5
    zr = np.where(left, 1.0 - z, z)
    g = np.exp(_loggamma_right(zr))
    out = np.where(left, np.pi / (np.sin(np.pi * z) * np.where(left, g, 1.0)), g)
    return out if out.ndim else out[()]


def rgamma_complex(z):
    """1/Gamma(z), equal to zero at the poles of Gamma."""
    z = np.asarray(z, dtype=complex)
    pole = _is_pole(z)
    zs = np.where(pole, 1.0, z)
    left = zs.real < 0.5
    zr = np.where(left, 1.0 - zs, zs)
    g = np.exp(_loggamma_right(zr))
    out = np.where(left, np.sin(np.pi * zs) * g / np.pi, 1.0 / g)
    out = np.where(pole, 0.0, out)
    return out if out.ndim else out[()]


# --------------------------------------------------------------------------
# Hypergeometric series
# --------------------------------------------------------------------------


def _series_coefficients(a, b, c, zmax, tol=1e-17, kmax=20000):
    """Coefficients (a)_k (b)_k / ((c)_k k!) up to negligible tail at |z| <= zmax."""
    coefs = [1.0 + 0j]
    term = 1.0 + 0j
    peak = 1.0
    k = 0
    while k < kmax:
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1.0))
        k += 1
        coefs.append(term)
        size = abs(term) * zmax**k
        peak = max(peak, size)
        if term == 0 or (size < tol * peak and k > 4):
            break
    else:
        raise DomainError("hypergeometric series did not converge; argument too close to 1")
    return np.array(coefs)


def hyp2f1_series(a, b, c, z):
    """Gauss hypergeometric series 2F1(a, b; c; z) summed directly, |z| < 1."""
    z = np.asarray(z, dtype=complex)
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    if zmax >= 1.0:
        raise DomainError("hyp2f1_series requires |z| < 1")
    coefs = _series_coefficients(complex(a), complex(b), complex(c), zmax)
    out = np.zeros(z.shape, dtype=complex)
    for ck in coefs[::-1]:
        out = out * z + ck
    return out if out.ndim else out[()]


# --------------------------------------------------------------------------
# Ferrers functions
# --------------------------------------------------------------------------


def _ferrers_stack(lmax, a, xi, pref):
    """P_0^a .. P_lmax^a at xi by the upward recurrence in the degree."""
    xi = np.asarray(xi, dtype=float)
    out = [pref * rgamma_complex(1.0 - a)]
    if lmax >= 1:
        out.append(pref * (xi - a) * rgamma_complex(2.0 - a))
    for l in range(1, lmax):
        nxt = ((2 * l + 1) * xi * out[l] - (l + a) * out[l - 1]) / (l - a + 1.0)
        out.append(nxt)
    return out


def ferrers_p_values(l, order, xi):
    """P_l^order(xi) for complex order, vectorized over xi in (-1, 1)."""
    xi = np.asarray(xi, dtype=float)
    if np.any(np.abs(xi) >= 1.0):
        raise DomainError("Ferrers functions need |xi| < 1")
    order = complex(order)
    pref = np.exp(0.5 * order * (np.log1p(xi) - np.log1p(-xi)))
    return _ferrers_stack(int(l), order, xi, pref)[int(l)]


def ferrers_p(arg):
    """P_l^{i mu}(xi) for a validated FerrersArg."""
    return complex(ferrers_p_values(arg.l, 1j * arg.mu, arg.xi))


def ferrers_p_t(l, order, t):
    """Value and t-derivative of P_l^order(tanh t).

    The prefactor ((1+xi)/(1-xi))^(order/2) equals exp(order*t), which keeps
    the evaluation accurate for large |t| where 1 - |tanh t| underflows.
    The derivative uses (1-xi^2) dP_l/dxi = (order-l-1) P_{l+1} + (l+1) xi P_l.
    """
    t = np.asarray(t, dtype=float)
    order = complex(order)
    xi = np.tanh(t)
    pref = np.exp(order * t)
    stack = _ferrers_stack(int(l) + 1, order, xi, pref)
    val = stack[l]
    der = (order - l - 1.0) * stack[l + 1] + (l + 1.0) * xi * stack[l]
    return val, der


# --------------------------------------------------------------------------
# Legendre functions of degree -1/2
# --------------------------------------------------------------------------

_PSI_QUARTER = -np.euler_gamma - 0.5 * np.pi - 3.0 * np.log(2.0)
_PSI_THREE_QUARTER = -np.euler_gamma + 0.5 * np.pi - 3.0 * np.log(2.0)
_SMALL_MU = 1e-6


def _q_zero_order_near_one(w):
    """2F1(3/4, 1/4; 1; 1 - w) for small w > 0 (degenerate case c = a + b)."""
    a, b = 0.75, 0.25
    w = np.asarray(w, dtype=float)
    lw = np.log(w)
    out = np.zeros_like(w)
    coef = 1.0
    psi1 = -np.euler_gamma
    psia, psib = _PSI_THREE_QUARTER, _PSI_QUARTER
    wk = np.ones_like(w)
    for k in range(400):
        term = coef * (2.0 * psi1 - psia - psib - lw) * wk
        out = out + term
        if k > 4 and np.max(np.abs(term)) < 1e-17 * np.max(np.abs(out)):
            break
        coef *= (a + k) * (b + k) / (k + 1.0) ** 2
        psi1 += 1.0 / (k + 1.0)
        psia += 1.0 / (a + k)
        psib += 1.0 / (b + k)
        wk = wk * w
    return out / (np.pi * np.sqrt(2.0))


def olver_q_x(mu, x):
    """Q_{-1/2}^{i mu/2}(coth 2x) for x > 0, vectorized over x.

    Working in x avoids the cancellation in X - 1 when x is large.  The
    result is real for real mu; it is returned as a real array.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("olver_q_x needs x > 0 (X = coth 2x > 1)")
    nu = 0.5j * float(mu)
    a = 0.5 * nu + 0.75
    b = 0.5 * nu + 0.25
    two_x = 2.0 * x
    # log sinh(2x), log cosh(2x), log coth(2x) stable for large x
    lsh = np.where(two_x < 20, np.log(np.sinh(np.minimum(two_x, 20))), two_x - np.log(2.0) + np.log1p(-np.exp(-2 * two_x)))
    lch = two_x - np.log(2.0) + np.log1p(np.exp(-2 * two_x))
    lcoth = lch - lsh
    z = np.tanh(two_x) ** 2
    w = 1.0 / np.cosh(np.minimum(two_x, 350)) ** 2
    pref = np.sqrt(np.pi / 2.0) * np.exp(-nu * lsh - (nu + 0.5) * lcoth)
    out = np.empty(x.shape, dtype=complex)
    near = z > 0.5
    far = ~near
    if np.any(far):
        out[far] = pref[far] * hyp2f1_series(a, b, 1.0, z[far])
    if np.any(near):
        wn = w[near]
        if abs(mu) < _SMALL_MU:
            f = _q_zero_order_near_one(wn)
        else:
            g1 = gamma_complex(-nu) * rgamma_complex(1.0 - a) * rgamma_complex(1.0 - b)
            g2 = gamma_complex(nu) * rgamma_complex(a) * rgamma_complex(b)
            f = g1 * hyp2f1_series(a, b, 1.0 + nu, wn) + np.exp(2.0 * nu * lch[near]) * g2 * hyp2f1_series(
                1.0 - a, 1.0 - b, 1.0 - nu, wn
            )
        out[near] = pref[near] * f
    out = out.real
    return out if out.ndim else out[()]


def legendre_q_olver(arg):
    """Q_{-1/2}^{i mu/2}(X), Olver normalization, for a validated LegendreQArg."""
    x = 0.25 * np.log((arg.X + 1.0) / (arg.X - 1.0))
    return complex(olver_q_x(arg.mu, x))


def legendre_p_minus(mu, X):
    """Legendre P_{-1/2}^{-i mu/2}(X) for X > 1 (used for Wronskian checks).

    Pfaff's transformation maps the argument (1-X)/2 to (X-1)/(X+1) in (0, 1).
    """
    X = np.asarray(X, dtype=float)
    if np.any(X <= 1.0):
        raise DomainError("legendre_p_minus needs X > 1")
    m = 0.5j * float(mu)
    s = (X - 1.0) / (X + 1.0)
    f = hyp2f1_series(0.5, 0.5 + m, 1.0 + m, s)
    out = np.exp(0.5 * m * np.log(s)) * rgamma_complex(1.0 + m) * np.sqrt(2.0 / (1.0 + X)) * f
    return out if out.ndim else out[()]


# --------------------------------------------------------------------------
# Generalized Lambert function W(+2, -2)
# --------------------------------------------------------------------------


def lambert_w22_delta(s):
    """delta = W - 2 where ((W-2)/(W+2)) e^W = s, accurate for tiny s.

    Newton on u = log(delta) for h(u) = u + 2 + e^u - log(4+e^u) - log s,
    which is convex and increasing with h' >= 1, so the iteration converges
    monotonically after the first step.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(~np.isfinite(s)):
        raise DomainError("lambert_w22 requires finite s >= 0")
    pos = s > 0
    out = np.zeros(s.shape)
    if np.any(pos):
        sp_ = s[pos]
        ls = np.log(sp_)
        u = np.where(sp_ < 1.0, ls + np.log(4.0) - 2.0, np.log(np.maximum(ls, 1.0)))
        for _ in range(100):
            e = np.exp(u)
            h = u + 2.0 + e - np.log(4.0 + e) - ls
            dh = 1.0 + e - e / (4.0 + e)
            step = h / dh
            # guard against a wild first step from a poor guess
            step = np.clip(step, -50.0, 50.0)
            u = u - step
            if np.all(np.abs(step) < 1e-15 * np.maximum(1.0, np.abs(u))):
                break
        out[pos] = np.exp(u)
    return out if out.ndim else out[()]


def lambert_w22(s):
    """W >= 2 solving ((W-2)/(W+2)) e^W = s."""
    return 2.0 + lambert_w22_delta(s)


def w22_series(s, nterms=40):
    """W(s)/2 = 1 - 2 sum L'_n(4n) s^n / (n e^{2n}), convergent for |s| < 1."""
    s = np.asarray(s, dtype=float)
    out = np.ones_like(s)
    for n in range(1, nterms + 1):
        out = out - 2.0 * laguerre_deriv(n, 4.0 * n) * np.exp(-2.0 * n) / n * s**n
    return 2.0 * out


# --------------------------------------------------------------------------
# Laguerre
# --------------------------------------------------------------------------


def laguerre_deriv(n, x):
    """L_n'(x) = -L_{n-1}^{(1)}(x) by the three-term recurrence."""
    if n < 1:
        raise DomainError("laguerre_deriv needs n >= 1")
    x = np.asarray(x, dtype=float)
    alpha = 1.0
    prev = np.ones_like(x)
    if n == 1:
        return -prev if prev.ndim else -float(prev)
    cur = 1.0 + alpha - x
    for k in range(1, n - 1):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    out = -cur
    return out if np.ndim(out) else float(out)
