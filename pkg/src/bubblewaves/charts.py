"""Coordinate charts, metrics, Christoffel symbols and wormhole curvature.

The bubble radius is fixed to 1.  Witten points carry five coordinates and
wormhole points four; the wormhole is the slice psi in {0, pi} of the Witten
spacetime, and the two values of psi become the two sheets x > 0 and x < 0.

Charts (coordinates in order):

    schwarzschild  (t, rho, theta, phi, psi)     rho > 1
    polar          (t, r, theta, phi, psi)       r >= 0
    cartesian      (t, y, z, theta, phi)         smooth through the bubble
    xchart         (t, x, theta, phi, psi)       x = arcsinh r
    rindler        (tau, xi, theta, phi, psi)    tau = rho sinh t, xi = rho cosh t
    conformal      (T, Sigma, theta, phi, psi)   T = sigma sinh t, Sigma = sigma cosh t,
                                                 sigma = e^x / 2

Wormhole points drop psi (cartesian becomes (t, y, theta, phi)); in the
signed charts polar, xchart and cartesian the radial coordinate runs over
the whole line, while schwarzschild and rindler carry an explicit sheet label.
The conformal charts cover both sheets through sigma in (0, oo), and the
wormhole-only chart ``conformal_cartesian`` (T, X1, X2, X3) realizes the
conformally flat form Omega^2 (dT^2 - |dX|^2), Omega = 1 + 1/(4(|X|^2 - T^2)).

Ricci tensors use the sign convention of the closed-form wormhole curvature,
which is minus the convention R_{bc} = d_a Gamma^a_{bc} - ... ; with it the
stress tensor is 1/2 R g - Ric.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .specfun import lambert_w22_delta

__all__ = [
    "WITTEN_CHARTS",
    "WORMHOLE_CHARTS",
    "ChartPoint",
    "MetricValue",
    "ChristoffelTable",
    "RicciData",
    "convert",
    "metric",
    "inverse_metric",
    "christoffel",
    "christoffel_numeric",
    "coordinate_jacobian",
    "ricci_numeric",
    "wormhole_curvature",
    "nec_witness",
    "nec_witness_closed",
    "rho_from_plane",
    "w22_prime",
]

WITTEN_CHARTS = ("schwarzschild", "polar", "cartesian", "xchart", "rindler", "conformal")
WORMHOLE_CHARTS = WITTEN_CHARTS + ("conformal_cartesian",)


@dataclass(frozen=True)
class ChartPoint:
    """An event in one chart; five coordinates for Witten, four for the wormhole."""

    chart: str
    coords: tuple
    sheet: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if len(self.coords) not in (4, 5):
            raise DomainError("a chart point has 5 (witten) or 4 (wormhole) coordinates")
        known = WITTEN_CHARTS if len(self.coords) == 5 else WORMHOLE_CHARTS
        if self.chart not in known:
            raise DomainError(f"unknown chart {self.chart!r} for {self.spacetime}")
        if self.sheet not in (1, -1):
            raise DomainError("sheet label must be +1 or -1")
        _check_domain(self)

    @property
    def spacetime(self):
        return "witten" if len(self.coords) == 5 else "wormhole"

    @property
    def dim(self):
        return len(self.coords)

    def array(self):
        return np.array(self.coords)


@dataclass(frozen=True)
class MetricValue:
    components: np.ndarray
    chart: str


@dataclass(frozen=True)
class ChristoffelTable:
    """gamma[a, b, c] = Gamma^a_{bc}."""

    gamma: np.ndarray
    chart: str


@dataclass(frozen=True)
class RicciData:
    ricci: np.ndarray
    scalar: float
    stress: np.ndarray
    metric: np.ndarray = field(repr=False)


def _theta_index(p):
    if p.chart == "conformal_cartesian":
        return None
    if p.chart == "cartesian" and p.dim == 5:
        return 3
    return 2


def _check_domain(p):
    c = p.coords
    worm = p.spacetime == "wormhole"
    k = _theta_index(p)
    if k is not None and not (0.0 <= c[k] <= np.pi):
        raise DomainError(f"theta must lie in [0, pi], got {c[k]}")
    ch = p.chart
    if ch == "schwarzschild" and not c[1] > 1.0:
        raise DomainError(f"schwarzschild chart needs rho > 1, got rho={c[1]}")
    if not worm:
        if ch == "polar" and c[1] < 0:
            raise DomainError(f"polar chart needs r >= 0, got r={c[1]}")
        if ch == "xchart" and c[1] < 0:
            raise DomainError(f"xchart needs x >= 0 on the Witten spacetime, got x={c[1]}")
        if ch == "conformal" and not (c[1] > 0 and c[1] ** 2 - c[0] ** 2 >= 0.25 * (1 - 1e-14)):
            raise DomainError("conformal chart needs Sigma > 0 and Sigma^2 - T^2 >= 1/4")
    else:
        if ch == "conformal" and not c[1] > abs(c[0]):
            raise DomainError("wormhole conformal chart needs Sigma > |T|")
        if ch == "conformal_cartesian" and not c[1] ** 2 + c[2] ** 2 + c[3] ** 2 > c[0] ** 2:
            raise DomainError("conformal_cartesian chart needs |X|^2 > T^2")
    if ch == "rindler" and not c[1] > np.sqrt(c[0] ** 2 + 1.0):
        raise DomainError("rindler chart needs xi > sqrt(tau^2 + 1)")


# --------------------------------------------------------------------------
# plane radius <-> rho through W(+2,-2)
# --------------------------------------------------------------------------


def rho_from_plane(s):
    """(rho, rho - 1) from s = y^2 + z^2, keeping rho - 1 accurate near 0."""
    d = 0.5 * lambert_w22_delta(s)
    return 1.0 + d, d


def w22_prime(rho):
    """dW/ds at W = 2 rho: (1 + 2/W)^2 e^{-W}."""
    return (1.0 + 1.0 / rho) ** 2 * np.exp(-2.0 * rho)


def _plane_radius(x):
    """R(x) = sinh x e^{cosh x} / (1 + cosh x), the (y,z) radius of x >= 0."""
    return np.sinh(x) * np.exp(np.cosh(x)) / (1.0 + np.cosh(x))


def _x_from_rho_minus_one(d):
    # arccosh(1 + d) without cancellation
    return np.log1p(d + np.sqrt(d * (2.0 + d)))


# --------------------------------------------------------------------------
# conversions through the hub (t, x, theta, phi[, psi])
# --------------------------------------------------------------------------


def _to_hub(p):
    c = list(p.coords)
    worm = p.spacetime == "wormhole"
    ch = p.chart
    if ch == "xchart":
        return c
    if ch == "polar":
        return [c[0], np.arcsinh(c[1])] + c[2:]
    if ch == "schwarzschild":
        x = _x_from_rho_minus_one(c[1] - 1.0)
        return [c[0], p.sheet * x if worm else x] + c[2:]
    if ch == "rindler":
        tau, xi = c[0], c[1]
        rho = np.sqrt((xi - tau) * (xi + tau))
        t = np.arctanh(tau / xi)
        x = _x_from_rho_minus_one(rho - 1.0)
        return [t, p.sheet * x if worm else x] + c[2:]
    if ch == "conformal":
        T, S = c[0], c[1]
        sigma = np.sqrt((S - T) * (S + T))
        return [np.arctanh(T / S), np.log(2.0 * sigma)] + c[2:]
    if ch == "conformal_cartesian":
        T, X = c[0], np.array(c[1:])
        S = np.linalg.norm(X)
        sigma = np.sqrt((S - T) * (S + T))
        theta = np.arccos(np.clip(X[2] / S, -1.0, 1.0))
        phi = np.mod(np.arctan2(X[1], X[0]), 2 * np.pi)
        return [np.arctanh(T / S), np.log(2.0 * sigma), theta, phi]
    if ch == "cartesian":
        if worm:
            t, y, th, ph = c
            _, d = rho_from_plane(y * y)
            return [t, np.sign(y) * _x_from_rho_minus_one(d), th, ph]
        t, y, z, th, ph = c
        _, d = rho_from_plane(y * y + z * z)
        psi = np.mod(np.arctan2(z, y), 2 * np.pi) if (y != 0 or z != 0) else 0.0
        return [t, _x_from_rho_minus_one(d), th, ph, psi]
    raise DomainError(f"unknown chart {ch}")


def _from_hub(h, target, worm):
    t, x = h[0], h[1]
    rest = list(h[2:])
    sheet = 1 if x >= 0 else -1
    ax = abs(x)
    if target == "xchart":
        return [t, x] + rest, 1
    if target == "polar":
        return [t, np.sinh(x)] + rest, 1
    if target == "schwarzschild":
        return [t, np.cosh(x)] + rest, sheet
    if target == "rindler":
        rho = np.cosh(x)
        return [rho * np.sinh(t), rho * np.cosh(t)] + rest, sheet
    if target == "conformal":
        sigma = 0.5 * np.exp(x)
        return [sigma * np.sinh(t), sigma * np.cosh(t)] + rest, 1
    if target == "conformal_cartesian":
        sigma = 0.5 * np.exp(x)
        th, ph = rest
        S = sigma * np.cosh(t)
        return [sigma * np.sinh(t), S * np.sin(th) * np.cos(ph), S * np.sin(th) * np.sin(ph), S * np.cos(th)], 1
    if target == "cartesian":
        R = _plane_radius(ax)
        if worm:
            return [t, sheet * R] + rest, 1
        th, ph, psi = rest
        return [t, R * np.cos(psi), R * np.sin(psi), th, ph], 1
    raise DomainError(f"unknown chart {target}")


def convert(p, target):
    """Express the event p in the chart ``target``."""
    worm = p.spacetime == "wormhole"
    allowed = WORMHOLE_CHARTS if worm else WITTEN_CHARTS
    if target not in allowed:
        raise DomainError(f"chart {target!r} is not available on the {p.spacetime} spacetime")
    if target == p.chart:
        return p
    hub = _to_hub(p)
    if target == "schwarzschild" and hub[1] == 0.0:
        raise DomainError("the bubble rho = 1 is outside the schwarzschild chart; use cartesian")
    if target == "rindler" and hub[1] == 0.0:
        raise DomainError("the bubble rho = 1 is outside the rindler chart; use cartesian")
    coords, sheet = _from_hub(hub, target, worm)
    if not worm and target != "cartesian":
        coords[-1] = float(np.mod(coords[-1], 2 * np.pi))
    return ChartPoint(target, tuple(coords), sheet)


def coordinate_jacobian(p, target, h=1e-3):
    """J[a, b] = d(target_a)/d(source_b) by a fourth-order central stencil."""
    x0 = p.array()
    n = len(x0)
    q0 = convert(p, target).array()
    J = np.zeros((len(q0), n))
    for b in range(n):
        step = h * (1.0 + abs(x0[b]))
        vals = []
        for k in (-2, -1, 1, 2):
            xk = x0.copy()
            xk[b] += k * step
            qk = convert(ChartPoint(p.chart, tuple(xk), p.sheet), target).array()
            vals.append(_unwrap_angles(qk, q0, target))
        J[:, b] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * step)
    return J


def _unwrap_angles(q, ref, chart):
    q = q.copy()
    n = len(q)
    idx = []
    if chart == "cartesian":
        idx = [n - 1]
    elif chart != "conformal_cartesian":
        idx = [3] + ([4] if n == 5 else [])
    for i in idx:
        q[i] = ref[i] + np.mod(q[i] - ref[i] + np.pi, 2 * np.pi) - np.pi
    return q


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------


def _metric_array(p):
    c = p.coords
    worm = p.spacetime == "wormhole"
    ch = p.chart
    n = p.dim
    g = np.zeros((n, n))
    if ch == "conformal_cartesian":
        T, X = c[0], np.array(c[1:])
        s = X @ X - T * T
        om2 = (1.0 + 0.25 / s) ** 2
        return om2 * np.diag([1.0, -1.0, -1.0, -1.0])
    th = c[3] if (ch == "cartesian" and not worm) else c[2]
    sin2 = np.sin(th) ** 2
    if ch == "conformal":
        T, S = c[0], c[1]
        s = S * S - T * T
        om2 = (1.0 + 0.25 / s) ** 2
        d = [1.0, -1.0, -S * S, -S * S * sin2]
        if not worm:
            d.append(-16.0 * s * s * (4 * s - 1) ** 2 / (4 * s + 1) ** 4)
        return om2 * np.diag(d)
    if ch == "rindler":
        tau, xi = c[0], c[1]
        s = xi * xi - tau * tau
        q = 1.0 / (s * (s - 1.0))
        g[0, 0] = 1.0 - tau * tau * q
        g[1, 1] = -1.0 - xi * xi * q
        g[0, 1] = g[1, 0] = tau * xi * q
        g[2, 2] = -xi * xi
        g[3, 3] = -xi * xi * sin2
        if not worm:
            g[4, 4] = -1.0 + 1.0 / s
        return g
    ch2 = np.cosh(c[0]) ** 2
    if ch == "schwarzschild":
        rho = c[1]
        f = 1.0 - 1.0 / rho**2
        d = [rho**2, -1.0 / f, -(rho**2) * ch2, -(rho**2) * ch2 * sin2]
        if not worm:
            d.append(-f)
        return np.diag(d)
    if ch == "polar":
        r = c[1]
        d = [r * r + 1, -1.0, -(r * r + 1) * ch2, -(r * r + 1) * ch2 * sin2]
        if not worm:
            d.append(-r * r / (r * r + 1))
        return np.diag(d)
    if ch == "xchart":
        x = c[1]
        C2 = np.cosh(x) ** 2
        d = [C2, -C2, -C2 * ch2, -C2 * ch2 * sin2]
        if not worm:
            d.append(-np.tanh(x) ** 2)
        return np.diag(d)
    if ch == "cartesian":
        if worm:
            s = c[1] ** 2
            th = c[2]
        else:
            s = c[1] ** 2 + c[2] ** 2
            th = c[3]
        sin2 = np.sin(th) ** 2
        rho, _ = rho_from_plane(s)
        hh = (1.0 + rho) ** 2 * np.exp(-2.0 * rho) / rho**2
        if worm:
            d = [rho**2, -hh, -(rho**2) * ch2, -(rho**2) * ch2 * sin2]
        else:
            d = [rho**2, -hh, -hh, -(rho**2) * ch2, -(rho**2) * ch2 * sin2]
        return np.diag(d)
    raise DomainError(f"unknown chart {ch}")


def _check_spacetime(p, spacetime):
    if spacetime is not None and spacetime != p.spacetime:
        raise DomainError(f"point has {p.dim} coordinates, which is not a {spacetime} point")


def metric(p, spacetime=None):
    """Metric components g_{ab} of the chart at p."""
    _check_spacetime(p, spacetime)
    return MetricValue(_metric_array(p), p.chart)


def inverse_metric(p, spacetime=None):
    """g^{ab}; raises at coordinate degeneracies where the inverse does not exist."""
    g = metric(p, spacetime).components
    diag = np.diag(g)
    if np.any(diag == 0) or abs(np.linalg.det(g)) < 1e-300:
        raise DomainError(f"metric is degenerate at {p.coords} in chart {p.chart} (pole or pinch)")
    return np.linalg.inv(g)


# --------------------------------------------------------------------------
# Christoffel symbols
# --------------------------------------------------------------------------


def _gamma_schwarzschild(p):
    t, rho, th = p.coords[0], p.coords[1], p.coords[2]
    n = p.dim
    G = np.zeros((n, n, n))
    f = 1.0 - 1.0 / rho**2
    sc = np.sinh(t) * np.cosh(t)
    th_t = np.tanh(t)
    s, c = np.sin(th), np.cos(th)
    G[0, 0, 1] = G[0, 1, 0] = 1.0 / rho
    G[0, 2, 2] = sc
    G[0, 3, 3] = sc * s * s
    G[1, 0, 0] = rho * f
    G[1, 1, 1] = -1.0 / rho**3 / f
    G[1, 2, 2] = -rho * f * np.cosh(t) ** 2
    G[1, 3, 3] = G[1, 2, 2] * s * s
    G[2, 2, 0] = G[2, 0, 2] = th_t
    G[2, 1, 2] = G[2, 2, 1] = 1.0 / rho
    G[2, 3, 3] = -s * c
    G[3, 0, 3] = G[3, 3, 0] = th_t
    G[3, 1, 3] = G[3, 3, 1] = 1.0 / rho
    G[3, 2, 3] = G[3, 3, 2] = c / s if s != 0 else np.inf
    if n == 5:
        G[1, 4, 4] = -f / rho**3
        G[4, 1, 4] = G[4, 4, 1] = 1.0 / rho**3 / f
    return G


def _gamma_cartesian(p):
    worm = p.spacetime == "wormhole"
    if worm:
        t, y, th = p.coords[0], p.coords[1], p.coords[2]
        z = 0.0
    else:
        t, y, z, th = p.coords[0], p.coords[1], p.coords[2], p.coords[3]
    rho, _ = rho_from_plane(y * y + z * z)
    wp = w22_prime(rho)
    sc = np.sinh(t) * np.cosh(t)
    th_t = np.tanh(t)
    s, c = np.sin(th), np.cos(th)
    big = rho * np.exp(2.0 * rho) / (1.0 + 1.0 / rho) ** 2 * wp
    K = (1.0 + 1.0 / rho + 1.0 / rho**2) / (1.0 + 1.0 / rho) * wp
    # index layout
    if worm:
        iy, iz, ith, iph = 1, None, 2, 3
        n = 4
    else:
        iy, iz, ith, iph = 1, 2, 3, 4
        n = 5
    G = np.zeros((n, n, n))
    G[0, 0, iy] = G[0, iy, 0] = y / rho * wp
    G[0, ith, ith] = sc
    G[0, iph, iph] = sc * s * s
    G[iy, 0, 0] = y * big
    G[iy, iy, iy] = -y * K
    G[iy, ith, ith] = -y * big * np.cosh(t) ** 2
    G[iy, iph, iph] = G[iy, ith, ith] * s * s
    G[ith, ith, 0] = G[ith, 0, ith] = th_t
    G[iph, iph, 0] = G[iph, 0, iph] = th_t
    G[ith, iph, iph] = -s * c
    G[iph, ith, iph] = G[iph, iph, ith] = c / s if s != 0 else np.inf
    G[ith, ith, iy] = G[ith, iy, ith] = y / rho * wp
    G[iph, iph, iy] = G[iph, iy, iph] = y / rho * wp
    if not worm:
        G[0, 0, iz] = G[0, iz, 0] = z / rho * wp
        G[iz, 0, 0] = z * big
        G[iy, iz, iz] = y * K
        G[iz, iy, iz] = G[iz, iz, iy] = -y * K
        G[iy, iy, iz] = G[iy, iz, iy] = -z * K
        G[iz, iz, iz] = -z * K
        G[iz, iy, iy] = z * K
        G[iz, ith, ith] = -z * big * np.cosh(t) ** 2
        G[iz, iph, iph] = G[iz, ith, ith] * s * s
        G[ith, ith, iz] = G[ith, iz, ith] = z / rho * wp
        G[iph, iph, iz] = G[iph, iz, iph] = z / rho * wp
    return G


@lru_cache(maxsize=None)
def _symbolic_gamma(chart, spacetime):
    """Lambdified closed-form Christoffel symbols for the charts outside the tables."""
    import sympy as sp

    worm = spacetime == "wormhole"
    a, b, th, ph, psi = sp.symbols("a b theta phi psi", real=True)
    sin2 = sp.sin(th) ** 2
    if chart == "conformal_cartesian":
        T, X1, X2, X3 = sp.symbols("T X1 X2 X3", real=True)
        xs = [T, X1, X2, X3]
        s = X1**2 + X2**2 + X3**2 - T**2
        om2 = (1 + 1 / (4 * s)) ** 2
        g = sp.diag(om2, -om2, -om2, -om2)
    else:
        xs = [a, b, th, ph] + ([] if worm else [psi])
        if chart == "polar":
            d = [b**2 + 1, -1, -(b**2 + 1) * sp.cosh(a) ** 2, -(b**2 + 1) * sp.cosh(a) ** 2 * sin2]
            d += [] if worm else [-(b**2) / (b**2 + 1)]
            g = sp.diag(*d)
        elif chart == "xchart":
            C2 = sp.cosh(b) ** 2
            d = [C2, -C2, -C2 * sp.cosh(a) ** 2, -C2 * sp.cosh(a) ** 2 * sin2]
            d += [] if worm else [-sp.tanh(b) ** 2]
            g = sp.diag(*d)
        elif chart == "conformal":
            s = b**2 - a**2
            om2 = (1 + 1 / (4 * s)) ** 2
            d = [om2, -om2, -om2 * b**2, -om2 * b**2 * sin2]
            d += [] if worm else [-om2 * 16 * s**2 * (4 * s - 1) ** 2 / (4 * s + 1) ** 4]
            g = sp.diag(*d)
        elif chart == "rindler":
            s = b**2 - a**2
            q = 1 / (s * (s - 1))
            n = 4 if worm else 5
            g = sp.zeros(n, n)
            g[0, 0] = 1 - a**2 * q
            g[1, 1] = -1 - b**2 * q
            g[0, 1] = g[1, 0] = a * b * q
            g[2, 2] = -(b**2)
            g[3, 3] = -(b**2) * sin2
            if not worm:
                g[4, 4] = -1 + 1 / s
        elif chart == "schwarzschild":
            f = 1 - 1 / b**2
            d = [b**2, -1 / f, -(b**2) * sp.cosh(a) ** 2, -(b**2) * sp.cosh(a) ** 2 * sin2]
            d += [] if worm else [-f]
            g = sp.diag(*d)
        else:
            raise DomainError(f"no symbolic metric for chart {chart}")
    n = len(xs)
    gi = sp.diag(*[1 / g[i, i] for i in range(n)]) if g.is_diagonal() else g.inv()
    dg = [[[sp.diff(g[i, j], xs[k]) for k in range(n)] for j in range(n)] for i in range(n)]
    gam = [
        [
            [sum(gi[al, d] * (dg[d][be][ga] + dg[d][ga][be] - dg[be][ga][d]) for d in range(n)) / 2 for ga in range(n)]
            for be in range(n)
        ]
        for al in range(n)
    ]
    fn = sp.lambdify(xs, gam, "numpy")
    return fn


def christoffel(p, spacetime=None):
    """Closed-form Christoffel symbols Gamma^a_{bc} at an interior point of the chart."""
    _check_spacetime(p, spacetime)
    ch = p.chart
    if ch == "schwarzschild":
        if p.coords[1] <= 1.0:
            raise DomainError("Christoffel symbols blow up at rho = 1; use the cartesian chart")
        G = _gamma_schwarzschild(p)
    elif ch == "cartesian":
        G = _gamma_cartesian(p)
    else:
        if ch == "polar" and p.coords[1] == 0.0 or ch == "xchart" and p.coords[1] == 0.0:
            raise DomainError("r = 0 is a pseudo-singularity of this chart; use the cartesian chart")
        if ch == "conformal" and p.spacetime == "witten":
            T, S = p.coords[0], p.coords[1]
            if S * S - T * T <= 0.25:
                raise DomainError("Sigma^2 - T^2 = 1/4 is the bubble; use the cartesian chart")
        G = np.array(_symbolic_gamma(ch, p.spacetime)(*p.coords), dtype=float)
    if not np.all(np.isfinite(G)):
        raise DomainError(f"Christoffel symbols are singular at {p.coords} in chart {ch}")
    return ChristoffelTable(G, ch)


def _metric_at(p, x):
    return _metric_array(ChartPoint(p.chart, tuple(x), p.sheet))


def _metric_derivative(p, h=None):
    """dg[k, a, b] = d_k g_{ab} by Richardson-extrapolated central differences."""
    x0 = p.array()
    n = len(x0)
    dg = np.zeros((n, n, n))
    for k in range(n):
        step = (1e-4 * (1.0 + abs(x0[k]))) if h is None else h * (1.0 + abs(x0[k]))

        def cd(hk):
            xp, xm = x0.copy(), x0.copy()
            xp[k] += hk
            xm[k] -= hk
            return (_metric_at(p, xp) - _metric_at(p, xm)) / (2 * hk)

        dg[k] = (4.0 * cd(0.5 * step) - cd(step)) / 3.0
    return dg


def christoffel_numeric(p, spacetime=None, h=None):
    """Christoffel symbols from central differences of metric()."""
    _check_spacetime(p, spacetime)
    g = _metric_array(p)
    gi = np.linalg.inv(g)
    dg = _metric_derivative(p, h)
    # Gamma^a_{bc} = 1/2 g^{ad} (d_b g_{dc} + d_c g_{db} - d_d g_{bc})
    lower = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg)
    G = np.einsum("ad,dbc->abc", gi, lower)
    G = 0.5 * (G + np.swapaxes(G, 1, 2))
    return ChristoffelTable(G, p.chart)


def _ricci_from(gamma_fn, p, h):
    """Ricci (closed-form sign convention) from a Christoffel function and FD derivatives."""
    x0 = p.array()
    n = len(x0)
    G = gamma_fn(p)
    dG = np.zeros((n, n, n, n))  # dG[k, a, b, c] = d_k Gamma^a_{bc}
    for k in range(n):
        step = h * (1.0 + abs(x0[k]))

        def cd(hk):
            xp, xm = x0.copy(), x0.copy()
            xp[k] += hk
            xm[k] -= hk
            return (gamma_fn(ChartPoint(p.chart, tuple(xp), p.sheet)) - gamma_fn(ChartPoint(p.chart, tuple(xm), p.sheet))) / (2 * hk)

        dG[k] = (4.0 * cd(0.5 * step) - cd(step)) / 3.0
    ric = (
        np.einsum("aabc->bc", dG)
        - np.einsum("caba->bc", dG)
        + np.einsum("aad,dbc->bc", G, G)
        - np.einsum("acd,dba->bc", G, G)
    )
    ric = -0.5 * (ric + ric.T)
    return ric


def ricci_numeric(p, h=2e-3):
    """Ricci tensor with every derivative taken by finite differences of metric()."""
    return _ricci_from(lambda q: christoffel_numeric(q).gamma, p, h)


# --------------------------------------------------------------------------
# wormhole curvature in the conformally flat chart
# --------------------------------------------------------------------------


def _wormhole_check(T, X):
    X = np.asarray(X, dtype=float)
    s = X @ X - T * T
    if not s > 0:
        raise DomainError("wormhole curvature needs |X|^2 - T^2 > 0")
    return X, s


def wormhole_curvature(T, X):
    """Closed-form Ricci tensor, scalar and stress tensor of the wormhole at (T, X)."""
    X, s = _wormhole_check(T, X)
    D = (s + 0.25) ** 2 * s
    ric = np.zeros((4, 4))
    r2 = X @ X
    ric[0, 0] = (r2 + 3.0 * T * T) / D
    for j in range(3):
        ric[0, j + 1] = ric[j + 1, 0] = -4.0 * T * X[j] / D
        ric[j + 1, j + 1] = (4.0 * X[j] ** 2 - r2 + T * T) / D
        for k in range(j + 1, 3):
            ric[j + 1, k + 1] = ric[k + 1, j + 1] = 4.0 * X[j] * X[k] / D
    om2 = (1.0 + 0.25 / s) ** 2
    g = om2 * np.diag([1.0, -1.0, -1.0, -1.0])
    gi = np.diag(1.0 / np.diag(g))
    scalar = float(np.einsum("ab,ab->", gi, ric))
    stress = 0.5 * scalar * g - ric
    return RicciData(ric, scalar, stress, g)


def nec_witness(T, X, j, sign=1):
    """T_{ab} V^a V^b for the null vector V = d_0 + sign * d_j (j in 1..3)."""
    if j not in (1, 2, 3) or sign not in (1, -1):
        raise DomainError("j must be 1, 2 or 3 and sign +1 or -1")
    data = wormhole_curvature(T, X)
    V = np.zeros(4)
    V[0] = 1.0
    V[j] = sign
    return float(V @ data.stress @ V)


def nec_witness_closed(T, X, j, sign=1):
    """-4 (T - sign X^j)^2 / ((|X|^2 - T^2 + 1/4)^2 (|X|^2 - T^2))."""
    X, s = _wormhole_check(T, X)
    return -4.0 * (T - sign * X[j - 1]) ** 2 / ((s + 0.25) ** 2 * s)
