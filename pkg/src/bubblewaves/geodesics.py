"""Causal geodesics of the Witten spacetime and of the wormhole slice.

States live in the schwarzschild chart away from the bubble and in the
cartesian chart near it.  ``integrate`` switches to cartesian when rho drops
below 1.05 and back when it exceeds 1.10.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp

from .charts import ChartPoint, christoffel, convert, metric, rho_from_plane
from .errors import ChartSwitchRequired, ConvergenceError, DomainError

__all__ = [
    "GeodesicState",
    "ConservedSet",
    "Trajectory",
    "geodesic_rhs",
    "integrate",
    "conserved",
    "orbit_period",
    "to_chart",
    "explicit_geodesic",
    "rhs_residual",
    "r_star",
    "preset_state",
    "PRESETS",
    "SWITCH_IN",
    "SWITCH_OUT",
]

SWITCH_IN = 1.05
SWITCH_OUT = 1.10
_DYNAMIC_CHARTS = ("schwarzschild", "cartesian")


@dataclass(frozen=True)
class GeodesicState:
    point: ChartPoint
    velocity: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.velocity, dtype=float)
        if v.shape != (self.point.dim,):
            raise DomainError("velocity must have one component per coordinate")
        object.__setattr__(self, "velocity", v)

    def norm(self):
        """E = g(xdot, xdot)."""
        g = metric(self.point).components
        return float(self.velocity @ g @ self.velocity)


@dataclass(frozen=True)
class ConservedSet:
    E: float
    K_phi: float
    K_psi: float
    Kp_t: float
    Kpp_t: float

    def as_array(self):
        return np.array([self.E, self.K_phi, self.K_psi, self.Kp_t, self.Kpp_t])


@dataclass
class Trajectory:
    lambdas: np.ndarray
    states: list
    tolerance: float
    y_crossings: list = field(default_factory=list)  # (lambda, sign of ydot)
    switches: list = field(default_factory=list)  # (lambda, new chart)

    def rho(self):
        return np.array([_rho_of(s.point) for s in self.states])

    def cartesian(self):
        """Samples as (coords, velocity) arrays in the cartesian chart."""
        out = [to_chart(s, "cartesian") for s in self.states]
        return np.array([s.point.coords for s in out]), np.array([s.velocity for s in out])


def _rho_of(p):
    if p.chart == "schwarzschild":
        return p.coords[1]
    if p.chart == "cartesian":
        s = p.coords[1] ** 2 + (p.coords[2] ** 2 if p.dim == 5 else 0.0)
        return rho_from_plane(s)[0]
    return _rho_of(convert(p, "cartesian"))


def _plane_radius_and_slope(rho):
    r = np.sqrt((rho - 1.0) * (rho + 1.0))
    e = np.exp(rho) / (1.0 + rho)
    R = r * e
    dR = e * (rho / r + r * rho / (1.0 + rho))
    return R, dR


def to_chart(s, target):
    """Re-express a geodesic state in the schwarzschild or cartesian chart."""
    p = s.point
    if p.chart == target:
        return s
    if {p.chart, target} != set(_DYNAMIC_CHARTS):
        raise DomainError("velocity conversion is implemented between schwarzschild and cartesian")
    worm = p.spacetime == "wormhole"
    q = convert(p, target)
    v = s.velocity
    if target == "cartesian":
        rho = p.coords[1]
        R, dR = _plane_radius_and_slope(rho)
        if worm:
            t, _, th, ph = p.coords
            vt, vrho, vth, vph = v
            vy = p.sheet * dR * vrho
            return GeodesicState(q, np.array([vt, vy, vth, vph]))
        psi = p.coords[4]
        vt, vrho, vth, vph, vpsi = v
        vy = dR * vrho * np.cos(psi) - R * vpsi * np.sin(psi)
        vz = dR * vrho * np.sin(psi) + R * vpsi * np.cos(psi)
        return GeodesicState(q, np.array([vt, vy, vz, vth, vph]))
    rho = q.coords[1]
    R, dR = _plane_radius_and_slope(rho)
    if worm:
        vt, vy, vth, vph = v
        vrho = np.sign(p.coords[1]) * vy / dR
        return GeodesicState(q, np.array([vt, vrho, vth, vph]))
    y, z = p.coords[1], p.coords[2]
    vt, vy, vz, vth, vph = v
    vrho = (y * vy + z * vz) / (R * dR)
    vpsi = (y * vz - z * vy) / (R * R)
    return GeodesicState(q, np.array([vt, vrho, vth, vph, vpsi]))


def geodesic_rhs(s):
    """(xdot, xddot) with xddot^a = -Gamma^a_{bc} xdot^b xdot^c."""
    p = s.point
    if p.chart == "schwarzschild" and p.coords[1] <= 1.0:
        raise ChartSwitchRequired("rho reached the bubble; continue in the cartesian chart")
    G = christoffel(p).gamma
    v = s.velocity
    return v.copy(), -np.einsum("abc,b,c->a", G, v, v)


def _vector_field(chart, sheet):
    def f(_, u):
        n = len(u) // 2
        p = ChartPoint.__new__(ChartPoint)
        object.__setattr__(p, "chart", chart)
        object.__setattr__(p, "coords", tuple(u[:n]))
        object.__setattr__(p, "sheet", sheet)
        G = christoffel(p).gamma
        v = u[n:]
        return np.concatenate([v, -np.einsum("abc,b,c->a", G, v, v)])

    return f


def _events(chart, dim):
    if chart == "schwarzschild":

        def enter(_, u):
            return u[1] - SWITCH_IN

        enter.terminal = True
        enter.direction = -1
        return [enter]

    def leave(_, u):
        s = u[1] ** 2 + (u[2] ** 2 if dim == 5 else 0.0)
        return rho_from_plane(s)[0] - SWITCH_OUT

    leave.terminal = True
    leave.direction = 1

    def ycross(_, u):
        return u[1]

    ycross.terminal = False
    ycross.direction = 0
    return [leave, ycross]


def _pick_chart(s):
    rho = _rho_of(s.point)
    if s.point.chart in _DYNAMIC_CHARTS:
        if s.point.chart == "schwarzschild" and rho < SWITCH_IN:
            return to_chart(s, "cartesian")
        return s
    raise DomainError("geodesic states must be given in the schwarzschild or cartesian chart")


def integrate(s0, lambda_span, tol=1e-10, n_samples=401, max_switches=10000):
    """Integrate a causal geodesic over the affine interval ``lambda_span``."""
    if s0.norm() < -1e-10 * (1.0 + np.abs(s0.velocity).max() ** 2):
        raise DomainError("initial velocity is spacelike; only causal geodesics are integrated")
    lam0, lam1 = map(float, lambda_span)
    if not lam1 > lam0:
        raise DomainError("lambda_span must be increasing")
    samples = np.linspace(lam0, lam1, n_samples)
    s = _pick_chart(s0)
    lam = lam0
    segments = []
    crossings = []
    switches = []
    while lam < lam1:
        p = s.point
        dim = p.dim
        u0 = np.concatenate([p.coords, s.velocity])
        sol = solve_ivp(
            _vector_field(p.chart, p.sheet),
            (lam, lam1),
            u0,
            method="DOP853",
            rtol=tol,
            atol=tol,
            dense_output=True,
            events=_events(p.chart, dim),
        )
        if sol.status < 0:
            raise ConvergenceError(f"integration failed at lambda={sol.t[-1]}: {sol.message}", s)
        segments.append((lam, sol.t[-1], p.chart, p.sheet, sol.sol))
        if p.chart == "cartesian":
            for lc, uc in zip(sol.t_events[1], sol.y_events[1]):
                crossings.append((float(lc), float(np.sign(uc[dim + 1]))))
        lam_end = sol.t[-1]
        if sol.status == 1 and lam_end < lam1:
            u = sol.y[:, -1]
            q = ChartPoint(p.chart, tuple(u[:dim]), p.sheet)
            st = GeodesicState(q, u[dim:])
            target = "cartesian" if p.chart == "schwarzschild" else "schwarzschild"
            s = to_chart(st, target)
            switches.append((float(lam_end), target))
            if len(switches) > max_switches:
                raise ConvergenceError("chart switching does not terminate", st)
        lam = lam_end
        if lam >= lam1:
            break
        if sol.status == 0:
            break
    states = []
    for ls in samples:
        for a, b, chart, sheet, dense in segments:
            if a - 1e-14 <= ls <= b + 1e-14:
                u = dense(ls)
                dim = len(u) // 2
                states.append(GeodesicState(ChartPoint(chart, tuple(u[:dim]), sheet), u[dim:]))
                break
    crossings = sorted(set(crossings))
    return Trajectory(samples, states, tol, crossings, switches)


# --------------------------------------------------------------------------
# conserved quantities
# --------------------------------------------------------------------------


def conserved(s):
    """E, K_phi, K_psi and the two boost charges K'_t, K''_t of a state."""
    p = s.point
    if p.chart not in _DYNAMIC_CHARTS:
        raise DomainError("conserved() needs a schwarzschild or cartesian state")
    E = s.norm()
    v = s.velocity
    worm = p.spacetime == "wormhole"
    if p.chart == "schwarzschild":
        t, rho, th, ph = p.coords[:4]
        vt, _, vth, vph = v[:4]
        K_psi = 0.0 if worm else (1.0 - 1.0 / rho**2) * v[4]
    else:
        if worm:
            t, y, th, ph = p.coords
            vt, _, vth, vph = v
            rho = rho_from_plane(y * y)[0]
            K_psi = 0.0
        else:
            t, y, z, th, ph = p.coords
            vt, vy, vz, vth, vph = v
            rho = rho_from_plane(y * y + z * z)[0]
            h = (1.0 + rho) ** 2 * np.exp(-2.0 * rho) / rho**2
            K_psi = h * (y * vz - z * vy)
    r2 = rho * rho
    sc = np.sinh(t) * np.cosh(t)
    K_phi = r2 * np.cosh(t) ** 2 * np.sin(th) ** 2 * vph
    n1 = np.sin(th) * np.cos(ph)
    n2 = np.sin(th) * np.sin(ph)
    dn1 = np.cos(th) * np.cos(ph) * vth - np.sin(th) * np.sin(ph) * vph
    dn2 = np.cos(th) * np.sin(ph) * vth + np.sin(th) * np.cos(ph) * vph
    Kp = r2 * (n1 * vt - sc * dn1)
    Kpp = r2 * (n2 * vt - sc * dn2)
    return ConservedSet(float(E), float(K_phi), float(K_psi), float(Kp), float(Kpp))


def orbit_period(E, cons):
    """Affine period 4 lambda* of a timelike geodesic through the bubble centre.

    With R*^2 = (K'^2 + K''^2 - K_phi^2)/E the radial motion obeys
    rhodot^2 = E (1 - 1/rho^2)(R*^2/rho^2 - 1), so
    lambda* = E^{-1/2} int_1^{R*} (1 - 1/r^2)^{-1/2} (R*^2/r^2 - 1)^{-1/2} dr.
    The substitution r = 1 + (R* - 1) sin^2 u removes both endpoint singularities.
    """
    if not E > 0:
        raise DomainError("orbit_period needs a timelike geodesic (E > 0)")
    if abs(cons.K_psi) > 1e-8 * (1.0 + abs(cons.Kp_t) + abs(cons.Kpp_t)):
        raise DomainError("orbit_period needs K_psi = 0 (motion in a plane through the centre)")
    Rs2 = (cons.Kp_t**2 + cons.Kpp_t**2 - cons.K_phi**2) / E
    if Rs2 < 1.0 - 1e-12:
        raise DomainError("R* < 1: the data do not describe an orbit through the bubble")
    Rs = np.sqrt(max(Rs2, 1.0))
    a = Rs - 1.0

    def integrand(u):
        r = 1.0 + a * np.sin(u) ** 2
        return 2.0 * r * r / np.sqrt((r + 1.0) * (Rs + r))

    val, _ = quad(integrand, 0.0, 0.5 * np.pi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 4.0 * val / np.sqrt(E)


def r_star(E, cons):
    """Turning radius R* of a timelike geodesic."""
    return float(np.sqrt((cons.Kp_t**2 + cons.Kpp_t**2 - cons.K_phi**2) / E))


# --------------------------------------------------------------------------
# explicit families and presets
# --------------------------------------------------------------------------


def explicit_geodesic(name, lam, **kw):
    """Closed-form geodesics: returns (chart, x, xdot, xddot) at affine parameter lam."""
    lam = float(lam)
    if name == "null-equatorial":
        rho0, psi0 = kw.get("rho0", 2.0), kw.get("psi0", 0.3)
        K = kw.get("K", 1.0)
        q = K * lam
        x = [np.arcsinh(q), rho0, 0.5 * np.pi, np.arctan(q), psi0]
        xd = [K / np.sqrt(1 + q * q), 0.0, 0.0, K / (1 + q * q), 0.0]
        xdd = [-K * K * q / (1 + q * q) ** 1.5, 0.0, 0.0, -2 * K * K * q / (1 + q * q) ** 2, 0.0]
        return "schwarzschild", np.array(x), np.array(xd), np.array(xdd)
    if name == "rotating":
        E, rho0 = kw.get("E", 1.0), kw.get("rho0", 1.2)
        if not 1.0 < rho0 < np.sqrt(2.0):
            raise DomainError("rotating orbits need 1 < rho0 < sqrt 2")
        a = np.sqrt(E) / (rho0 * np.sqrt(2 - rho0**2))
        b = rho0 * np.sqrt(E) / np.sqrt(2 - rho0**2)
        x = [a * lam, rho0, 0.5 * np.pi, 0.0, b * lam]
        return "schwarzschild", np.array(x), np.array([a, 0, 0, 0, b]), np.zeros(5)
    if name == "null-rho-sqrt2":
        x = [lam, np.sqrt(2.0), 0.5 * np.pi, 0.0, 2 * lam]
        return "schwarzschild", np.array(x), np.array([1.0, 0, 0, 0, 2.0]), np.zeros(5)
    if name == "bubble-static":
        E = kw.get("E", 1.0)
        th, ph = kw.get("theta", 0.7), kw.get("phi", 1.1)
        x = [np.sqrt(E) * lam, 0.0, 0.0, th, ph]
        return "cartesian", np.array(x), np.array([np.sqrt(E), 0, 0, 0, 0]), np.zeros(5)
    raise DomainError(f"unknown explicit geodesic {name!r}")


def rhs_residual(name, lams, **kw):
    """max |xddot + Gamma(xdot, xdot)| along a closed-form geodesic."""
    worst = 0.0
    for lam in lams:
        chart, x, xd, xdd = explicit_geodesic(name, lam, **kw)
        s = GeodesicState(ChartPoint(chart, tuple(x)), xd)
        _, acc = geodesic_rhs(s)
        worst = max(worst, float(np.max(np.abs(acc - xdd))))
    return worst


_BUBBLE_H = 4.0 * np.exp(-2.0)  # (1+rho)^2 e^{-2 rho}/rho^2 at rho = 1


def preset_state(name, **kw):
    """Initial states used by the command line and the test-suite."""
    if name == "null-through-bubble":
        alpha = kw.get("alpha", 0.4)
        vt = np.sqrt(_BUBBLE_H)
        p = ChartPoint("cartesian", (0.0, 0.0, 0.0, 0.5 * np.pi, 0.0))
        return GeodesicState(p, np.array([vt, np.cos(alpha), np.sin(alpha), 0.0, 0.0]))
    if name == "timelike-through-origin":
        E = kw.get("E", 1.0)
        vy = kw.get("vy", 1.5)
        vt = np.sqrt(E + _BUBBLE_H * vy * vy)
        p = ChartPoint("cartesian", (kw.get("t0", 0.0), 0.0, 0.0, 0.5 * np.pi, kw.get("phi0", 0.0)))
        return GeodesicState(p, np.array([vt, vy, 0.0, 0.0, 0.0]))
    if name == "rotating":
        chart, x, xd, _ = explicit_geodesic("rotating", 0.0, **kw)
        return GeodesicState(ChartPoint(chart, tuple(x)), xd)
    if name == "null-rho-sqrt2":
        chart, x, xd, _ = explicit_geodesic("null-rho-sqrt2", 0.0)
        return GeodesicState(ChartPoint(chart, tuple(x)), xd)
    if name == "null-equatorial":
        chart, x, xd, _ = explicit_geodesic("null-equatorial", 0.0, **kw)
        return GeodesicState(ChartPoint(chart, tuple(x)), xd)
    if name == "bubble-static":
        chart, x, xd, _ = explicit_geodesic("bubble-static", 0.0, **kw)
        return GeodesicState(ChartPoint(chart, tuple(x)), xd)
    raise DomainError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


PRESETS = (
    "null-through-bubble",
    "timelike-through-origin",
    "rotating",
    "null-rho-sqrt2",
    "null-equatorial",
    "bubble-static",
)
