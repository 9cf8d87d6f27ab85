"""The invariant suite: one function per acceptance property, each returning a CheckResult.

Every check compares an implementation against an independent route (adaptive ODE
integration, shooting, finite differences, quadrature) or against an exact identity.
"""

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import charts, desitter, fields, geodesics, specfun, spectral
from .desitter import ModeCauchyData, ModeSolution

__all__ = ["CheckResult", "CHECKS", "SUITES", "run_checks", "shooting_ground_state", "random_bump"]


@dataclass
class CheckResult:
    number: int
    name: str
    value: float
    tol: float
    passed: bool
    detail: dict = field(default_factory=dict)
    runtime: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number:2d} {self.name}: value={self.value:.3e} tol={self.tol:.1e} ({self.runtime:.1f}s)"


def _result(number, name, value, tol, start, passed=None, **detail):
    value = float(value)
    ok = bool(value < tol) if passed is None else bool(passed)
    return CheckResult(number, name, value, tol, ok, detail, time.perf_counter() - start)


def _rand_complex(rng, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


# --------------------------------------------------------------------------
# de Sitter modes
# --------------------------------------------------------------------------


def check_unitarity(seed=0, count=1000):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        l = int(rng.integers(0, 13))
        lam = 60.0 - rng.uniform(0.0, 59.0)  # (1, 60]
        wp, wm = _rand_complex(rng), _rand_complex(rng)
        op, om = desitter.scatter_mode(l, lam, wp, wm)
        worst = max(worst, abs(abs(op) - abs(wp)), abs(abs(om) - abs(wm)))
    runtime = time.perf_counter() - start
    return _result(1, "scattering unitarity", worst, 1e-12, start, worst < 1e-12 and runtime < 1.0, runtime_limit=1.0)


def check_no_mixing(seed=1, count=50):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for j in range(count):
        l = int(rng.integers(0, 9))
        lam = 30.0 - rng.uniform(0.0, 29.0)
        mu = np.sqrt(lam - 1.0)
        sign = 1 if j % 2 == 0 else -1
        t0 = -30.0
        ph = np.exp(sign * 1j * mu * t0)
        data = ModeCauchyData(ph, sign * 1j * mu * ph)
        t_eval = np.linspace(28.0, 30.0, 41)
        t, w, dw = desitter.ode_oracle(lam, l, data, (t0, 30.0), tol=1e-10, t_eval=t_eval)
        cp, cm = desitter.fit_free_wave(t, w, dw, mu)
        same, other = (cp, cm) if sign > 0 else (cm, cp)
        worst = max(worst, abs(other) / abs(same))
    runtime = time.perf_counter() - start
    return _result(2, "no frequency mixing", worst, 1e-5, start, worst < 1e-5 and runtime < 30.0, runtime_limit=30.0)


def check_closed_form(seed=2, count=20):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    t_eval = np.linspace(-20.0, 20.0, 401)
    for _ in range(count):
        l = int(rng.integers(0, 9))
        lam = 1.0 + rng.uniform(0.05, 29.0)
        sol = ModeSolution(lam, l, _rand_complex(rng), _rand_complex(rng))
        w, dw = desitter.mode_value(sol, t_eval)
        scale = np.max(np.abs(w))
        sol = ModeSolution(lam, l, sol.A_plus / scale, sol.A_minus / scale)
        w, dw = desitter.mode_value(sol, t_eval)
        _, wo, _ = desitter.ode_oracle(lam, l, ModeCauchyData(w[0], dw[0]), (-20.0, 20.0), tol=1e-12, t_eval=t_eval)
        worst = max(worst, float(np.max(np.abs(w - wo))))
    return _result(3, "closed form vs ODE oracle", worst, 1e-6, start, normalization="max |w| = 1")


def check_cauchy_map(seed=3, count=100):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        l = int(rng.integers(0, 13))
        lam = 1.0 + rng.uniform(0.01, 59.0)
        data = ModeCauchyData(_rand_complex(rng), _rand_complex(rng))
        A = desitter.coeffs_from_cauchy(lam, l, data)
        w, dw = desitter.mode_value(ModeSolution(lam, l, *A), 0.0)
        err = max(abs(w - data.w0) / abs(data.w0), abs(dw - data.w0p) / abs(data.w0p))
        worst = max(worst, err)
    return _result(4, "Cauchy-data map round trip", worst, 1e-10, start)


# --------------------------------------------------------------------------
# special functions
# --------------------------------------------------------------------------


def check_lambert(samples=2001):
    start = time.perf_counter()
    s = np.concatenate([[0.0], np.logspace(-300, 6, samples)])
    d = specfun.lambert_w22_delta(s)
    W = 2.0 + d
    # ((W-2)/(W+2)) e^W computed through delta to keep relative accuracy for tiny s
    res = np.abs(np.exp(np.log(d[1:]) - np.log(4.0 + d[1:]) + W[1:]) - s[1:]) / s[1:]
    resid = max(float(res.max()), abs(float(d[0])))
    ss = np.linspace(0.0, 0.1, 201)
    series = specfun.w22_series(ss)
    direct = specfun.lambert_w22(ss)
    ser = float(np.max(np.abs(series - direct) / direct))
    ok = resid < 1e-12 and ser < 1e-4
    return _result(5, "Lambert W(2,-2)", resid, 1e-12, start, ok, series_error=ser, series_tol=1e-4)


# --------------------------------------------------------------------------
# spectra and transform
# --------------------------------------------------------------------------


def shooting_ground_state(M, bracket=None, x_end=None):
    """Lowest eigenvalue of -v'' + M^2 cosh^2 x v on the line: even shooting from x = 0."""
    if x_end is None:
        x_end = float(np.arccosh(max(2.0, 12.0 / M)))

    def miss(lam):
        sol = solve_ivp(
            lambda x, y: [y[1], (M * M * np.cosh(x) ** 2 - lam) * y[0]],
            (0.0, x_end),
            [1.0, 0.0],
            method="DOP853",
            rtol=1e-12,
            atol=1e-14,
        )
        return sol.y[0, -1]

    if bracket is None:
        lo, hi = M * M, M * M + 2.0 * M + 1.0
        bracket = (lo, hi)
    return brentq(miss, *bracket, xtol=1e-13)


def check_spectra(cases=((0, 1.0), (1, 0.0), (1, 1.0), (2, 1.0)), count=8, M_worm=1.0):
    start = time.perf_counter()
    drift = 0.0
    gap = np.inf
    for n, M in cases:
        a = spectral.solve_discrete(spectral.RadialOperatorSpec("witten", M, n), count)
        b = spectral.solve_discrete(spectral.RadialOperatorSpec("witten", M, n, N=2 * a.spec.N), count)
        drift = max(drift, float(np.max(np.abs(a.eigenvalues - b.eigenvalues) / b.eigenvalues)))
        gap = min(gap, float(np.min(a.eigenvalues) - (1 + n * n + M * M)), float(np.min(b.eigenvalues) - (1 + n * n + M * M)))
    worm = spectral.solve_discrete(spectral.RadialOperatorSpec("wormhole", M_worm), 1).eigenvalues[0]
    shoot = shooting_ground_state(M_worm)
    worm_err = abs(worm - shoot) / shoot
    ok = gap > 0 and drift < 1e-4 and worm_err < 1e-4
    return _result(6, "discrete spectra", max(drift, worm_err), 1e-4, start, ok, min_gap=gap, drift=drift, wormhole_error=worm_err)


def random_bump(rng):
    """A smooth compactly supported radial profile in x > 0 with its derivative."""
    a = rng.uniform(0.3, 2.5)
    w = rng.uniform(0.6, 1.6)
    c = a + w
    k = rng.uniform(0.0, 2.0)

    def u(x):
        s = (x - c) / w
        inside = np.abs(s) < 1
        out = np.zeros_like(x)
        si = s[inside]
        out[inside] = np.exp(-1.0 / (1.0 - si * si)) * np.cos(k * x[inside])
        return out

    def du(x):
        s = (x - c) / w
        inside = np.abs(s) < 1
        out = np.zeros_like(x)
        si, xi = s[inside], x[inside]
        b = np.exp(-1.0 / (1.0 - si * si))
        db = b * (-2.0 * si / (1.0 - si * si) ** 2) / w
        out[inside] = db * np.cos(k * xi) - k * b * np.sin(k * xi)
        return out

    return u, du


PARSEVAL_GRID = dict(lambda_max=800.0, N_lambda=4096)


def check_transform(transform=None, seed=7, count=10):
    """Parseval on compactly supported bumps; the lambda range must cover their spectral tails."""
    start = time.perf_counter()
    tr = transform or spectral.build_transform(**PARSEVAL_GRID)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        u, _ = random_bump(rng)
        uu = u(tr.x)
        uh = spectral.forward_transform(uu, tr)
        worst = max(worst, abs(spectral.spectral_norm2(uh, tr) / spectral.radial_norm2(uu, tr) - 1.0))
    x = np.linspace(0.2, 4.0, 40001)
    resid = 0.0
    for mu in (0.5, 1.0, 2.0):
        w = spectral.kernel(mu, x) / np.sqrt(0.5 * np.sinh(2 * x))
        r = spectral.apply_l0(w, x) - (1 + mu * mu) * w[1:-1]
        resid = max(resid, float(np.max(np.abs(r)) / np.max(np.abs(w))))
    ok = worst < 1e-3 and resid < 1e-6
    return _result(7, "continuous transform", worst, 1e-3, start, ok, parseval=worst, kernel_residual=resid)


# --------------------------------------------------------------------------
# geodesics and curvature
# --------------------------------------------------------------------------


def check_geodesics():
    start = time.perf_counter()
    drift = 0.0
    for name in ("timelike-through-origin", "null-through-bubble", "rotating"):
        s = geodesics.preset_state(name)
        c0 = geodesics.conserved(s).as_array()
        tr = geodesics.integrate(s, (0.0, 20.0), tol=1e-12)
        for st in tr.states:
            drift = max(drift, float(np.max(np.abs(geodesics.conserved(st).as_array() - c0))))
    lams = np.linspace(-5.0, 5.0, 41)
    resid = max(geodesics.rhs_residual(n, lams) for n in ("null-equatorial", "rotating", "null-rho-sqrt2"))
    s = geodesics.preset_state("timelike-through-origin")
    c = geodesics.conserved(s)
    tr = geodesics.integrate(s, (0.0, 40.0), tol=1e-12)
    ups = [lam for lam, sg in tr.y_crossings if sg > 0]
    period_num = float(np.mean(np.diff(ups)))
    period = geodesics.orbit_period(c.E, c)
    perr = abs(period_num - period) / period
    excess = float(tr.rho().max() - geodesics.r_star(c.E, c))
    ok = drift < 1e-8 and resid < 1e-10 and perr < 1e-4 and excess <= 1e-6
    return _result(
        8, "geodesics", drift, 1e-8, start, ok, rhs_residual=resid, period_error=perr, rho_excess=excess
    )


def check_curvature(seed=9, count=100):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    rel, scal, scal_fd = 0.0, 0.0, 0.0
    nec_max = -np.inf
    for j in range(count):
        X = rng.uniform(-2.0, 2.0, 3)
        r = np.linalg.norm(X)
        if r < 0.3:
            X *= 0.3 / r
            r = 0.3
        T = rng.uniform(-0.8, 0.8) * r
        data = charts.wormhole_curvature(T, X)
        scal = max(scal, abs(data.scalar))
        for jj in (1, 2, 3):
            for sg in (1, -1):
                nec_max = max(nec_max, charts.nec_witness(T, X, jj, sg))
        if j < 10:
            p = charts.ChartPoint("conformal_cartesian", (T, *X))
            ric = charts.ricci_numeric(p)
            rel = max(rel, float(np.max(np.abs(ric - data.ricci)) / np.max(np.abs(data.ricci))))
            gi = charts.inverse_metric(p)
            gi = getattr(gi, "components", gi)
            scal_fd = max(scal_fd, abs(float(np.einsum("ab,ab->", gi, ric))) / np.max(np.abs(data.ricci)))
    ok = rel < 1e-4 and scal < 1e-12 and scal_fd < 1e-6 and nec_max < 0
    return _result(9, "wormhole curvature", rel, 1e-4, start, ok, scalar=scal, scalar_fd=scal_fd, nec_max=nec_max)


# --------------------------------------------------------------------------
# fields
# --------------------------------------------------------------------------


def three_mode_field(seed=10, M=1.0):
    rng = np.random.default_rng(seed)
    spectra = fields.tower_spectra("witten", M, (0, 1), count=4)
    keys = [(0, 0, 0, 0), (0, 1, 1, 0), (1, 0, 2, 1)]
    entries = {k: (complex(_rand_complex(rng)), complex(_rand_complex(rng))) for k in keys}
    return fields.ModeCoefficients("witten", M, spectra, entries)


def check_energy(seed=10):
    start = time.perf_counter()
    c = three_mode_field(seed)
    ts = np.linspace(0.0, 5.0, 51)
    E = np.array([fields.energy(fields.synthesize(c, t), c) for t in ts])
    rises = float(np.max(np.diff(E) / E[:-1]))
    dt = 1e-4
    worst = 0.0
    for t in (0.5, 1.0, 2.0, 3.0):
        d = (fields.energy(fields.synthesize(c, t + dt), c) - fields.energy(fields.synthesize(c, t - dt), c)) / (2 * dt)
        r = fields.energy_rate(fields.synthesize(c, t), c)
        worst = max(worst, abs(d - r) / abs(r))
    ok = rises <= 0 and worst < 1e-3
    return _result(10, "energy monotonicity and identity", worst, 1e-3, start, ok, max_relative_increase=rises)


def _asymptotic_sets(rng):
    """Random asymptotic data on the three kinds of spectral axes."""
    out = []
    sp = spectral.solve_discrete(spectral.RadialOperatorSpec("witten", 1.0, 0), 12)
    mu = np.sqrt(sp.eigenvalues - 1.0)
    out.append(("sigma", mu, np.ones_like(mu)))
    sw = spectral.solve_discrete(spectral.RadialOperatorSpec("wormhole", 1.0), 12)
    mu = np.sqrt(sw.eigenvalues)
    out.append(("hdot", mu, np.ones_like(mu)))
    mu = np.linspace(np.sqrt(0.1), 14.0, 400)
    out.append(("xdot", mu, np.full_like(mu, 2.0 * mu * (mu[1] - mu[0]))))
    sets = []
    for name, mu, meas in out:
        n = len(mu)
        ell = rng.integers(0, 13, n)
        sets.append((name, [fields.AsymptoticData(mu, ell, _rand_complex(rng, n), _rand_complex(rng, n), measure=meas) for _ in range(2)]))
    return sets


def check_scattering_structure(seed=11):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    sub, resplit, iso, sym = 0.0, 0.0, 0.0, 0.0
    for _, (d1, d2) in _asymptotic_sets(rng):
        sp = fields.frequency_split(d1)
        zero = sp.neg.like(np.zeros_like(sp.neg.v), np.zeros_like(sp.neg.vp))
        out = fields.scattering(fields.FrequencySplit(sp.pos, zero))
        sub = max(sub, float(np.max(np.abs(out.neg.v))), float(np.max(np.abs(out.neg.vp))))
        re = fields.frequency_split(fields.merge(out))
        resplit = max(resplit, float(np.max(np.abs(re.neg.v)) / np.max(np.abs(out.pos.v))))
        n0 = fields.weighted_norm(d1)
        iso = max(iso, abs(fields.weighted_norm(fields.scattering(d1)) - n0) / n0)
        s0 = fields.symplectic_form(d1, d2)
        sym = max(sym, abs(fields.symplectic_form(fields.scattering(d1), fields.scattering(d2)) - s0) / max(1.0, abs(s0)))
    ok = sub == 0.0 and resplit < 1e-13 and iso < 1e-12 and sym < 1e-10
    return _result(11, "scattering operator structure", iso, 1e-12, start, ok, subspace=sub, resplit=resplit, symplectic=sym)


def check_resonances():
    start = time.perf_counter()
    r2 = fields.resonance_scan(2)
    r1 = fields.resonance_scan(1)
    found2 = [p.zeta for p in r2["poles"] if p.zeta.imag > 0]
    err = max(abs(z - w) for z, w in zip(sorted(found2, key=lambda z: z.imag), (1j, 2j))) if len(found2) == 2 else np.inf
    one = [p.zeta for p in r1["poles"] if p.zeta.imag > 0]
    single = len(one) == 1 and abs(one[0] - 1j) < 1e-8
    t = np.linspace(4.0, 20.0, 161)
    slope_err = 0.0
    for l, n in ((1, 0), (2, 0), (2, 1), (3, 2)):
        w, _ = fields.resonance_profile(l, n, t)
        slope = np.polyfit(np.log(np.cosh(t)), np.log(np.abs(w)), 1)[0]
        slope_err = max(slope_err, abs(slope + (n + 1)))
    # the ODE route at lambda = 1 - (n+1)^2, integrated backwards (the stable direction for a decaying solution)
    l, n = 2, 1
    w1, dw1 = fields.resonance_profile(l, n, np.array([12.0]))
    tt = np.linspace(12.0, 4.0, 81)
    tt, wo, _ = desitter.ode_oracle(1.0 - (n + 1) ** 2, l, ModeCauchyData(w1[0], dw1[0]), (12.0, 4.0), tol=1e-12, t_eval=tt)
    ode_slope = np.polyfit(np.log(np.cosh(tt)), np.log(np.abs(wo.real)), 1)[0]
    slope_err = max(slope_err, abs(ode_slope + (n + 1)))
    ok = err < 1e-8 and single and slope_err < 1e-2
    return _result(12, "resonances", err, 1e-8, start, ok, l1_single_pole=single, decay_exponent_error=slope_err)


def check_traversability():
    start = time.perf_counter()
    right = fields.traversability_check(l=1, eps=-1)
    left = fields.traversability_check(l=1, eps=1)
    control = fields.massive_confinement()
    leak = max(right.leakage, left.leakage)
    ok = leak < 1e-4 and right.status == left.status == "traversed" and control.status == "confined"
    return _result(13, "wormhole traversability", leak, 1e-4, start, ok, control=control.status)


def check_dispersion(transform=None):
    start = time.perf_counter()
    tr = transform or spectral.build_transform()
    ratio = fields.dispersion_ratio(tr, t=40.0)
    return _result(14, "massless Witten dispersion", ratio, 0.1, start, ratio <= 0.1)


def check_hardy(seed=15, count=50):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(count):
        u, du = random_bump(rng)
        d, rhs = spectral.hardy_defect(u, du)
        worst = min(worst, d / rhs)
        n = int(rng.integers(1, 4))
        d, rhs = spectral.angular_hardy_defect(u, du, n)
        worst = min(worst, d / rhs)
    return _result(15, "Hardy-type inequalities", -worst, 0.0, start, worst >= 0, min_relative_defect=worst)


CHECKS = {
    1: check_unitarity,
    2: check_no_mixing,
    3: check_closed_form,
    4: check_cauchy_map,
    5: check_lambert,
    6: check_spectra,
    7: check_transform,
    8: check_geodesics,
    9: check_curvature,
    10: check_energy,
    11: check_scattering_structure,
    12: check_resonances,
    13: check_traversability,
    14: check_dispersion,
    15: check_hardy,
}

SUITES = {
    "desitter": (1, 2, 3, 4),
    "specfun": (5,),
    "spectral": (6, 7, 15),
    "geodesics": (8,),
    "charts": (9,),
    "fields": (10, 11, 12, 13, 14),
    "all": tuple(CHECKS),
}


def run_checks(numbers=None, suite=None):
    """Run the selected checks in order."""
    if suite is not None:
        if suite not in SUITES:
            raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        numbers = SUITES[suite]
    numbers = tuple(numbers or CHECKS)
    out = []
    for k in numbers:
        out.append(CHECKS[k]())
    return out
