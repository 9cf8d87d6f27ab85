"""Kaluza-Klein towers of Klein-Gordon fields on the Witten spacetime and the wormhole.

Every field is stored per spherical harmonic (l, m) and, on the Witten side,
per Fourier mode n in psi.  Each radial eigenfunction carries one de Sitter
mode, so analysis, synthesis and scattering reduce to the single-mode maps
of :mod:`bubblewaves.desitter`.

Conventions
-----------
* Witten: u(t) = sum (1/cosh t) w_{n,k,l,m}(t) e_{n,k}(x), profile v = cosh t u,
  and the de Sitter mode w solves w'' + (lambda - 1) w + l(l+1) w / cosh^2 t = 0.
* Wormhole: v = cosh t cosh x u = sum w_{k,l,m}(t) e_k(x) with
  w'' + lambda_k w + l(l+1) w / cosh^2 t = 0, i.e. the Witten equation at lambda_k + 1.
* Asymptotic frequencies: mu = sqrt(lambda - 1) (Witten), sqrt(lambda_k) (wormhole),
  |xi| (massless wormhole, Fourier variable xi).
"""

from dataclasses import dataclass, field

import numpy as np

from . import desitter
from .desitter import ModeCauchyData, ModeSolution, amplitude_phase
from .errors import ConvergenceError, DomainError
from .spectral import (
    ContinuousTransform,
    RadialOperatorSpec,
    apply_operator,
    forward_transform,
    inverse_transform,
    mass_form,
    quadratic_form,
    solve_discrete,
)
from .specfun import ferrers_p_t, gamma_complex

__all__ = [
    "ModeCoefficients",
    "ContinuousCoefficients",
    "FieldSnapshot",
    "AsymptoticData",
    "FrequencySplit",
    "tower_spectra",
    "analyze",
    "synthesize",
    "energy",
    "energy_rate",
    "pde_residual",
    "wave_operators",
    "asymptotic_energy",
    "asymptotic_data",
    "free_profile",
    "frequency_split",
    "merge",
    "propagate",
    "scattering",
    "weighted_norm",
    "symplectic_form",
    "analyze_continuous",
    "synthesize_continuous",
    "dispersion_ratio",
    "smooth_packet",
    "resonance_scan",
    "resonance_profile",
    "Pole",
    "traversability_check",
    "massive_confinement",
    "TraversabilityReport",
    "traversal_grid",
    "one_sided_packet",
    "write_coefficients",
    "read_coefficients",
    "write_snapshot",
    "write_continuous",
]

TAIL_TOL = 1e-6


# --------------------------------------------------------------------------
# containers
# --------------------------------------------------------------------------


@dataclass
class ModeCoefficients:
    spacetime: str
    M: float
    spectra: dict  # n -> DiscreteSpectrum
    entries: dict = field(default_factory=dict)  # (n, k, l, m) -> (A+, A-)

    def __post_init__(self):
        for (n, k, l, m) in self.entries:
            _check_lm(l, m)
            if n not in self.spectra or k >= len(self.spectra[n].eigenvalues):
                raise DomainError(f"entry {(n, k, l, m)} has no attached eigenvalue")

    def lam(self, n, k):
        return float(self.spectra[n].eigenvalues[k])

    def lam_ds(self, n, k):
        """The lambda of the de Sitter mode equation carried by (n, k)."""
        lam = self.lam(n, k)
        return lam if self.spacetime == "witten" else lam + 1.0

    def mu(self, n, k):
        return float(np.sqrt(self.lam_ds(n, k) - 1.0))

    def mode(self, key):
        n, k, l, _ = key
        return ModeSolution(self.lam_ds(n, k), l, *self.entries[key])


@dataclass
class ContinuousCoefficients:
    """Massless n = 0 Witten coefficients A+-_{l,m}(lambda) on the transform's lambda grid."""

    transform: object  # spectral.ContinuousTransform
    entries: dict = field(default_factory=dict)  # (l, m) -> (A+ array, A- array)
    delta: float = 0.0

    def __post_init__(self):
        for (l, m) in self.entries:
            _check_lm(l, m)


@dataclass
class FieldSnapshot:
    t: float
    spacetime: str
    kind: str  # "field" (u) or "profile" (v)
    x: np.ndarray
    values: dict  # (n, l, m) -> complex array on x
    rates: dict  # (n, l, m) -> time derivative on x


def _check_lm(l, m):
    if int(l) != l or l < 0 or abs(m) > l:
        raise DomainError(f"invalid spherical harmonic indices (l={l}, m={m})")


def tower_spectra(spacetime, M, ns=(0,), count=8, **grid):
    """DiscreteSpectrum for each KK number n."""
    return {n: solve_discrete(RadialOperatorSpec(spacetime, M, n, **grid), count) for n in ns}


# --------------------------------------------------------------------------
# analysis and synthesis of discrete towers
# --------------------------------------------------------------------------


def _project(spec_n, f):
    e = spec_n.eigenvectors
    c = e.T @ (spec_n.weights * f)
    resid = f - e @ c
    norm = np.sqrt(np.sum(spec_n.weights * np.abs(f) ** 2))
    err = np.sqrt(np.sum(spec_n.weights * np.abs(resid) ** 2))
    return c, err, norm


def analyze(f, g, spectra, spacetime="witten", M=1.0, kind="field", drop=0.0):
    """Mode coefficients of Cauchy data at t = 0.

    ``f`` and ``g`` map (n, l, m) to grid functions (u and du/dt for kind="field",
    v and dv/dt for kind="profile").  Data not resolved by the attached eigenbasis
    (relative residual above 1e-6) raise ConvergenceError.
    """
    if isinstance(spectra, ContinuousTransform):
        cont = lambda d: {(l, m): val for (n, l, m), val in d.items()}  # noqa: E731
        if any(n != 0 for (n, _, _) in set(f) | set(g)):
            raise DomainError("the continuous sector is n = 0")
        return analyze_continuous(cont(f), cont(g), spectra)
    entries = {}
    keys = set(f) | set(g)
    for key in sorted(keys):
        n, l, m = key
        _check_lm(l, m)
        if n not in spectra:
            raise DomainError(f"no spectrum attached for n={n}")
        sp = spectra[n]
        fv = np.asarray(f.get(key, np.zeros(len(sp.x))), dtype=complex)
        gv = np.asarray(g.get(key, np.zeros(len(sp.x))), dtype=complex)
        if spacetime == "wormhole" and kind == "field":
            c = np.cosh(sp.x)
            fv, gv = c * fv, c * gv
        cf, ef, nf = _project(sp, fv)
        cg, eg, ng = _project(sp, gv)
        for e, nrm in ((ef, nf), (eg, ng)):
            if e > TAIL_TOL * max(nrm, 1e-300) and nrm > 0:
                raise ConvergenceError(
                    f"data for {key} not resolved by {len(sp.eigenvalues)} modes (relative residual {e / nrm:.1e})"
                )
        for k in range(len(sp.eigenvalues)):
            if abs(cf[k]) <= drop and abs(cg[k]) <= drop:
                continue
            lam = sp.eigenvalues[k] if spacetime == "witten" else sp.eigenvalues[k] + 1.0
            A = desitter.coeffs_from_cauchy(lam, l, ModeCauchyData(cf[k], cg[k]))
            entries[(n, k, l, m)] = A
    return ModeCoefficients(spacetime, M, spectra, entries)


def _mode_amplitudes(coefs, t):
    """(w, w') for each entry at time t."""
    out = {}
    for key in coefs.entries:
        out[key] = desitter.mode_value(coefs.mode(key), t)
    return out


def synthesize(coefs, t, kind="field"):
    """Evaluate the tower at time t on the attached radial grids."""
    if kind not in ("field", "profile"):
        raise DomainError("kind must be 'field' or 'profile'")
    if isinstance(coefs, ContinuousCoefficients):
        return synthesize_continuous(coefs, t, kind)
    t = float(t)
    vals, rates = {}, {}
    x = None
    ch, th = np.cosh(t), np.tanh(t)
    for key, (w, dw) in _mode_amplitudes(coefs, t).items():
        n, k, l, m = key
        sp = coefs.spectra[n]
        x = sp.x
        e = sp.eigenvectors[:, k]
        # profile coefficient w(t); field coefficient a = w / cosh t (and / cosh x on the wormhole)
        if kind == "profile":
            a, da = w, dw
        else:
            a, da = w / ch, (dw - th * w) / ch
        if coefs.spacetime == "wormhole" and kind == "field":
            e = e / np.cosh(sp.x)
        vals.setdefault((n, l, m), np.zeros(len(sp.x), dtype=complex))
        rates.setdefault((n, l, m), np.zeros(len(sp.x), dtype=complex))
        vals[(n, l, m)] += a * e
        rates[(n, l, m)] += da * e
    if x is None:
        x = next(iter(coefs.spectra.values())).x if coefs.spectra else np.zeros(0)
    return FieldSnapshot(t, coefs.spacetime, kind, x, vals, rates)


def _spec_of(coefs, n):
    return coefs.spectra[n].spec


def energy(snap, coefs, kind=None):
    """Energy of a snapshot.

    kind="field": E(u, t) = int |u_t|^2 + (L-form) + l(l+1)/cosh^2 t |u|^2 dmu (Witten, u);
    kind="profile": E(v, t) with the -|v|^2 term of the profile equation (Witten) or the
    wormhole profile energy; kind="asymptotic": E_infinity without the sphere term.
    The psi integral contributes 2 pi on the Witten side.
    """
    kind = kind or snap.kind
    witten = snap.spacetime == "witten"
    total = 0.0
    for (n, l, m), u in snap.values.items():
        spec = _spec_of(coefs, n)
        du = snap.rates[(n, l, m)]
        kin = mass_form(spec, du)
        q = quadratic_form(spec, u)
        mass = mass_form(spec, u)
        sphere = l * (l + 1) / np.cosh(snap.t) ** 2 * mass
        if kind == "field":
            e = kin + q + sphere
        elif kind == "profile":
            e = kin + q + sphere - (mass if witten else 0.0)
        elif kind == "asymptotic":
            e = kin + q - (mass if witten else 0.0)
        else:
            raise DomainError(f"unknown energy kind {kind!r}")
        total += e
    return float(2.0 * np.pi * total if witten else total)


def energy_rate(snap, coefs):
    """Right-hand side of dE/dt = -2 tanh t int [2 |u_t|^2 + |grad_S2 u|^2 / cosh^2 t] dmu."""
    if snap.kind != "field" or snap.spacetime != "witten":
        raise DomainError("the energy identity is stated for the Witten field u")
    total = 0.0
    for (n, l, m), u in snap.values.items():
        spec = _spec_of(coefs, n)
        total += 2.0 * mass_form(spec, snap.rates[(n, l, m)]) + l * (l + 1) / np.cosh(snap.t) ** 2 * mass_form(spec, u)
    return float(-2.0 * np.tanh(snap.t) * 2.0 * np.pi * total)


def pde_residual(coefs, t, dt=1e-3):
    """Scaled residual of cosh^-2 d_t(cosh^2 d_t u) - cosh^-2 Lap_S2 u + L u = 0 (Witten field).

    Time derivatives by centred differences of synthesized snapshots, the spatial
    operator by the discrete radial operator.
    """
    s0 = synthesize(coefs, t)
    sm, sp_ = synthesize(coefs, t - dt), synthesize(coefs, t + dt)
    worst = 0.0
    scale = np.sqrt(max(energy(s0, coefs), 1e-300))
    for key, u in s0.values.items():
        n, l, m = key
        spec = _spec_of(coefs, n)
        utt = (sp_.values[key] - 2 * u + sm.values[key]) / dt**2
        ut = (sp_.values[key] - sm.values[key]) / (2 * dt)
        if coefs.spacetime == "witten":
            r = utt + 2 * np.tanh(t) * ut + l * (l + 1) / np.cosh(t) ** 2 * u + apply_operator(spec, u)
        else:
            raise DomainError("pde_residual is implemented for the Witten tower")
        worst = max(worst, np.sqrt(mass_form(spec, r)) / scale)
    return float(worst)


# --------------------------------------------------------------------------
# wave operators, frequency split, scattering
# --------------------------------------------------------------------------


def wave_operators(coefs):
    """Per-mode asymptotic amplitudes {key: AsymptoticAmplitudes}."""
    return {key: desitter.asymptotic_amplitudes(coefs.mode(key)) for key in coefs.entries}


def asymptotic_energy(coefs, amps, which="in"):
    """E_infinity of v_in or v_out: 2 sum mu^2 (|w+|^2 + |w-|^2) (times 2 pi on the Witten side)."""
    total = 0.0
    for (n, k, l, m), a in amps.items():
        mu2 = coefs.mu(n, k) ** 2
        wp, wm = (a.w_in_plus, a.w_in_minus) if which == "in" else (a.w_out_plus, a.w_out_minus)
        total += 2.0 * mu2 * (abs(wp) ** 2 + abs(wm) ** 2)
    return float(2.0 * np.pi * total if coefs.spacetime == "witten" else total)


def free_profile(coefs, amps, t, which="out"):
    """Snapshot of the free comparison profile v_in or v_out at time t."""
    vals, rates = {}, {}
    for (n, k, l, m), a in amps.items():
        sp = coefs.spectra[n]
        mu = coefs.mu(n, k)
        wp, wm = (a.w_in_plus, a.w_in_minus) if which == "in" else (a.w_out_plus, a.w_out_minus)
        ep, em = np.exp(1j * mu * t), np.exp(-1j * mu * t)
        w, dw = wp * ep + wm * em, 1j * mu * (wp * ep - wm * em)
        e = sp.eigenvectors[:, k]
        vals.setdefault((n, l, m), np.zeros(len(sp.x), dtype=complex))
        rates.setdefault((n, l, m), np.zeros(len(sp.x), dtype=complex))
        vals[(n, l, m)] += w * e
        rates[(n, l, m)] += dw * e
    x = next(iter(coefs.spectra.values())).x
    return FieldSnapshot(float(t), coefs.spacetime, "profile", x, vals, rates)


def difference(a, b):
    keys = set(a.values) | set(b.values)
    z = np.zeros(len(a.x), dtype=complex)
    vals = {k: a.values.get(k, z) - b.values.get(k, z) for k in keys}
    rates = {k: a.rates.get(k, z) - b.rates.get(k, z) for k in keys}
    return FieldSnapshot(a.t, a.spacetime, a.kind, a.x, vals, rates)


@dataclass
class AsymptoticData:
    """Spectral representation (v, v') of asymptotic Cauchy data.

    ``mu`` is the frequency of each entry, ``ell`` its harmonic degree, ``base`` the
    quantity whose +-1/2 powers weight the Sobolev-type norms (mu^2 by default, the
    only choice for which the two frequency parts are orthogonal) and ``measure``
    the quadrature weight of the spectral variable (1 for discrete spectra).
    """

    mu: np.ndarray
    ell: np.ndarray
    v: np.ndarray
    vp: np.ndarray
    base: np.ndarray = None
    measure: np.ndarray = None

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.ell = np.asarray(self.ell, dtype=int)
        self.v = np.asarray(self.v, dtype=complex)
        self.vp = np.asarray(self.vp, dtype=complex)
        if self.base is None:
            self.base = self.mu**2
        if self.measure is None:
            self.measure = np.ones_like(self.mu)
        if np.any(self.mu <= 0):
            raise DomainError("asymptotic data need positive frequencies")

    def like(self, v, vp):
        return AsymptoticData(self.mu, self.ell, v, vp, self.base, self.measure)


@dataclass
class FrequencySplit:
    pos: AsymptoticData
    neg: AsymptoticData


def asymptotic_data(coefs, amps, which="in"):
    """AsymptoticData of v_in (or v_out) at t = 0 from the amplitudes.

    The weight base is mu^2: lambda - 1 on the Witten side, lambda_k on the wormhole.
    """
    keys = sorted(amps)
    mu = np.array([coefs.mu(n, k) for (n, k, l, m) in keys])
    ell = np.array([l for (n, k, l, m) in keys])
    wp = np.array([amps[key].w_in_plus if which == "in" else amps[key].w_out_plus for key in keys])
    wm = np.array([amps[key].w_in_minus if which == "in" else amps[key].w_out_minus for key in keys])
    base = mu**2
    return AsymptoticData(mu, ell, wp + wm, 1j * mu * (wp - wm), base)


def frequency_split(data):
    """Split into parts with v' = +i mu v and v' = -i mu v."""
    half = data.vp / (1j * data.mu)
    vp_ = 0.5 * (data.v + half)
    vn = 0.5 * (data.v - half)
    return FrequencySplit(data.like(vp_, 1j * data.mu * vp_), data.like(vn, -1j * data.mu * vn))


def merge(split):
    return split.pos.like(split.pos.v + split.neg.v, split.pos.vp + split.neg.vp)


def propagate(split, t):
    """Free propagator U(t): multiplication by e^{+-i mu t} on the two parts."""
    ep, em = np.exp(1j * split.pos.mu * t), np.exp(-1j * split.neg.mu * t)
    return FrequencySplit(split.pos.like(ep * split.pos.v, ep * split.pos.vp), split.neg.like(em * split.neg.v, em * split.neg.vp))


def _phases(data):
    fp = np.array([amplitude_phase(l, m) for l, m in zip(data.ell, data.mu)], dtype=complex)
    return fp, 1.0 / fp


def scattering(data):
    """S: v_in -> v_out, diagonal on the frequency split."""
    if isinstance(data, FrequencySplit):
        sp = data
    else:
        sp = frequency_split(data)
    fp, fm = _phases(sp.pos)
    out = FrequencySplit(sp.pos.like(fp * sp.pos.v, fp * sp.pos.vp), sp.neg.like(fm * sp.neg.v, fm * sp.neg.vp))
    return out if isinstance(data, FrequencySplit) else merge(out)


def weighted_norm(data):
    """||v||^2 with weight base^{1/2} plus ||v'||^2 with weight base^{-1/2}."""
    if isinstance(data, FrequencySplit):
        data = merge(data)
    w = np.sqrt(data.base)
    return float(np.sum(data.measure * (w * np.abs(data.v) ** 2 + np.abs(data.vp) ** 2 / w)))


def symplectic_form(d1, d2):
    """sigma((v1, v1'), (v2, v2')) = sum v1 v2' - v1' v2 (bilinear)."""
    if isinstance(d1, FrequencySplit):
        d1 = merge(d1)
    if isinstance(d2, FrequencySplit):
        d2 = merge(d2)
    return complex(np.sum(d1.measure * (d1.v * d2.vp - d1.vp * d2.v)))


# --------------------------------------------------------------------------
# massless Witten sector (n = 0, M = 0)
# --------------------------------------------------------------------------


def analyze_continuous(f, g, transform, delta=0.0):
    """A+-_{l,m}(lambda) of massless n = 0 data f, g: {(l, m): u-profile on transform.x}."""
    entries = {}
    keep = transform.lambdas >= 1.0 + delta
    for (l, m) in sorted(set(f) | set(g)):
        _check_lm(l, m)
        z = np.zeros(len(transform.x))
        fh = forward_transform(np.asarray(f.get((l, m), z), dtype=complex), transform)
        gh = forward_transform(np.asarray(g.get((l, m), z), dtype=complex), transform)
        ap = np.zeros(len(transform.mu), dtype=complex)
        am = np.zeros(len(transform.mu), dtype=complex)
        for j, mu in enumerate(transform.mu):
            if mu <= 0 or not keep[j]:
                continue
            ap[j], am[j] = desitter.coeffs_from_cauchy(1.0 + mu * mu, l, ModeCauchyData(fh[j], gh[j]))
        entries[(l, m)] = (ap, am)
    return ContinuousCoefficients(transform, entries, delta)


def synthesize_continuous(cc, t, kind="profile"):
    """Profile (or field) of a massless n = 0 solution at time t."""
    tr = cc.transform
    vals, rates = {}, {}
    ch, th = np.cosh(t), np.tanh(t)
    for (l, m), (ap, am) in cc.entries.items():
        w = np.zeros(len(tr.mu), dtype=complex)
        dw = np.zeros(len(tr.mu), dtype=complex)
        for j, mu in enumerate(tr.mu):
            if ap[j] == 0 and am[j] == 0:
                continue
            p, dp = ferrers_p_t(l, 1j * mu, t)
            q, dq = ferrers_p_t(l, 1j * mu, -t)
            w[j] = ap[j] * p + am[j] * q
            dw[j] = ap[j] * dp - am[j] * dq
        v, dv = inverse_transform(w, tr), inverse_transform(dw, tr)
        if kind == "field":
            v, dv = v / ch, (dv - th * v) / ch
        vals[(0, l, m)], rates[(0, l, m)] = v, dv
    return FieldSnapshot(float(t), "witten", kind, tr.x, vals, rates)


def smooth_packet(x, x0=1.0):
    """(x/x0)^2 exp(1 - (x/x0)^2): even in x, hence smooth across the bubble, peak 1 at x0."""
    s = (np.asarray(x, dtype=float) / x0) ** 2
    return s * np.exp(1.0 - s)


def dispersion_ratio(transform, l=0, x0=1.0, t=40.0, x_cut=2.0):
    """sup_{x <= x_cut} |v(t)| / sup_{x <= x_cut} |v(0)| for a smooth n = 0 massless packet at rest."""
    u = smooth_packet(transform.x, x0)
    cc = analyze_continuous({(l, 0): u}, {}, transform)
    near = transform.x <= x_cut
    v0 = synthesize_continuous(cc, 0.0).values[(0, l, 0)]
    v1 = synthesize_continuous(cc, t).values[(0, l, 0)]
    return float(np.max(np.abs(v1[near])) / np.max(np.abs(v0[near])))


# --------------------------------------------------------------------------
# resonances
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Pole:
    zeta: complex
    residue: complex
    order: int
    radius: float


def _winding(fun, a, b, c, d, n_edge=400):
    """Winding number of fun around the rectangle [a, b] x [c, d]."""
    s = np.linspace(0.0, 1.0, n_edge, endpoint=False)
    path = np.concatenate(
        [a + (b - a) * s + 1j * c, b + 1j * (c + (d - c) * s), b - (b - a) * s + 1j * d, a + 1j * (d - (d - c) * s)]
    )
    vals = fun(path)
    ph = np.unwrap(np.angle(np.concatenate([vals, vals[:1]])))
    return int(np.rint((ph[-1] - ph[0]) / (2 * np.pi)))


def _circle_moments(fun, z0, r, n=256):
    th = 2 * np.pi * np.arange(n) / n
    z = z0 + r * np.exp(1j * th)
    f = fun(z)
    dz = 1j * r * np.exp(1j * th) * (2 * np.pi / n)
    m0 = np.sum(f * dz) / (2j * np.pi)
    m1 = np.sum(z * f * dz) / (2j * np.pi)
    return m0, m1, np.max(np.abs(f))


def resonance_scan(l, re_range=(-0.75, 0.75), im_range=None, cell=0.5):
    """Poles of zeta -> amplitude_phase(l, zeta) in a rectangle of the complex plane.

    Cells of side ``cell`` are screened by the argument principle; every cell whose
    winding number is negative (a pole inside) is refined with the contour moments
    m1/m0 of the amplitude on a circle, shrinking the circle when it passes too close
    to a singularity.  Zeros of the amplitude are reported with positive order.
    """
    if int(l) != l or l < 1:
        raise DomainError("resonances need l >= 1")
    if im_range is None:
        im_range = (-(l + 1.3), l + 1.3)
    fun = lambda z: amplitude_phase(l, z)  # noqa: E731
    inv = lambda z: 1.0 / amplitude_phase(l, z)  # noqa: E731
    re_edges = np.arange(re_range[0], re_range[1] + 1e-12, cell)
    im_edges = np.arange(im_range[0], im_range[1] + 1e-12, cell)
    # offset the grid so cell edges avoid the imaginary integers
    im_edges = im_edges + 0.5 * cell * (np.abs(np.round(im_edges) - im_edges) < 0.1 * cell).any()
    found = []
    for a, b in zip(re_edges[:-1], re_edges[1:]):
        for c, d in zip(im_edges[:-1], im_edges[1:]):
            w = _winding(fun, a, b, c, d)
            if w == 0:
                continue
            target = fun if w < 0 else inv
            z0 = complex(0.5 * (a + b), 0.5 * (c + d))
            r = 0.45 * cell
            for _ in range(60):
                m0, m1, big = _circle_moments(target, z0, r)
                if big < 1e10 and abs(m0) > 0:
                    break
                r *= 0.8
            else:
                raise ConvergenceError(f"could not isolate the singularity near {z0}")
            zeta = m1 / m0
            # polish: two more passes on circles centred at the estimate
            for _ in range(2):
                m0, m1, _ = _circle_moments(target, zeta, 0.5 * r)
                zeta = m1 / m0
            found.append(Pole(complex(zeta), complex(m0) if w < 0 else complex(0.0), int(-w) if w < 0 else -int(w), r))
    poles = [p for p in found if p.order > 0]
    zeros = [p for p in found if p.order < 0]
    return {"poles": sorted(poles, key=lambda p: p.zeta.imag), "zeros": sorted(zeros, key=lambda p: p.zeta.imag)}


def resonance_profile(l, n, t):
    """P_l^{-(n+1)}(tanh t): the mode at lambda = 1 - (n+1)^2, decaying like cosh^{-(n+1)} t.

    Evaluated for |t| and reflected with P_l^{-k}(-xi) = (-1)^{l+k} P_l^{-k}(xi), k <= l,
    to avoid cancellation in the upward recurrence for t < 0.
    """
    if not 0 <= n < l:
        raise DomainError("resonance profiles need 0 <= n < l")
    t = np.asarray(t, dtype=float)
    k = n + 1
    val, der = ferrers_p_t(l, -float(k), np.abs(t))
    sgn = np.where(t < 0, (-1.0) ** (l + k), 1.0)
    dsgn = np.where(t < 0, -((-1.0) ** (l + k)), 1.0)
    return (sgn * val).real, (dsgn * der).real


# --------------------------------------------------------------------------
# massless wormhole: traversability
# --------------------------------------------------------------------------


@dataclass
class TraversabilityReport:
    status: str  # "traversed", "confined" or "leaky"
    leakage: float
    entering_sheet: int  # -1 for x < 0, +1 for x > 0
    t_final: float
    detail: dict = field(default_factory=dict)


def _packet_modes(l, xi, wp, wm, t):
    """v_hat(t, xi) for in-amplitudes w+- on a Fourier grid (mode equation at lambda = 1 + xi^2)."""
    vh = np.zeros(len(xi), dtype=complex)
    for j, q in enumerate(xi):
        if wp[j] == 0 and wm[j] == 0:
            continue
        mu = abs(q)
        # invert w_in^+ = F A+, w_in^- = A- / Gamma(1 - i mu)
        far = desitter._edge_factor(l, mu)
        ap = wp[j] / far
        am = wm[j] * gamma_complex(1 - 1j * mu)
        p, _ = ferrers_p_t(l, 1j * mu, t)
        qv, _ = ferrers_p_t(l, 1j * mu, -t)
        vh[j] = ap * p + am * qv
    return vh


def traversal_grid(L=80.0, N=4096):
    """Periodic grid x in [-L, L) and its FFT frequencies xi."""
    x = -L + 2 * L * np.arange(N) / N
    xi = 2 * np.pi * np.fft.fftfreq(N, x[1] - x[0])
    return x, xi


def one_sided_packet(x, eps=-1, x0=None, sigma=1.5, k0=4.0):
    """(v, dv/dt) at t = 0 of the free massless wave g(x + eps t) with a Gaussian packet g."""
    if x0 is None:
        x0 = 10.0 * eps
    g = np.exp(-0.5 * ((x - x0) / sigma) ** 2) * np.exp(1j * k0 * x)
    dg = (-(x - x0) / sigma**2 + 1j * k0) * g
    return g, eps * dg


def traversability_check(f=None, g=None, l=1, eps=-1, L=80.0, N=4096, t_final=25.0, delta=0.1, tol=1e-10):
    """Fraction of the norm of a one-sided massless in-state left on its entering sheet.

    ``f``, ``g`` are v_in and d_t v_in at t = 0 on traversal_grid(L, N); by default a
    Gaussian packet from one_sided_packet.  Inputs must satisfy d_t v = eps d_x v, be
    supported on the sheet eps x > 0 and carry no spectral mass in |xi| < delta
    (relative tolerance ``tol``); anything else is rejected with DomainError.
    eps = -1 moves right from x < 0, eps = +1 moves left from x > 0.
    """
    if eps not in (-1, 1):
        raise DomainError("eps must be +1 or -1")
    if int(l) != l or l < 1:
        raise DomainError("the massless wormhole sector is l >= 1")
    x, xi = traversal_grid(L, N)
    if f is None:
        f, g = one_sided_packet(x, eps)
    f, g = np.asarray(f, dtype=complex), np.asarray(g, dtype=complex)
    if f.shape != x.shape or g.shape != x.shape:
        raise DomainError("data must be sampled on traversal_grid(L, N)")
    fh, gh = np.fft.fft(f), np.fft.fft(g)
    mass = np.abs(fh) ** 2
    total = mass.sum()
    if total == 0:
        raise DomainError("zero in-state")
    # directional condition d_t v = eps d_x v, spectrally g_hat = i eps xi f_hat
    mismatch = np.sum(np.abs(gh - 1j * eps * xi * fh) ** 2) / max(np.sum(np.abs(gh) ** 2), 1e-300)
    if mismatch > tol:
        raise DomainError(f"in-state violates d_t v = eps d_x v (relative defect {mismatch:.1e})")
    entering = eps
    if np.sum(np.abs(f[np.sign(x) != entering]) ** 2) > tol * np.sum(np.abs(f) ** 2):
        raise DomainError("in-state is not supported on the entering sheet")
    low = np.abs(xi) < delta
    if mass[low].sum() > tol * total:
        raise DomainError("in-state has spectral mass below the infrared cutoff delta")
    keep = (mass > 1e-32 * mass.max()) & ~low
    # v_hat = w+ e^{i mu t} + w- e^{-i mu t} with mu = |xi|
    mu = np.where(keep, np.abs(xi), 1.0)
    wp = np.where(keep, 0.5 * (fh + gh / (1j * mu)), 0)
    wm = np.where(keep, 0.5 * (fh - gh / (1j * mu)), 0)
    vh = _packet_modes(l, xi, wp, wm, t_final)
    v = np.fft.ifft(vh)
    norm = np.sum(np.abs(v) ** 2)
    leak = float(np.sum(np.abs(v[np.sign(x) == entering]) ** 2) / norm)
    ph = np.where(keep, amplitude_phase(l, mu), 0)
    vout_h = ph * wp * np.exp(1j * mu * t_final) + np.where(keep, 1 / np.where(keep, ph, 1), 0) * wm * np.exp(-1j * mu * t_final)
    dev = float(np.sqrt(np.sum(np.abs(vh - vout_h) ** 2) / np.sum(np.abs(vh) ** 2)))
    status = "traversed" if leak < 1e-4 else "leaky"
    return TraversabilityReport(status, leak, entering, t_final, {"out_state_deviation": dev, "x": x, "v": v})


def massive_confinement(M=1.0, l=1, x0=-1.5, sigma=0.5, k0=3.0, times=np.linspace(0, 25, 26), count=128, x_out=6.0):
    """Massive control: the same protocol on L_M. Profiles stay in |x| < x_out at all sampled times."""
    spectra = tower_spectra("wormhole", M, (0,), count=count)
    sp = spectra[0]
    x = sp.x
    f = np.exp(-0.5 * ((x - x0) / sigma) ** 2) * np.exp(1j * k0 * x)
    g = -np.gradient(f, x)  # right-moving initial velocity
    coefs = analyze({(0, l, 0): f}, {(0, l, 0): g}, spectra, "wormhole", M, kind="profile")
    far = np.abs(x) > x_out
    worst = 0.0
    crossing = []
    for t in times:
        v = synthesize(coefs, t, kind="profile").values[(0, l, 0)]
        tot = np.sum(sp.weights * np.abs(v) ** 2)
        worst = max(worst, float(np.sum(sp.weights[far] * np.abs(v[far]) ** 2) / tot))
        crossing.append(float(np.sum(sp.weights[x > 0] * np.abs(v[x > 0]) ** 2) / tot))
    status = "confined" if worst < 1e-8 else "escaping"
    return TraversabilityReport(status, float("nan"), -1, float(times[-1]), {"far_mass": worst, "right_fraction": crossing})


# --------------------------------------------------------------------------
# text serialization
# --------------------------------------------------------------------------


def write_coefficients(coefs, path, header=None):
    """Line-oriented text: '# key=value' header lines, then n,k,l,m,lambda,ReA+,ImA+,ReA-,ImA-."""
    lines = list(header or [])
    lines += [f"# spacetime={coefs.spacetime}", f"# M={float(coefs.M)!r}", "n,k,l,m,lambda,ReA+,ImA+,ReA-,ImA-"]
    for (n, k, l, m), (ap, am) in sorted(coefs.entries.items()):
        lam = coefs.lam(n, k)
        row = (lam, complex(ap).real, complex(ap).imag, complex(am).real, complex(am).imag)
        lines.append(f"{n},{k},{l},{m}," + ",".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_coefficients(path, spectra):
    """Inverse of write_coefficients; eigenvalues are checked against the attached spectra."""
    meta = {}
    entries = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                if "=" in line:
                    k, v = line[1:].split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if not line or line.startswith("n,"):
                continue
            parts = line.split(",")
            n, k, l, m = map(int, parts[:4])
            lam, apr, api, amr, ami = map(float, parts[4:])
            if abs(spectra[n].eigenvalues[k] - lam) > 1e-9 * max(1.0, lam):
                raise DomainError(f"eigenvalue mismatch for (n={n}, k={k})")
            entries[(n, k, l, m)] = (complex(apr, api), complex(amr, ami))
    return ModeCoefficients(meta.get("spacetime", "witten"), float(meta.get("M", "0")), spectra, entries)


def write_snapshot(snap, path, header=None):
    """CSV rows t,x,n,l,m,Re,Im."""
    lines = list(header or []) + ["t,x,n,l,m,Re,Im"]
    for (n, l, m), u in sorted(snap.values.items()):
        for xi, ui in zip(snap.x, u):
            lines.append(f"{float(snap.t)!r},{float(xi)!r},{n},{l},{m},{float(ui.real)!r},{float(ui.imag)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_continuous(cc, path, header=None):
    """Rows l,m,lambda,ReA+,ImA+,ReA-,ImA- on the transform's lambda grid."""
    lines = list(header or []) + [f"# delta={float(cc.delta)!r}", "l,m,lambda,ReA+,ImA+,ReA-,ImA-"]
    lam = cc.transform.lambdas
    for (l, m), (ap, am) in sorted(cc.entries.items()):
        for j in range(len(lam)):
            row = (lam[j], ap[j].real, ap[j].imag, am[j].real, am[j].imag)
            lines.append(f"{l},{m}," + ",".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
