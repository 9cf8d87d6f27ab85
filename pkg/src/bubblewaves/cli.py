"""Command-line front end.

    bubblewaves <command> [--config run.ini] [--set section.key=value ...] [flags]

Commands: spectrum, transform, evolve, scatter, geodesic, curvature, verify.
Every output is a CSV (or text table) opening with a '# header:' comment block that
records the tool version and a hash of the effective configuration; the effective
configuration itself is written next to the outputs as config.ini and re-runs
identically.  Exit codes: 0 success, 1 failed checks, 2 configuration error,
3 convergence failure.  BUBBLEWAVES_THREADS caps the BLAS thread count.
"""

import os

_THREADS = os.environ.get("BUBBLEWAVES_THREADS")
if _THREADS:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _THREADS)

import argparse  # noqa: E402
import configparser  # noqa: E402
import hashlib  # noqa: E402
import io  # noqa: E402
import json  # noqa: E402
import sys  # noqa: E402
import tempfile  # noqa: E402
from dataclasses import dataclass, field  # noqa: E402

import numpy as np  # noqa: E402

from . import __version__, charts, checks, fields, geodesics, spectral  # noqa: E402
from .errors import ConvergenceError, DomainError  # noqa: E402

__all__ = ["main", "RunConfig", "ConfigError", "load_config", "DEFAULTS"]

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending section.key."""


def _floats(text):
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def _opt_float(text):
    return None if str(text).strip().lower() in ("", "none", "auto") else float(text)


def _opt_int(text):
    return None if str(text).strip().lower() in ("", "none", "auto") else int(text)


# section.key -> (parser, default text)
DEFAULTS = {
    "run.spacetime": (str, "witten"),
    "run.mass": (float, "1.0"),
    "run.ns": (_ints, "0"),
    "run.l_max": (int, "16"),
    "run.count": (int, "8"),
    "run.seed": (int, "0"),
    "run.output": (str, "out"),
    "grid.x_max": (_opt_float, "auto"),
    "grid.N": (_opt_int, "auto"),
    "transform.x_max": (float, "8.0"),
    "transform.N_r": (int, "8192"),
    "transform.N_lambda": (int, "2048"),
    "transform.lambda_max": (float, "200.0"),
    "transform.delta": (float, "0.1"),
    "transform.packet_x0": (float, "1.0"),
    "transform.l": (int, "0"),
    "evolve.modes": (str, "0:0:0:0,0:1:1:0"),
    "evolve.times": (_floats, "0,1,2,3,4,5"),
    "scatter.t_check": (float, "25.0"),
    "geodesic.preset": (str, "null-through-bubble"),
    "geodesic.span": (float, "20.0"),
    "geodesic.tol": (float, "1e-10"),
    "geodesic.samples": (int, "401"),
    "curvature.T": (float, "0.1"),
    "curvature.X": (_floats, "1,0,0"),
    "curvature.chart": (str, "conformal_cartesian"),
    "verify.suite": (str, "all"),
}

COMMANDS = ("spectrum", "transform", "evolve", "scatter", "geodesic", "curvature", "verify")

# command-line flag -> section.key
FLAGS = {
    "spacetime": "run.spacetime",
    "mass": "run.mass",
    "n": "run.ns",
    "l_max": "run.l_max",
    "count": "run.count",
    "seed": "run.seed",
    "out": "run.output",
    "x_max": "grid.x_max",
    "N": "grid.N",
    "modes": "evolve.modes",
    "times": "evolve.times",
    "preset": "geodesic.preset",
    "span": "geodesic.span",
    "tol": "geodesic.tol",
    "T": "curvature.T",
    "X": "curvature.X",
    "chart": "curvature.chart",
    "suite": "verify.suite",
}


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)  # section.key -> parsed value
    text: dict = field(default_factory=dict)  # section.key -> canonical text

    def __getitem__(self, key):
        return self.values[key]

    @property
    def spacetime(self):
        return self.values["run.spacetime"]

    @property
    def mass(self):
        return self.values["run.mass"]

    @property
    def output(self):
        return self.values["run.output"]

    def to_ini(self, skip=()):
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["command"] = {"name": self.command}
        for key in sorted(self.text):
            if key in skip:
                continue
            sec, name = key.split(".", 1)
            if not cp.has_section(sec):
                cp.add_section(sec)
            cp[sec][name] = self.text[key]
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def digest(self):
        """Hash of everything that affects the numbers (the output directory does not)."""
        return hashlib.sha256(self.to_ini(skip=("run.output",)).encode()).hexdigest()[:16]

    def header(self):
        return [
            f"# header: bubblewaves {__version__}",
            f"# command: {self.command}",
            f"# config_sha256: {self.digest()}",
        ]


def _parse_modes(text):
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 4:
            raise ConfigError(f"evolve.modes: entry {item!r} must be n:k:l:m")
        out.append(tuple(int(p) for p in parts))
    return tuple(out)


def _validate(cfg):
    v = cfg.values
    if v["run.spacetime"] not in ("witten", "wormhole"):
        raise ConfigError("run.spacetime: must be 'witten' or 'wormhole'")
    if not v["run.mass"] >= 0:
        raise ConfigError("run.mass: must be >= 0")
    if v["run.count"] < 0:
        raise ConfigError("run.count: must be >= 0")
    if v["run.l_max"] < 0:
        raise ConfigError("run.l_max: must be >= 0")
    if v["grid.N"] is not None and v["grid.N"] < 16:
        raise ConfigError("grid.N: must be >= 16")
    if v["grid.x_max"] is not None and not v["grid.x_max"] > 0:
        raise ConfigError("grid.x_max: must be positive")
    if v["geodesic.preset"] not in geodesics.PRESETS:
        raise ConfigError(f"geodesic.preset: choose from {', '.join(geodesics.PRESETS)}")
    if not v["geodesic.tol"] > 0:
        raise ConfigError("geodesic.tol: must be positive")
    if len(v["curvature.X"]) != 3:
        raise ConfigError("curvature.X: needs three comma-separated components")
    if v["verify.suite"] not in checks.SUITES:
        raise ConfigError(f"verify.suite: choose from {', '.join(checks.SUITES)}")
    if not v["transform.delta"] >= 0:
        raise ConfigError("transform.delta: must be >= 0")
    modes = _parse_modes(v["evolve.modes"])
    for n, k, l, m in modes:
        if abs(m) > l or k < 0:
            raise ConfigError(f"evolve.modes: invalid mode {(n, k, l, m)}")
        if l > v["run.l_max"]:
            raise ConfigError(f"evolve.modes: l={l} exceeds run.l_max")
    v["evolve.modes"] = modes
    if cfg.spacetime == "wormhole" and any(n != 0 for n, *_ in modes):
        raise ConfigError("evolve.modes: the wormhole has no Kaluza-Klein number (use n = 0)")


def load_config(command, path=None, overrides=()):
    """Defaults <- INI file <- --set overrides <- explicit flags; validated."""
    text = {k: d for k, (_, d) in DEFAULTS.items()}
    if path:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        if not cp.read(path):
            raise ConfigError(f"config file {path!r} not found")
        for sec in cp.sections():
            if sec == "command":
                continue
            for name, val in cp[sec].items():
                key = f"{sec}.{name}"
                if key not in DEFAULTS:
                    raise ConfigError(f"{key}: unknown configuration key")
                text[key] = val
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        key, val = item.split("=", 1)
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"{key}: unknown configuration key")
        text[key] = val.strip()
    values = {}
    for key, (parse, _) in DEFAULTS.items():
        try:
            values[key] = parse(text[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: cannot parse {text[key]!r} ({exc})") from None
    cfg = RunConfig(command, values, text)
    _validate(cfg)
    return cfg


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------


class Outputs:
    """Collects files in memory and writes them atomically at the end of a run."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.files = {}

    def table(self, name, columns, rows, extra=()):
        lines = self.cfg.header() + [f"# {e}" for e in extra] + [",".join(columns)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        self.files[name] = "\n".join(lines) + "\n"

    def text(self, name, body):
        self.files[name] = body

    def commit(self):
        out = self.cfg.output
        os.makedirs(out, exist_ok=True)
        self.files["config.ini"] = self.cfg.to_ini()
        for name, body in sorted(self.files.items()):
            fd, tmp = tempfile.mkstemp(dir=out, prefix=".tmp-")
            with os.fdopen(fd, "w") as fh:
                fh.write(body)
            os.replace(tmp, os.path.join(out, name))
        return sorted(self.files)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _spec(cfg, n=0):
    return spectral.RadialOperatorSpec(cfg.spacetime, cfg.mass, n, cfg["grid.x_max"], cfg["grid.N"])


def _check_discrete(cfg):
    if cfg.spacetime == "witten" and cfg.mass == 0 and 0 in cfg["run.ns"]:
        raise ConfigError("run.ns: the massless n = 0 Witten operator has continuous spectrum; use the 'transform' command")
    if cfg.spacetime == "wormhole" and cfg.mass == 0:
        raise ConfigError("run.mass: the massless wormhole operator has continuous spectrum; use 'verify --suite fields'")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_spectrum(cfg, out):
    _check_discrete(cfg)
    count = cfg["run.count"]
    rows = []
    ns = cfg["run.ns"] if cfg.spacetime == "witten" else (0,)
    for n in ns:
        if count == 0:
            continue
        spec = _spec(cfg, n)
        a = spectral.solve_discrete(spec, count)
        fine = spectral.RadialOperatorSpec(spec.spacetime, spec.M, spec.n, spec.x_max, 2 * spec.N)
        b = spectral.solve_discrete(fine, count)
        for k in range(count):
            lam = a.eigenvalues[k]
            rows.append((n, k, lam, b.eigenvalues[k], abs(lam - b.eigenvalues[k]) / lam, a.tail_mass[k]))
    out.table("spectrum.csv", ["n", "k", "lambda", "lambda_2N", "drift", "tail_mass"], rows)
    return EXIT_OK


def cmd_transform(cfg, out):
    tr = spectral.build_transform(
        cfg["transform.x_max"], cfg["transform.N_r"], cfg["transform.N_lambda"], cfg["transform.lambda_max"], 0.0
    )
    u = fields.smooth_packet(tr.x, cfg["transform.packet_x0"])
    uh = spectral.forward_transform(u, tr)
    back = spectral.inverse_transform(uh, tr)
    parseval = spectral.spectral_norm2(uh, tr) / spectral.radial_norm2(u, tr) - 1.0
    roundtrip = float(np.sqrt(spectral.radial_norm2(back - u, tr) / spectral.radial_norm2(u, tr)))
    rows = [(lam, w, z.real, z.imag) for lam, w, z in zip(tr.lambdas, tr.lam_weights, uh)]
    extra = [f"parseval_defect={parseval!r}", f"roundtrip_error={roundtrip!r}"]
    out.table("transform.csv", ["lambda", "weight", "Re", "Im"], rows, extra)
    cc = fields.analyze_continuous({(cfg["transform.l"], 0): u}, {}, tr, delta=cfg["transform.delta"])
    buf = io.StringIO()
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "c.txt")
        fields.write_continuous(cc, path, cfg.header())
        buf.write(open(path).read())
    out.text("continuous_coefficients.txt", buf.getvalue())
    return EXIT_OK


def _initial_coefficients(cfg):
    _check_discrete(cfg)
    modes = cfg["evolve.modes"]
    ns = sorted({n for n, *_ in modes}) or [0]
    count = max([k for _, k, _, _ in modes] + [cfg["run.count"] - 1]) + 1
    spectra = {n: spectral.solve_discrete(_spec(cfg, n), count) for n in ns}
    rng = np.random.default_rng(cfg["run.seed"])
    f, g = {}, {}
    for n, k, l, m in modes:
        e = spectra[n].eigenvectors[:, k]
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        f[(n, l, m)] = f.get((n, l, m), 0) + a * e
        g[(n, l, m)] = g.get((n, l, m), 0) + b * e
    kind = "field" if cfg.spacetime == "witten" else "profile"
    return fields.analyze(f, g, spectra, cfg.spacetime, cfg.mass, kind=kind, drop=1e-12), kind


def _coef_text(coefs, cfg, entries=None, name="coefficients"):
    c = coefs if entries is None else fields.ModeCoefficients(coefs.spacetime, coefs.M, coefs.spectra, entries)
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, name)
        fields.write_coefficients(c, path, cfg.header())
        return open(path).read()


def cmd_evolve(cfg, out):
    coefs, kind = _initial_coefficients(cfg)
    out.text("coefficients.txt", _coef_text(coefs, cfg))
    rows, erows = [], []
    for t in cfg["evolve.times"]:
        snap = fields.synthesize(coefs, t, kind=kind)
        for (n, l, m), u in sorted(snap.values.items()):
            for x, val in zip(snap.x, u):
                rows.append((t, x, n, l, m, val.real, val.imag))
        E = fields.energy(snap, coefs)
        rate = fields.energy_rate(snap, coefs) if cfg.spacetime == "witten" else float("nan")
        erows.append((t, E, rate))
    out.table("snapshots.csv", ["t", "x", "n", "l", "m", "Re", "Im"], rows)
    out.table("energy.csv", ["t", "energy", "identity_rate"], erows)
    return EXIT_OK


def cmd_scatter(cfg, out):
    coefs, _ = _initial_coefficients(cfg)
    amps = fields.wave_operators(coefs)
    d_in = fields.asymptotic_data(coefs, amps, "in")
    d_out = fields.asymptotic_data(coefs, amps, "out")
    S = fields.scattering(d_in)
    rows = []
    for key in sorted(amps):
        a = amps[key]
        n, k, l, m = key
        rows.append((n, k, l, m, coefs.lam(n, k), a.w_in_plus.real, a.w_in_plus.imag, a.w_in_minus.real, a.w_in_minus.imag,
                     a.w_out_plus.real, a.w_out_plus.imag, a.w_out_minus.real, a.w_out_minus.imag))
    cols = ["n", "k", "l", "m", "lambda", "Re_in+", "Im_in+", "Re_in-", "Im_in-", "Re_out+", "Im_out+", "Re_out-", "Im_out-"]
    out.table("amplitudes.csv", cols, rows)
    e_in, e_out = fields.asymptotic_energy(coefs, amps, "in"), fields.asymptotic_energy(coefs, amps, "out")
    n_in = fields.weighted_norm(d_in)
    t = cfg["scatter.t_check"]
    kind = "field" if cfg.spacetime == "witten" else "profile"
    prof = fields.synthesize(coefs, t, kind="profile")
    diff = fields.energy(fields.difference(prof, fields.free_profile(coefs, amps, t)), coefs, kind="asymptotic")
    report = [
        ("energy_in", e_in),
        ("energy_out", e_out),
        ("energy_defect", abs(e_out - e_in) / e_in),
        ("isometry_defect", abs(fields.weighted_norm(S) - n_in) / n_in),
        ("out_state_defect", float(np.max(np.abs(S.v - d_out.v)) / np.max(np.abs(d_out.v)))),
        ("wave_operator_defect", diff / e_out),
        ("kind", kind),
    ]
    out.table("scatter_report.csv", ["quantity", "value"], report)
    return EXIT_OK


def cmd_geodesic(cfg, out):
    s0 = geodesics.preset_state(cfg["geodesic.preset"])
    traj = geodesics.integrate(s0, (0.0, cfg["geodesic.span"]), tol=cfg["geodesic.tol"], n_samples=cfg["geodesic.samples"])
    c0 = geodesics.conserved(s0).as_array()
    C, V = traj.cartesian()
    rows, drift = [], 0.0
    for lam, st, c, v in zip(traj.lambdas, traj.states, C, V):
        cons = geodesics.conserved(st).as_array()
        drift = max(drift, float(np.max(np.abs(cons - c0))))
        rows.append((lam, *c, *v, geodesics._rho_of(st.point), *cons))
    names = ["t", "y", "z", "theta", "phi"] if len(C[0]) == 5 else ["t", "y", "theta", "phi"]
    cols = ["lambda"] + names + ["d" + n for n in names] + ["rho", "E", "K_phi", "K_psi", "Kp_t", "Kpp_t"]
    out.table("trajectory.csv", cols, rows)
    report = [("conserved_drift", drift), ("chart_switches", len(traj.switches)), ("y_crossings", len(traj.y_crossings))]
    if cfg["geodesic.preset"] == "null-through-bubble":
        # the path stays on the straight line through the bubble centre in the (y, z) plane
        ang = np.arctan2(V[0][2], V[0][1])
        report.append(("straight_line_residual", float(np.max(np.abs(C[:, 1] * np.sin(ang) - C[:, 2] * np.cos(ang))))))
    out.table("geodesic_report.csv", ["quantity", "value"], report)
    return EXIT_OK


def cmd_curvature(cfg, out):
    T, X = cfg["curvature.T"], np.array(cfg["curvature.X"])
    if cfg.spacetime != "wormhole":
        raise ConfigError("run.spacetime: the curvature tables are for the wormhole (the Witten metric is Ricci flat)")
    data = charts.wormhole_curvature(T, X)
    fd = charts.ricci_numeric(charts.ChartPoint("conformal_cartesian", (T, *X)))
    rows = [(a, b, data.ricci[a, b], fd[a, b], data.stress[a, b]) for a in range(4) for b in range(a, 4)]
    out.table("ricci.csv", ["a", "b", "ricci", "ricci_fd", "stress"], rows, [f"scalar={data.scalar!r}"])
    nec = [(j, sg, charts.nec_witness(T, X, j, sg), charts.nec_witness_closed(T, X, j, sg)) for j in (1, 2, 3) for sg in (1, -1)]
    out.table("nec.csv", ["j", "sign", "witness", "witness_closed"], nec)
    return EXIT_OK


def cmd_verify(cfg, out):
    results = checks.run_checks(suite=cfg["verify.suite"])
    for r in results:
        print(r.line())
    rows = [(r.number, r.name, r.value, r.tol, r.passed) for r in results]
    out.table("verify.csv", ["criterion", "name", "value", "tol", "passed"], rows)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECKS


HANDLERS = {
    "spectrum": cmd_spectrum,
    "transform": cmd_transform,
    "evolve": cmd_evolve,
    "scatter": cmd_scatter,
    "geodesic": cmd_geodesic,
    "curvature": cmd_curvature,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="bubblewaves", description="Klein-Gordon waves on the bubble of nothing and the wormhole")
    p.add_argument("--version", action="version", version=f"bubblewaves {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="INI file with [section] key = value entries")
        s.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
        for flag in FLAGS:
            s.add_argument("--" + flag.replace("_", "-"), dest=flag, default=None)
    return p


def _error(code, kind, message):
    record = {"error": kind, "message": message, "exit_code": code}
    print(json.dumps(record), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = list(args.set)
    for flag, key in FLAGS.items():
        val = getattr(args, flag)
        if val is not None:
            overrides.append(f"{key}={val}")
    try:
        cfg = load_config(args.command, args.config, overrides)
        out = Outputs(cfg)
        code = HANDLERS[args.command](cfg, out)
        written = out.commit()
    except ConfigError as exc:
        return _error(EXIT_CONFIG, "config", str(exc))
    except DomainError as exc:
        return _error(EXIT_CONFIG, "domain", str(exc))
    except ConvergenceError as exc:
        return _error(EXIT_CONVERGENCE, "convergence", str(exc))
    print(f"wrote {', '.join(written)} to {cfg.output}")
    return code


if __name__ == "__main__":
    sys.exit(main())
