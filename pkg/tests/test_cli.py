import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from bubblewaves import cli, spectral


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, out


def table(path):
    with open(path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(rows))


def config_body(path):
    # the output directory is part of the effective config but not of its hash
    return [l for l in path.read_text().splitlines() if not l.startswith("output = ")]


def error_record(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


class TestSpectrum:
    def test_wormhole_eigenvalues(self, tmp_path):
        code, out = run(tmp_path, "spectrum", "--spacetime", "wormhole", "--mass", "1", "--count", "5")
        assert code == 0
        rows = table(out / "spectrum.csv")
        lam = np.array([float(r["lambda"]) for r in rows])
        assert len(lam) == 5 and np.all(lam > 0) and np.all(np.diff(lam) > 0)
        ref = spectral.solve_discrete(spectral.RadialOperatorSpec("wormhole", 1.0), 5).eigenvalues
        assert np.allclose(lam, ref, rtol=1e-12)

    def test_massless_witten_is_rejected(self, tmp_path, capsys):
        code, out = run(tmp_path, "spectrum", "--spacetime", "witten", "--mass", "0", "--n", "0")
        assert code == 2
        rec = error_record(capsys)
        assert rec["exit_code"] == 2 and "transform" in rec["message"]
        assert not out.exists()

    def test_zero_count(self, tmp_path):
        code, out = run(tmp_path, "spectrum", "--count", "0")
        assert code == 0
        assert table(out / "spectrum.csv") == []

    def test_convergence_failure(self, tmp_path, capsys):
        code, _ = run(tmp_path, "spectrum", "--mass", "0.1", "--x-max", "1.5", "--N", "512", "--count", "2")
        assert code == 3
        assert error_record(capsys)["error"] == "convergence"

    def test_header_block(self, tmp_path):
        _, out = run(tmp_path, "spectrum", "--count", "2")
        head = (out / "spectrum.csv").read_text().splitlines()[:3]
        assert head[0] == "# header: bubblewaves 0.1.0"
        assert head[1] == "# command: spectrum"
        assert head[2].startswith("# config_sha256: ")
        assert not [p for p in os.listdir(out) if p.startswith(".tmp-")]


class TestConfig:
    @pytest.mark.parametrize(
        "argv,key",
        [
            (["spectrum", "--mass", "-1"], "run.mass"),
            (["spectrum", "--spacetime", "flat"], "run.spacetime"),
            (["spectrum", "--set", "nope.key=1"], "nope.key"),
            (["spectrum", "--set", "run.count"], "run.count"),
            (["evolve", "--modes", "0:0:0"], "evolve.modes"),
            (["geodesic", "--preset", "nope"], "geodesic.preset"),
        ],
    )
    def test_field_level_messages(self, tmp_path, capsys, argv, key):
        code, _ = run(tmp_path, *argv)
        assert code == 2
        assert key in error_record(capsys)["message"]

    def test_missing_file(self, tmp_path, capsys):
        code, _ = run(tmp_path, "spectrum", "--config", str(tmp_path / "none.ini"))
        assert code == 2

    def test_precedence(self, tmp_path):
        ini = tmp_path / "c.ini"
        ini.write_text("[run]\nspacetime = wormhole\ncount = 4\n")
        _, out = run(tmp_path, "spectrum", "--config", str(ini), "--set", "run.count=3", "--count", "2")
        assert len(table(out / "spectrum.csv")) == 2
        assert "spacetime = wormhole" in (out / "config.ini").read_text()

    def test_determinism(self, tmp_path):
        argv = ["evolve", "--times", "0,0.5"]
        _, a = run(tmp_path, *argv, name="a")
        _, b = run(tmp_path, *argv, name="b")
        for f in ("coefficients.txt", "snapshots.csv", "energy.csv"):
            assert (a / f).read_bytes() == (b / f).read_bytes()
        assert config_body(a / "config.ini") == config_body(b / "config.ini")

    def test_round_trip(self, tmp_path):
        _, a = run(tmp_path, "scatter", "--spacetime", "wormhole", "--mass", "2", name="a")
        _, b = run(tmp_path, "scatter", "--config", str(a / "config.ini"), name="b")
        for f in ("amplitudes.csv", "scatter_report.csv"):
            assert (a / f).read_bytes() == (b / f).read_bytes()
        assert config_body(a / "config.ini") == config_body(b / "config.ini")


class TestCommands:
    def test_verify_desitter(self, tmp_path, capsys):
        code, out = run(tmp_path, "verify", "--suite", "desitter")
        assert code == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("[")]
        assert len(lines) == 4 and all(l.startswith("[PASS]") for l in lines)
        assert [r["passed"] for r in table(out / "verify.csv")] == ["1"] * 4

    def test_geodesic_straight_line(self, tmp_path):
        code, out = run(tmp_path, "geodesic", "--preset", "null-through-bubble")
        assert code == 0
        rep = {r["quantity"]: float(r["value"]) for r in table(out / "geodesic_report.csv")}
        assert rep["straight_line_residual"] < 1e-8
        assert rep["conserved_drift"] < 1e-8
        assert len(table(out / "trajectory.csv")) == 401

    def test_curvature(self, tmp_path):
        code, out = run(tmp_path, "curvature", "--spacetime", "wormhole", "--T", "0.1", "--X", "1,0,0")
        assert code == 0
        scalar = [l for l in (out / "ricci.csv").read_text().splitlines() if l.startswith("# scalar=")][0]
        assert abs(float(scalar.split("=")[1])) < 1e-12
        nec = table(out / "nec.csv")
        assert len(nec) == 6 and all(float(r["witness"]) < 0 for r in nec)

    def test_curvature_needs_wormhole(self, tmp_path):
        assert run(tmp_path, "curvature", "--spacetime", "witten")[0] == 2

    def test_curvature_outside_domain(self, tmp_path):
        assert run(tmp_path, "curvature", "--spacetime", "wormhole", "--T", "2", "--X", "1,0,0")[0] == 2

    def test_evolve_energy(self, tmp_path):
        code, out = run(tmp_path, "evolve", "--times", "0,1,2,3")
        assert code == 0
        E = [float(r["energy"]) for r in table(out / "energy.csv")]
        assert np.all(np.diff(E) <= 0)
        snap = (out / "snapshots.csv").read_text().splitlines()
        assert [l for l in snap if not l.startswith("#")][0] == "t,x,n,l,m,Re,Im"

    def test_scatter_report(self, tmp_path):
        code, out = run(tmp_path, "scatter")
        assert code == 0
        rep = {r["quantity"]: r["value"] for r in table(out / "scatter_report.csv")}
        assert float(rep["isometry_defect"]) < 1e-12
        assert float(rep["energy_defect"]) < 1e-10

    def test_transform(self, tmp_path):
        code, out = run(tmp_path, "transform", "--set", "transform.N_r=2048", "--set", "transform.N_lambda=512")
        assert code == 0
        assert len(table(out / "transform.csv")) == 512
        assert (out / "continuous_coefficients.txt").exists()


def test_module_entry_point():
    env = dict(os.environ, BUBBLEWAVES_THREADS="1")
    r = subprocess.run([sys.executable, "-m", "bubblewaves", "--version"], capture_output=True, text=True, env=env)
    assert r.returncode == 0 and r.stdout.strip() == "bubblewaves 0.1.0"
