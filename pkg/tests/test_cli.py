"""Command-line front end: output formats, exit codes, figures and determinism."""

import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from trigsusy import cli
from trigsusy import spectral_oracle as so


def run(capsys, *argv):
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


# ═══════════════════════════════════════════════════════════════════
# spectrum
# ═══════════════════════════════════════════════════════════════════


class TestSpectrum:
    def test_stp_oracle(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--potential", "stp", "--A", "2", "--n-max", "3",
                           "--method", "oracle", "--sign", "minus")
        assert code == 0
        assert out.splitlines()[0] == "n,energy,method,potential,sign"
        es = [float(r["energy"]) for r in rows_of(out)]
        np.testing.assert_allclose(es, [0, 5, 12, 21], atol=1e-5)

    def test_ptp_oracle(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--potential", "ptp", "--n-max", "2", "--method", "oracle")
        assert code == 0
        es = [float(r["energy"]) for r in rows_of(out)]
        np.testing.assert_allclose(es, [0, 20, 48], rtol=1e-6, atol=1e-5)

    def test_single_row(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--n-max", "0", "--method", "closed-form")
        rows = rows_of(out)
        assert code == 0 and len(rows) == 1 and rows[0]["n"] == "0"

    def test_all_methods(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--n-max", "2")
        methods = {r["method"] for r in rows_of(out)}
        assert code == 0 and methods == {"closed-form", "nu", "oracle", "hierarchy"}

    def test_seventeen_digits(self, capsys):
        _, out, _ = run(capsys, "spectrum", "--n-max", "1", "--method", "nu")
        e1 = rows_of(out)[1]["energy"]
        assert float(e1) == pytest.approx(5.0)
        assert e1 == f"{float(e1):.17g}"

    def test_json_mirrors_csv(self, capsys):
        _, text_csv, _ = run(capsys, "spectrum", "--n-max", "2", "--method", "nu")
        _, text_json, _ = run(capsys, "spectrum", "--n-max", "2", "--method", "nu", "--format", "json")
        rows = json.loads(text_json)["rows"]
        assert [r["energy"] for r in rows] == [float(r["energy"]) for r in rows_of(text_csv)]

    def test_units_env(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.UNITS_ENV, "hbar-m-1")
        _, out, _ = run(capsys, "spectrum", "--n-max", "1", "--method", "nu")
        # hbar = m = 1 changes both kappa and c, so E1 moves off 5
        assert float(rows_of(out)[1]["energy"]) != pytest.approx(5.0)

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        code, out, _ = run(capsys, "spectrum", "--n-max", "1", "--method", "nu", "--out", str(path))
        assert code == 0 and out == ""
        raw = path.read_bytes()
        assert b"\r\n" not in raw and raw.startswith(b"n,energy")


# ═══════════════════════════════════════════════════════════════════
# Exit codes and configuration
# ═══════════════════════════════════════════════════════════════════


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        ("spectrum", "--potential", "stp", "--A", "-1"),
        ("spectrum", "--n-max", "-1"),
        ("spectrum", "--grid", "8"),
        ("spectrum", "--tol", "-1"),
        ("spectrum", "--units", "furlongs"),
        ("figure", "7"),
        ("wavefunction", "--n", "9"),
    ])
    def test_config_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2 and err

    def test_bad_env_units(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.UNITS_ENV, "nope")
        assert run(capsys, "spectrum", "--n-max", "0")[0] == 2

    def test_verify_default_passes(self, capsys):
        code, out, err = run(capsys, "verify", "--potential", "stp")
        assert code == 0 and "pass" in err
        assert "Eq29-offset" in out

    def test_verify_zero_tolerance_fails(self, capsys):
        code, _, err = run(capsys, "verify", "--potential", "stp", "--n-max", "2", "--tol", "0")
        assert code == 1 and "FAIL" in err

    def test_scp_hierarchy_note(self, capsys):
        code, out, err = run(capsys, "verify", "--potential", "scp", "--n-max", "3")
        assert code == 0 and "no zero mode" in err
        assert "hierarchy[scp|minus]" in out

    def test_ledger_never_fails(self, capsys):
        code, out, _ = run(capsys, "ledger", "--potential", "ptp", "--n-max", "2", "--tol", "0")
        assert code == 0 and "agreement[" not in out and "Eq41-A1" in out


# ═══════════════════════════════════════════════════════════════════
# Help and determinism
# ═══════════════════════════════════════════════════════════════════


class TestHelp:
    FLAGS = ("--potential", "--A", "--a", "--b", "--alpha", "--sign", "--n-max", "--method", "--units",
             "--grid", "--tol", "--format", "--out", "--seed")

    @pytest.mark.parametrize("command", ["spectrum", "verify", "figure", "wavefunction", "ledger"])
    def test_flags_listed(self, capsys, command):
        code, out, _ = run(capsys, command, "--help")
        assert code == 0
        for flag in self.FLAGS:
            assert flag in out
        assert "default" in out

    def test_module_entry(self):
        proc = subprocess.run([sys.executable, "-m", "trigsusy", "spectrum", "--n-max", "1", "--method", "nu"],
                              capture_output=True, text=True, timeout=60)
        assert proc.returncode == 0 and proc.stdout.startswith("n,energy")


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ("spectrum", "--n-max", "3", "--grid", "512"),
        ("wavefunction", "--n", "2", "--grid", "256"),
        ("figure", "2"),
    ])
    def test_byte_identical(self, capsys, argv):
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second and first


# ═══════════════════════════════════════════════════════════════════
# figure and wavefunction
# ═══════════════════════════════════════════════════════════════════


def _series(rows, key):
    out = {}
    for r in rows:
        out.setdefault((r["param_label"], r.get("branch")), []).append(float(r[key]))
    return out


class TestFigures:
    @pytest.mark.parametrize("fig,n_count", [(1, 8), (3, 8), (5, 11)])
    def test_energy_series_monotone(self, capsys, fig, n_count):
        code, out, _ = run(capsys, "figure", str(fig))
        rows = rows_of(out)
        assert code == 0 and list(rows[0]) == ["n", "energy", "branch", "param_label"]
        for es in _series(rows, "energy").values():
            assert len(es) == n_count and all(b > a for a, b in zip(es, es[1:]))

    def test_figure5_grows_with_nu(self, capsys):
        rows = rows_of(run(capsys, "figure", "5")[1])
        ser = {k[0]: v for k, v in _series(rows, "energy").items()}
        for n in range(11):
            assert ser["nu1=1;nu2=1"][n] < ser["nu1=4;nu2=4"][n] < ser["nu1=9;nu2=9"][n]

    @pytest.mark.parametrize("fig,peak", [(2, 0.0), (4, math.pi / 2), (6, math.pi / 4)])
    def test_ground_state_peaks(self, capsys, fig, peak):
        code, out, _ = run(capsys, "figure", str(fig))
        rows = rows_of(out)
        assert code == 0 and list(rows[0]) == ["theta", "psi0", "param_label"]
        by = {}
        for r in rows:
            by.setdefault(r["param_label"], []).append((float(r["theta"]), float(r["psi0"])))
        assert len(by) == 3
        for pts in by.values():
            theta, psi = np.array(pts).T
            assert len(theta) == cli.FIGURE_SAMPLES
            assert abs(theta[np.argmax(psi)] - peak) <= 2 * (theta[1] - theta[0])

    def test_header_records_parameters(self, capsys):
        out = run(capsys, "figure", "1")[1]
        assert out.startswith("# figure: 1") and "deltas" in out


class TestWavefunction:
    @pytest.mark.parametrize("n", [0, 1, 3])
    def test_matches_oracle(self, capsys, n):
        code, out, _ = run(capsys, "wavefunction", "--n", str(n))
        rows = rows_of(out)
        assert code == 0 and list(rows[0]) == ["theta", "psi", "psi_oracle", "abs_diff"]
        theta = np.array([float(r["theta"]) for r in rows])
        psi = np.array([float(r["psi"]) for r in rows])
        diff = np.array([float(r["abs_diff"]) for r in rows])
        h = theta[1] - theta[0]
        assert np.max(diff) < 1e-3
        assert so.count_nodes(psi) == n
        assert float(np.sum(psi * psi) * h) == pytest.approx(1.0, abs=1e-6)

    def test_ptp(self, capsys):
        code, out, _ = run(capsys, "wavefunction", "--potential", "ptp", "--n", "2")
        assert code == 0 and max(float(r["abs_diff"]) for r in rows_of(out)) < 1e-3
