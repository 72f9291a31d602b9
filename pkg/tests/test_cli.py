"""CLI contract: schemas, exit codes, determinism, config/env handling."""

import json
import subprocess
import sys

import calogero_ss.cli as cli
from calogero_ss.cli import (COEFFS_HEADER, EXIT_CHECK_FAILED,
                             EXIT_COUPLINGS, EXIT_IO, EXIT_OK, EXIT_SS_FOUND,
                             EXIT_USAGE, SCAN_HEADER, main)
from calogero_ss.scattering import ScanSummary


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestNuPrime:
    def test_success_json(self, capsys):
        code, out, _ = run(capsys, "nu-prime", "--g", "2", "--delta", "0")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc == {"roots": [-1.0, 2.0], "selected": 2.0,
                       "validity": "RangeII"}

    def test_no_real_exponent(self, capsys):
        code, _, err = run(capsys, "nu-prime", "--g", "-5", "--delta", "0")
        assert code == EXIT_COUPLINGS
        assert "invalid couplings" in err

    def test_missing_delta_usage(self, capsys):
        code, _, _ = run(capsys, "nu-prime", "--g", "0")
        assert code == EXIT_USAGE


class TestScan:
    def test_basic_contract(self, capsys, tmp_path):
        out_file = tmp_path / "scan.csv"
        code, _, err = run(capsys, "scan", "--n", "3", "--samples", "200",
                           "--p-max", "10", "--seed", "7",
                           "--out", str(out_file))
        assert code == EXIT_OK
        assert "min pair factor" in err
        lines = out_file.read_text().splitlines()
        preamble = [ln for ln in lines if ln.startswith("#")]
        body = [ln for ln in lines if not ln.startswith("#")]
        assert body[0] == SCAN_HEADER
        assert len(body) == 1 + 200
        assert preamble  # conventions embedded
        assert all(row.endswith(",false") for row in body[1:])

    def test_byte_identical_reruns(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["scan", "--n", "2", "--samples", "50", "--p-max", "5",
                "--seed", "3"]
        assert main(args + ["--out", str(a)]) == EXIT_OK
        assert main(args + ["--out", str(b)]) == EXIT_OK
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_empty_scan(self, capsys, tmp_path):
        out_file = tmp_path / "scan.csv"
        code, _, _ = run(capsys, "scan", "--n", "2", "--samples", "0",
                         "--p-max", "10", "--seed", "1",
                         "--out", str(out_file))
        assert code == EXIT_OK
        body = [ln for ln in out_file.read_text().splitlines()
                if not ln.startswith("#")]
        assert body == [SCAN_HEADER]

    def test_ss_finding_exit_code(self, capsys, tmp_path, monkeypatch):
        # the model admits no singular sample; force the reporting path
        real = cli.ss_scan

        def fake(n, sampler, n_samples, tol, params, max_workers):
            summary = real(n, sampler, n_samples, tol=tol, params=params,
                           max_workers=max_workers)
            reports = tuple(
                r.__class__(pset=r.pset, pair_factors=r.pair_factors,
                            m22_status=r.m22_status,
                            w_magnitudes=r.w_magnitudes, ss_verdict=True)
                for r in summary.reports)
            return ScanSummary(reports, summary.min_pair_factor,
                               len(reports))

        monkeypatch.setattr(cli, "ss_scan", fake)
        code, _, _ = run(capsys, "scan", "--n", "2", "--samples", "3",
                         "--p-max", "5", "--seed", "1",
                         "--out", str(tmp_path / "s.csv"))
        assert code == EXIT_SS_FOUND

    def test_io_failure(self, capsys):
        code, _, err = run(capsys, "scan", "--n", "2", "--samples", "1",
                           "--p-max", "5", "--seed", "1",
                           "--out", "/nonexistent-dir/x.csv")
        assert code == EXIT_IO
        assert "i/o failure" in err


class TestCoeffs:
    def test_two_body_row(self, capsys):
        code, out, _ = run(capsys, "coeffs", "--n", "2", "--p", "1",
                           "--nu-prime", "1", "--delta", "0.5",
                           "--r-minus", "50", "--r-plus", "5")
        assert code == EXIT_OK
        lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
        assert lines[0] == COEFFS_HEADER
        fields = lines[1].split(",")
        assert abs(float(fields[9]) - 1.0) < 1e-9  # R column
        meta = [ln for ln in out.splitlines() if ln.startswith("#")]
        assert any("alt_d_derivative_squared" in ln for ln in meta)
        assert any("phi_exponent=nu_prime" in ln for ln in meta)

    def test_n_body_row(self, capsys):
        code, out, _ = run(capsys, "coeffs", "--n", "3", "--p", "1",
                           "--nu-prime", "1", "--delta", "0.5",
                           "--r-minus", "80", "--k", "3")
        assert code == EXIT_OK
        lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
        fields = lines[1].split(",")
        assert abs(float(fields[9]) - 1.0) < 1e-9
        assert fields[10] == "nan"  # T undefined for the envelope matcher

    def test_invalid_couplings(self, capsys):
        code, _, _ = run(capsys, "coeffs", "--n", "2", "--p", "1",
                         "--g", "-0.3", "--delta", "-0.9")
        assert code == EXIT_COUPLINGS

    def test_exclusive_parameterization(self, capsys):
        code, _, _ = run(capsys, "coeffs", "--n", "2", "--p", "1",
                         "--g", "0", "--nu-prime", "1", "--delta", "0")
        assert code == EXIT_USAGE


class TestSweep:
    def test_r_minus_trend_check_fails_loudly(self, capsys, tmp_path):
        out_file = tmp_path / "sweep.csv"
        code, _, err = run(capsys, "sweep", "--n", "2", "--nu-prime", "1",
                           "--delta", "0.5", "--param", "r-minus",
                           "--from", "10", "--to", "10000", "--steps", "4",
                           "--log", "--p", "1", "--r-plus", "5",
                           "--out", str(out_file))
        assert code == EXIT_CHECK_FAILED
        assert "expected-trend check failed" in err
        text = out_file.read_text()
        assert "# trend_discrepancy=" in text
        body = [ln for ln in text.splitlines() if not ln.startswith("#")]
        assert len(body) == 1 + 4

    def test_rows_match_coeffs(self, capsys, tmp_path):
        out_file = tmp_path / "sweep.csv"
        main(["sweep", "--n", "2", "--nu-prime", "1", "--delta", "0.5",
              "--param", "r-minus", "--from", "10", "--to", "10000",
              "--steps", "4", "--log", "--p", "1", "--r-plus", "5",
              "--out", str(out_file)])
        capsys.readouterr()
        body = [ln for ln in out_file.read_text().splitlines()
                if not ln.startswith("#")]
        for row in body[1:]:
            r_minus = float(row.split(",")[1])
            code, out, _ = run(capsys, "coeffs", "--n", "2",
                               "--nu-prime", "1", "--delta", "0.5",
                               "--p", "1", "--r-minus", repr(r_minus),
                               "--r-plus", "5")
            assert code == EXIT_OK
            single = [ln for ln in out.splitlines()
                      if not ln.startswith("#")][1]
            assert single == row

    def test_p_sweep_exit_ok(self, capsys, tmp_path):
        out_file = tmp_path / "sweep.csv"
        code, _, _ = run(capsys, "sweep", "--n", "2", "--nu-prime", "1",
                         "--delta", "0", "--param", "p", "--from", "0.5",
                         "--to", "2.0", "--steps", "3",
                         "--r-minus", "30", "--r-plus", "5",
                         "--out", str(out_file))
        assert code == EXIT_OK

    def test_svg_plot_contract(self, capsys, tmp_path):
        svg_file = tmp_path / "t.svg"
        code, _, _ = run(capsys, "sweep", "--n", "2", "--nu-prime", "1",
                         "--delta", "0.5", "--param", "r-minus",
                         "--from", "10", "--to", "10000", "--steps", "4",
                         "--log", "--p", "1", "--r-plus", "5",
                         "--out", str(tmp_path / "s.csv"),
                         "--plot", str(svg_file))
        assert code == EXIT_CHECK_FAILED  # trend still fails; plot written
        text = svg_file.read_text()
        assert text.splitlines()[1].startswith("<svg")
        assert text.count("<polyline") == 1
        assert "<!--" in text and "trend_claim" in text

    def test_svg_deterministic(self, capsys, tmp_path):
        files = []
        for name in ("a.svg", "b.svg"):
            path = tmp_path / name
            main(["sweep", "--n", "2", "--nu-prime", "1", "--delta", "0.5",
                  "--param", "p", "--from", "0.5", "--to", "2.0",
                  "--steps", "5", "--r-minus", "30", "--r-plus", "5",
                  "--out", str(tmp_path / (name + ".csv")),
                  "--plot", str(path)])
            files.append(path.read_bytes())
        capsys.readouterr()
        assert files[0] == files[1]


class TestResidual:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "residual", "--n", "2", "--nu-prime", "1",
                           "--delta", "0", "--p", "1", "--k", "0",
                           "--h", "1e-3")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["max_residual"] < 1e-6
        assert 3.5 < doc["convergence_ratio"] < 4.5
        assert doc["metadata"]["eigenvalue_convention"] == "half_p_squared"

    def test_check_failure_exit(self, capsys):
        code, out, _ = run(capsys, "residual", "--n", "2", "--nu-prime", "1",
                           "--delta", "0", "--p", "1", "--k", "0",
                           "--h", "1e-3", "--tol", "1e-12")
        assert code == EXIT_CHECK_FAILED
        assert json.loads(out)["passed"] is False

    def test_configs_file(self, capsys, tmp_path):
        cfg = tmp_path / "configs.json"
        cfg.write_text(json.dumps(
            {"configs": [[2.0, -1.0], [3.0, 0.5], [1.5, -2.0]]}))
        code, out, _ = run(capsys, "residual", "--n", "2", "--nu-prime", "1",
                           "--delta", "0", "--p", "1", "--k", "0",
                           "--h", "1e-3", "--configs", str(cfg))
        assert code == EXIT_OK
        assert json.loads(out)["passed"] is True


class TestPolys:
    def test_cubic(self, capsys):
        code, out, _ = run(capsys, "polys", "--n", "3", "--k", "3",
                           "--lambda", "7/10")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["n"] == 3 and doc["k"] == 3
        assert doc["lambda"] == "7/10"
        assert doc["dimension"] == 1
        assert len(doc["basis"]) == 1
        assert set(doc["basis"][0]) == {"3", "2+1", "1+1+1"}

    def test_degree_one(self, capsys):
        code, out, _ = run(capsys, "polys", "--n", "3", "--k", "1",
                           "--lambda", "7/10")
        assert code == EXIT_OK
        assert json.loads(out)["dimension"] == 0

    def test_bad_lambda(self, capsys):
        code, _, _ = run(capsys, "polys", "--n", "3", "--k", "1",
                         "--lambda", "x")
        assert code == EXIT_USAGE


class TestConfigAndEnv:
    def test_config_provides_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"delta": 0.0, "g": 2.0}))
        code, out, _ = run(capsys, "--config", str(cfg), "nu-prime")
        assert code == EXIT_OK
        assert json.loads(out)["selected"] == 2.0

    def test_flags_win_over_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"g": 2.0, "delta": 0.0}))
        code, out, _ = run(capsys, "--config", str(cfg), "nu-prime",
                           "--g", "0")
        assert code == EXIT_OK
        assert json.loads(out)["selected"] == 1.0

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        code, _, _ = run(capsys, "--config", str(cfg), "nu-prime",
                         "--g", "0", "--delta", "0")
        assert code == EXIT_USAGE

    def test_threads_env_invalid(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("CALOGERO_SS_THREADS", "zero")
        code, _, _ = run(capsys, "scan", "--n", "2", "--samples", "1",
                         "--p-max", "5", "--seed", "1",
                         "--out", str(tmp_path / "s.csv"))
        assert code == EXIT_USAGE

    def test_threads_env_matches_serial(self, capsys, tmp_path, monkeypatch):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["scan", "--n", "3", "--samples", "40", "--p-max", "5",
                "--seed", "9"]
        monkeypatch.delenv("CALOGERO_SS_THREADS", raising=False)
        main(args + ["--out", str(a)])
        monkeypatch.setenv("CALOGERO_SS_THREADS", "4")
        main(args + ["--out", str(b)])
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()


def test_console_script_installed():
    out = subprocess.run([sys.executable, "-m", "calogero_ss.cli",
                          "nu-prime", "--g", "0", "--delta", "0"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["selected"] == 1.0
