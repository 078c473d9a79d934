"""CLI surface: subcommands, exit codes, file outputs."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from nlslab.cli import main
from nlslab.grid import Grid2D, load_spectrum, save_spectrum, spectrum_to_csv
from conftest import random_spectrum


@pytest.fixture
def runner():
    return CliRunner()


def _write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def _acl_doc(**solver):
    sol = {"dt": 1e-3, "t0": 0.02, "observer_samples": 3}
    sol.update(solver)
    return {
        "config_version": 1,
        "experiment": "acl",
        "grid": {"modes_per_axis": 16},
        "imethod": {"s": 0.6, "N_list": [2.0, 2.2, 2.5], "theta0": "one_over_N"},
        "data": {"seeds": [7]},
        "solver": sol,
    }


class TestExitCodes:
    def test_missing_config_is_config_error(self, runner, tmp_path):
        result = runner.invoke(main, ["acl-sweep", "--config", str(tmp_path / "nope.json"),
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 2

    def test_invalid_config_is_config_error(self, runner, tmp_path):
        cfg = _write_config(tmp_path / "c.json", {"config_version": 7})
        result = runner.invoke(main, ["acl-sweep", "--config", cfg,
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 2

    def test_unstable_quadrature_is_numerical_error(self, runner, tmp_path):
        doc = {
            "config_version": 1,
            "experiment": "strichartz",
            "strichartz": {"thetas": [1 / 32], "N1": 8, "N2": 8, "resolution": [2, 2]},
        }
        cfg = _write_config(tmp_path / "c.json", doc)
        result = runner.invoke(main, ["strichartz", "--config", cfg,
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 3

    def test_check_failure_exits_4(self, runner, tmp_path):
        # two-point sweep cannot produce a slope, so the check must fail
        doc = _acl_doc()
        doc["imethod"]["N_list"] = [2.0, 2.5]
        cfg = _write_config(tmp_path / "c.json", doc)
        result = runner.invoke(main, ["acl-sweep", "--config", cfg,
                                      "--out", str(tmp_path / "o"), "--check"])
        assert result.exit_code == 4
        assert "FAIL" in result.output


class TestSweepCommands:
    def test_acl_sweep_writes_reports(self, runner, tmp_path):
        cfg = _write_config(tmp_path / "c.json", _acl_doc())
        out = tmp_path / "run"
        result = runner.invoke(main, ["acl-sweep", "--config", cfg, "--out", str(out)])
        assert result.exit_code == 0, result.output
        for name in ("run.json", "rows.csv", "aggregate.csv", "sweep.svg", "manifest.json"):
            assert (out / name).exists()

    def test_report_refuses_overwrite(self, runner, tmp_path):
        cfg = _write_config(tmp_path / "c.json", _acl_doc())
        out = tmp_path / "run"
        assert runner.invoke(main, ["acl-sweep", "--config", cfg,
                                    "--out", str(out)]).exit_code == 0
        again = runner.invoke(main, ["report", str(out)])
        assert again.exit_code == 2
        forced = runner.invoke(main, ["report", str(out), "--force"])
        assert forced.exit_code == 0

    def test_report_empty_dir_errors(self, runner, tmp_path):
        result = runner.invoke(main, ["report", str(tmp_path)])
        assert result.exit_code == 2


class TestSimulate:
    def test_trajectory_and_checkpoint(self, runner, tmp_path):
        doc = {
            "config_version": 1,
            "experiment": "simulate",
            "grid": {"modes_per_axis": 16},
            "imethod": {"s": 0.6, "N": 2.0, "N_list": []},
            "data": {"seeds": [5]},
            "solver": {"dt": 1e-3, "t_final": 0.02, "observe_every": 10,
                       "track_modified_energy": True},
        }
        cfg = _write_config(tmp_path / "c.json", doc)
        out = tmp_path / "sim"
        result = runner.invoke(main, ["simulate", "--config", cfg, "--out", str(out)])
        assert result.exit_code == 0, result.output
        header = (out / "rows.csv").read_text().splitlines()[0]
        assert header == "time,mass,energy,E_Iu,E_tilde"
        spec = load_spectrum(out / "final_spectrum.nls2")
        assert spec.grid.modes_per_axis == 16


class TestSymbolAudit:
    def test_audit_and_multiplier_dump(self, runner, tmp_path):
        dump = tmp_path / "m.csv"
        result = runner.invoke(main, [
            "symbol-audit", "--N", "16", "--s", "0.6", "--samples", "2000",
            "--seed", "1", "--stratum", "a", "--out", str(tmp_path / "audit"),
            "--dump-multiplier", str(dump)])
        assert result.exit_code == 0, result.output
        assert "max_ratio" in result.output
        lines = dump.read_text().splitlines()
        assert lines[0] == "r,m"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 1000
        # monotone non-increasing multiplier in the dump
        ms = [float(r[1]) for r in rows]
        assert all(a >= b - 1e-15 for a, b in zip(ms, ms[1:]))


class TestLambdaEval:
    def _spectrum_file(self, tmp_path):
        g = Grid2D(12)
        spec = random_spectrum(g, seed=4)
        path = tmp_path / "spec.nls2"
        save_spectrum(path, spec)
        return path, spec

    def test_sigma4(self, runner, tmp_path):
        path, _ = self._spectrum_file(tmp_path)
        result = runner.invoke(main, ["lambda-eval", "--symbol", "sigma4",
                                      "--spectrum", str(path), "--N", "2"])
        assert result.exit_code == 0, result.output
        assert "Lambda_4[sigma4]" in result.output
        assert "elapsed" in result.output

    def test_custom_csv_matches_sigma4(self, runner, tmp_path):
        path, spec = self._spectrum_file(tmp_path)
        from nlslab.multiplier import IMethodParams, multiplier_table
        from nlslab.grid import Spectrum

        p = IMethodParams(N=2.0, s=0.6)
        table = multiplier_table(spec.grid, p) * 0.25 ** 0.25
        csv_path = tmp_path / "factor.csv"
        spectrum_to_csv(csv_path, Spectrum(spec.grid, table.astype(complex)))
        result = runner.invoke(main, ["lambda-eval", "--symbol", "custom-csv",
                                      "--spectrum", str(path),
                                      "--symbol-file", str(csv_path)])
        assert result.exit_code == 0, result.output
        custom_val = float(result.output.split("=")[1].split()[0])
        direct = runner.invoke(main, ["lambda-eval", "--symbol", "sigma4",
                                      "--spectrum", str(path), "--N", "2", "--s", "0.6"])
        direct_val = float(direct.output.split("=")[1].split()[0])
        assert custom_val == pytest.approx(direct_val, rel=1e-9)

    def test_custom_requires_file(self, runner, tmp_path):
        path, _ = self._spectrum_file(tmp_path)
        result = runner.invoke(main, ["lambda-eval", "--symbol", "custom-csv",
                                      "--spectrum", str(path)])
        assert result.exit_code == 2

    def test_dump_tuples(self, runner, tmp_path):
        path, _ = self._spectrum_file(tmp_path)
        dump = tmp_path / "tuples.csv"
        result = runner.invoke(main, ["lambda-eval", "--symbol", "alpha4",
                                      "--spectrum", str(path),
                                      "--dump-tuples", str(dump)])
        assert result.exit_code == 0, result.output
        assert dump.read_bytes().count(b"\r\n") == 1001


class TestSerialization:
    def test_container_roundtrip(self, tmp_path):
        g = Grid2D(12, box_length=3.5, dealias_cutoff=4)
        spec = random_spectrum(g, seed=9)
        path = tmp_path / "s.nls2"
        save_spectrum(path, spec)
        back = load_spectrum(path)
        assert back.grid == g
        assert np.array_equal(back.coeffs, spec.coeffs)

    def test_container_header(self, tmp_path):
        g = Grid2D(12)
        spec = random_spectrum(g, seed=9)
        path = tmp_path / "s.nls2"
        save_spectrum(path, spec)
        raw = path.read_bytes()
        assert raw[:4] == b"NLS2"
        assert len(raw) == 4 + 20 + 12 * 12 * 16

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.nls2"
        path.write_bytes(b"XXXX" + b"\0" * 40)
        with pytest.raises(ValueError, match="magic"):
            load_spectrum(path)

    def test_csv_roundtrip(self, tmp_path):
        from nlslab.grid import spectrum_from_csv

        g = Grid2D(12)
        spec = random_spectrum(g, seed=2)
        path = tmp_path / "s.csv"
        spectrum_to_csv(path, spec)
        back = spectrum_from_csv(path, g)
        assert np.allclose(back.coeffs, spec.coeffs, atol=0, rtol=0)
