"""Command-line tests."""

import json
import math

import pytest

from app.cli import MANIFEST_SUFFIX, build_parser, dispatch, run_id_for
from app.config import settings
from app.util.output import sha256_file


def manifest_of(path):
    return json.loads(path.with_name(path.name + MANIFEST_SUFFIX).read_text())


class TestTables:
    """Test the table commands."""

    def test_airy_table(self, tmp_path):
        """airy-table --count 8 reports w_8 and a manifest with the output hash."""
        out = tmp_path / "zeros.json"
        assert dispatch(["airy-table", "--count", "8", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["count"] == 8
        assert data["zeros"][7]["k"] == 8
        assert data["zeros"][7]["omega_k"] == pytest.approx(11.0085243037, abs=1e-9)

        manifest = manifest_of(out)
        assert manifest["run"]["command"] == "airy-table"
        assert manifest["outputs"][0]["sha256"] == sha256_file(out)
        assert manifest["run"]["options"] == {"count": 8}
        assert (tmp_path / settings.metrics_file_name).exists()

    def test_modes_samples(self, tmp_path):
        """--points switches the output to a CSV of samples."""
        out = tmp_path / "mode.csv"
        assert dispatch(["modes", "--k", "2", "--theta", "1.0", "--points", "11", "--x-max", "5", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,e_k"
        assert len(lines) == 12
        assert lines[1].startswith("0,")

    def test_modes_grid_flag(self, tmp_path):
        """--grid is the documented name of the sample count."""
        out = tmp_path / "mode.csv"
        assert dispatch(["modes", "--k", "1", "--theta", "2.0", "--grid", "6", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,e_k"
        assert len(lines) == 7

    def test_modes_summary(self, tmp_path):
        out = tmp_path / "mode.json"
        assert dispatch(["modes", "--k", "3", "--theta", "2.0", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["interior_zeros"] == 2
        assert data["norm_squared"] == pytest.approx(1.0, abs=1e-8)


class TestFieldCommands:
    """Test pointwise evaluations and model integrals."""

    def test_green_eval(self, tmp_path):
        out = tmp_path / "green.json"
        argv = ["green-eval", "--h", "0.03125", "--a", "0.5", "--gamma", "0.5", "--t", "1.5", "--y", "-0.4", "--out", str(out)]
        assert dispatch(argv) == 0
        data = json.loads(out.read_text())
        assert data["representation"] == "spectral"
        assert data["lambda_gamma"] == pytest.approx(0.5 ** 1.5 / 0.03125)
        assert data["mode_count"] > 0
        assert math.isfinite(data["value_re"])

    def test_model_integral(self, tmp_path):
        """The degenerate slope is used when --z is omitted."""
        out = tmp_path / "model.csv"
        assert dispatch(["model-integral", "--t-list", "100,1000", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,abs_value"
        assert len(lines) == 3
        assert float(lines[2].split(",")[1]) < float(lines[1].split(",")[1])


class TestReflectionCommands:
    """Test the Poisson check and overlap count commands."""

    def test_poisson_check(self, tmp_path):
        out = tmp_path / "poisson.json"
        argv = ["poisson-check", "--bump-center", "2.3381074105", "--bump-width", "0.3", "--nmax", "400", "--out", str(out)]
        assert dispatch(argv) == 0
        data = json.loads(out.read_text())
        assert data["relerr"] <= 1e-3
        assert data["testfn_sup"] == pytest.approx(1.0)

    def test_overlap_count(self, tmp_path):
        out = tmp_path / "overlap.json"
        assert dispatch(["overlap-count", "--t", "1.0", "--gamma", "0.25", "--h", "0.0078125", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert set(data["members"]) <= {-1, 0, 1}
        assert data["count"] == len(data["members"])
        assert data["y"] == pytest.approx(-math.sqrt(1.25))


class TestScanCommands:
    """Test the decay fit of a written curve."""

    def test_decay_fit_synthetic_curve(self, tmp_path):
        """A t^{-1/2} CSV fits exponent 1/2."""
        curve = tmp_path / "curve.csv"
        rows = ["t,sup,argmax_x,argmax_y"]
        for i in range(8):
            t = 10.0 * 2.0 ** i
            rows.append(f"{t},{3.0 * t ** -0.5},0.25,{-t}")
        curve.write_text("\n".join(rows) + "\n")
        out = tmp_path / "fit.json"
        assert dispatch(["decay-fit", "--in", str(curve), "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["exponent"] == pytest.approx(0.5)
        assert data["constant"] == pytest.approx(3.0)
        assert data["samples"] == 8

    def test_decay_fit_missing_input(self, tmp_path):
        assert dispatch(["decay-fit", "--in", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "fit.json")]) == 2


class TestExitCodes:
    """Test exit statuses of failing invocations."""

    def test_unknown_flag(self, tmp_path):
        assert dispatch(["airy-table", "--count", "3", "--bogus", "--out", str(tmp_path / "x.json")]) == 2

    def test_missing_command(self):
        assert dispatch([]) == 2

    def test_help(self, capsys):
        assert dispatch(["--help"]) == 0
        assert "airy-table" in capsys.readouterr().out

    def test_domain_error(self, tmp_path):
        """theta = 0 is outside the domain of the modes."""
        assert dispatch(["modes", "--k", "1", "--theta", "0", "--out", str(tmp_path / "m.json")]) == 2

    def test_invalid_count(self, tmp_path):
        assert dispatch(["airy-table", "--count", "0", "--out", str(tmp_path / "z.json")]) == 2

    def test_validation_error(self, tmp_path):
        """h > 1/2 is rejected by the query model."""
        assert dispatch(["green-eval", "--h", "2", "--t", "1", "--out", str(tmp_path / "g.json")]) == 2

    def test_missing_manifest(self, tmp_path):
        assert dispatch(["--from-manifest", str(tmp_path / "none.manifest.json")]) == 2


class TestReproducibility:
    """Test byte-identical reruns and manifest replay."""

    def test_rerun_is_byte_identical(self, tmp_path):
        out = tmp_path / "zeros.json"
        argv = ["airy-table", "--count", "5", "--out", str(out)]
        assert dispatch(argv) == 0
        first = (out.read_bytes(), out.with_name(out.name + MANIFEST_SUFFIX).read_bytes())
        assert dispatch(argv) == 0
        second = (out.read_bytes(), out.with_name(out.name + MANIFEST_SUFFIX).read_bytes())
        assert first == second

    def test_replay_from_manifest(self, tmp_path):
        """--from-manifest reproduces the recorded run into a new file."""
        original = tmp_path / "a.json"
        assert dispatch(["modes", "--k", "2", "--theta", "1.5", "--out", str(original)]) == 0
        replay = tmp_path / "b.json"
        manifest = original.with_name(original.name + MANIFEST_SUFFIX)
        assert dispatch(["--from-manifest", str(manifest), "--out", str(replay)]) == 0
        assert replay.read_bytes() == original.read_bytes()

    def test_replay_keeps_explicit_quad_tol(self, tmp_path):
        """--quad-tol given on replay overrides the recorded tolerance."""
        original = tmp_path / "a.json"
        assert dispatch(["airy-table", "--count", "3", "--quad-tol", "1e-7", "--out", str(original)]) == 0
        assert manifest_of(original)["run"]["tolerances"]["quad_tol"] == pytest.approx(1e-7)
        manifest = original.with_name(original.name + MANIFEST_SUFFIX)
        replay = tmp_path / "b.json"
        assert dispatch(["--from-manifest", str(manifest), "--quad-tol", "1e-9", "--out", str(replay)]) == 0
        assert manifest_of(replay)["run"]["tolerances"]["quad_tol"] == pytest.approx(1e-9)
        recorded = tmp_path / "c.json"
        assert dispatch(["--from-manifest", str(manifest), "--out", str(recorded)]) == 0
        assert manifest_of(recorded)["run"]["tolerances"]["quad_tol"] == pytest.approx(1e-7)

    def test_global_options_after_command(self, tmp_path):
        """--threads is accepted after the subcommand and restored afterwards."""
        before = settings.threads
        out = tmp_path / "zeros.json"
        assert dispatch(["airy-table", "--count", "2", "--threads", "3", "--log-level", "warning", "--out", str(out)]) == 0
        assert manifest_of(out)["run"]["threads"] == 3
        assert settings.threads == before

    def test_run_id_is_stable(self):
        assert run_id_for(["airy-table", "--count", "3"]) == run_id_for(["airy-table", "--count", "3"])
        assert run_id_for(["airy-table", "--count", "3"]) != run_id_for(["airy-table", "--count", "4"])

    def test_parser_lists_every_command(self):
        parser = build_parser()
        commands = parser._subparsers._group_actions[0].choices
        assert set(commands) == {
            "airy-table",
            "modes",
            "green-eval",
            "model-integral",
            "poisson-check",
            "overlap-count",
            "decay-scan",
            "decay-fit",
        }
