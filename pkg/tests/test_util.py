"""Configuration, logging, metrics and output writer tests."""

import json
import logging

import numpy as np
import pytest
from pydantic import ValidationError

from app.config import Settings
from app.util.errors import AccuracyError, DomainError, RangeError, WindowError, exit_code_for
from app.util.logging import JSONFormatter, RunLogger
from app.util.metrics import evaluation_count, track, write_metrics
from app.util.output import dumps_csv, dumps_json, format_float, write_text, sha256_file


class TestSettings:
    """Test environment-driven settings."""

    def test_log_level_normalized(self):
        assert Settings(log_level="debug").log_level == "DEBUG"

    def test_invalid_log_level(self):
        with pytest.raises(ValidationError):
            Settings(log_level="chatty")

    def test_environment_prefix(self, monkeypatch):
        monkeypatch.setenv("FD_THREADS", "4")
        monkeypatch.setenv("FD_QUAD_TOL", "1e-6")
        settings = Settings()
        assert settings.threads == 4
        assert settings.quad_tol == 1e-6

    def test_threads_must_be_positive(self):
        with pytest.raises(ValidationError):
            Settings(threads=0)


class TestErrors:
    """Test the exit codes of the exception hierarchy."""

    def test_exit_codes(self):
        assert exit_code_for(DomainError("x")) == 2
        assert exit_code_for(RangeError("x")) == 2
        assert exit_code_for(AccuracyError("x", estimate=1.0)) == 3
        assert exit_code_for(WindowError("x", boundary=1.0, interior=2.0)) == 3
        assert exit_code_for(RuntimeError("x")) == 1

    def test_domain_errors_are_value_errors(self):
        assert isinstance(DomainError("x"), ValueError)


class TestLogging:
    """Test the JSON formatter and the run context."""

    def test_json_record_with_extras(self):
        record = logging.LogRecord("friedlander.test", logging.INFO, __file__, 1, "hello %s", ("world",), None)
        record.command = "airy-table"
        record.N = 3
        entry = json.loads(JSONFormatter().format(record))
        assert entry["message"] == "hello world"
        assert entry["level"] == "INFO"
        assert entry["command"] == "airy-table"
        assert entry["N"] == 3
        assert entry["timestamp"].endswith("Z")

    def test_run_logger_does_not_swallow(self):
        with pytest.raises(DomainError):
            with RunLogger("modes", "abc"):
                raise DomainError("theta = 0")

    def test_run_logger_keeps_id(self):
        with RunLogger("modes", "abc") as run:
            assert run.run_id == "abc"


class TestMetrics:
    """Test evaluation counters and the textfile dump."""

    def test_track_counts_success_and_failure(self):
        ok = evaluation_count("unit_probe")
        failed = evaluation_count("unit_probe", "DomainError")
        with track("unit_probe"):
            pass
        with pytest.raises(DomainError):
            with track("unit_probe"):
                raise DomainError("bad")
        assert evaluation_count("unit_probe") == ok + 1
        assert evaluation_count("unit_probe", "DomainError") == failed + 1

    def test_write_metrics(self, tmp_path):
        with track("unit_dump"):
            pass
        path = write_metrics(tmp_path, "metrics.prom")
        assert "fd_evaluations_total" in path.read_text()


class TestOutput:
    """Test the deterministic writers."""

    def test_format_float(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(-0.0) == "0"
        assert format_float(float("nan")) == "null"

    def test_dumps_json(self):
        text = dumps_json({"b": np.float64(1.5), "a": [1, 2.0], "z": 1 + 2j, "none": None})
        data = json.loads(text)
        assert list(data) == ["b", "a", "z", "none"]
        assert data["z"] == {"re": 1.0, "im": 2.0}
        assert '"a": [1, 2]' in text

    def test_dumps_csv(self):
        text = dumps_csv(["t", "v"], [[1.0, float("inf")], [2, "x"]])
        assert text == "t,v\n1,\n2,x\n"

    def test_write_text_hash(self, tmp_path):
        path = tmp_path / "nested" / "out.txt"
        digest = write_text(path, "abc\n")
        assert digest == sha256_file(path)
