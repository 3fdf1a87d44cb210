"""Tests for configuration loading, logging setup and the resource guards"""
import io
import logging
from fractions import Fraction

import pytest
from pydantic import ValidationError

from ovlf.config import Config, get_config, parse_fraction, set_config
from ovlf.errors import LimitExceeded, OvlfError, SpecSyntaxError
from ovlf.logging_setup import setup_logging
from ovlf.performance import (
    PerformanceMetrics, check_symbol_budget, metrics, performance_tracker, resource_monitor,
)


class TestParseFraction:
    @pytest.mark.parametrize("text,expected", [
        ("1/100", Fraction(1, 100)),
        ("0.01", Fraction(1, 100)),
        (" 1/2 ", Fraction(1, 2)),
        (3, Fraction(3)),
        (0.25, Fraction(1, 4)),
        (Fraction(2, 3), Fraction(2, 3)),
    ])
    def test_values(self, text, expected):
        assert parse_fraction(text) == expected

    @pytest.mark.parametrize("bad", ["abc", "1/0", ""])
    def test_bad_values(self, bad):
        with pytest.raises(SpecSyntaxError):
            parse_fraction(bad)


class TestConfig:
    def test_defaults(self):
        cfg = Config()
        assert cfg.memory_cap_symbols == 1 << 28
        assert cfg.depth_cap == 24
        assert cfg.tail_fraction == Fraction(1, 2)
        assert cfg.tolerance == Fraction(1, 100)

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("OVLF_TOL", "1/50")
        monkeypatch.setenv("OVLF_DEPTH_CAP", "12")
        monkeypatch.setenv("OVLF_OUTPUT_FORMAT", "tsv")
        cfg = Config.from_env()
        assert cfg.tolerance == Fraction(1, 50)
        assert cfg.depth_cap == 12
        assert cfg.output_format == "tsv"

    def test_explicit_overrides_win(self, monkeypatch):
        monkeypatch.setenv("OVLF_JOBS", "4")
        cfg = Config.from_env({'jobs': 2, 'tolerance': None})
        assert cfg.jobs == 2
        assert cfg.tolerance == Fraction(1, 100)

    @pytest.mark.parametrize("field,value", [
        ("tail_fraction", "1"),
        ("tail_fraction", "0"),
        ("tolerance", "-1/10"),
        ("depth_cap", 0),
        ("output_format", "xml"),
        ("tolerance", "abc"),
    ])
    def test_validation(self, field, value):
        with pytest.raises(ValidationError):
            Config(**{field: value})

    def test_assignment_is_validated(self, config):
        with pytest.raises(ValidationError):
            config.jobs = -1

    def test_global_config(self, config):
        assert get_config() is config
        other = Config(depth_cap=3)
        set_config(other)
        assert get_config().depth_cap == 3


class TestErrors:
    def test_hierarchy(self):
        assert issubclass(LimitExceeded, OvlfError)
        assert issubclass(OvlfError, ValueError)

    def test_limit_message(self):
        err = LimitExceeded("t_n", 31, 30)
        assert (err.what, err.requested, err.cap) == ("t_n", 31, 30)
        assert "exceeds cap 30" in str(err)


class TestPerformance:
    def test_symbol_budget(self, config):
        config.memory_cap_symbols = 10
        check_symbol_budget(10, "ok")
        with pytest.raises(LimitExceeded):
            check_symbol_budget(11, "too much")

    def test_tracker_records_latency(self):
        @performance_tracker("test.component")
        def work(x):
            return x * 2

        assert work(21) == 42
        assert "test.component" in metrics.get_stats()['latencies']
        assert metrics.last("test.component") >= 0

    def test_tracker_counts_errors(self):
        before = metrics.error_count

        @performance_tracker("test.failing")
        def fail():
            raise ValueError("boom")

        with pytest.raises(ValueError):
            fail()
        assert metrics.error_count == before + 1
        assert PerformanceMetrics().last("missing") == 0.0

    def test_percentiles(self):
        local = PerformanceMetrics(window_size=10)
        for value in range(1, 11):
            local.record_latency("c", float(value))
        stats = local.get_stats()['latencies']['c']
        assert stats['min'] == 1.0
        assert stats['max'] == 10.0
        assert stats['p50'] == pytest.approx(5.5)
        assert stats['p95'] == pytest.approx(9.55)
        assert stats['calls'] == 10

    def test_resource_snapshot(self):
        snapshot = resource_monitor.snapshot()
        assert snapshot['memory_available_mb'] > 0
        assert snapshot['process_memory_mb'] > 0


class TestLogging:
    def test_logs_go_to_given_stream(self):
        stream = io.StringIO()
        setup_logging("INFO", stream)
        logging.getLogger("ovlf.test").info("hello from the test")
        assert "hello from the test" in stream.getvalue()
