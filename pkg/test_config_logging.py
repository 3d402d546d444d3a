#!/usr/bin/env python3
"""
Tests for settings loading, logging and measurement draw sources
"""

import json
import sys
from pathlib import Path

import pytest

# Add src directory to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.utils import config
from src.utils.config import LOG_DIR_ENV, TOLERANCE_ENV, load_settings, parse_tolerance
from src.utils.draws import DrawSource, parse_complex_list, parse_draws
from src.utils.logger import SimLogger


def _clear_env(monkeypatch):
    monkeypatch.delenv(TOLERANCE_ENV, raising=False)
    monkeypatch.delenv(LOG_DIR_ENV, raising=False)


def test_defaults_when_file_missing(tmp_path, monkeypatch):
    _clear_env(monkeypatch)
    settings = load_settings(tmp_path / "missing.json")
    assert settings["tolerance"] == 1e-10
    assert settings["log_dir"] == "logs"
    assert settings["batch_workers"] == 0
    print("✓ missing settings file falls back to defaults")


def test_file_values_and_unknown_keys(tmp_path, monkeypatch):
    _clear_env(monkeypatch)
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"tolerance": 1e-6, "default_seed": 11, "theme": "dark"}), encoding="utf-8")
    settings = load_settings(path)
    assert settings["tolerance"] == 1e-6
    assert settings["default_seed"] == 11
    assert "theme" not in settings

    path.write_text(json.dumps({"tolerance": 0}), encoding="utf-8")
    assert load_settings(path)["tolerance"] == 1e-10
    path.write_text("[1, 2]", encoding="utf-8")
    assert load_settings(path)["default_seed"] == 0
    print("✓ settings file values apply; bad values fall back")


def test_environment_overrides_file(tmp_path, monkeypatch):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"tolerance": 1e-6}), encoding="utf-8")
    monkeypatch.setenv(TOLERANCE_ENV, "1e-8")
    monkeypatch.setenv(LOG_DIR_ENV, str(tmp_path / "logs"))
    settings = load_settings(path)
    assert settings["tolerance"] == 1e-8
    assert settings["log_dir"] == str(tmp_path / "logs")

    monkeypatch.setenv(TOLERANCE_ENV, "-1")
    assert load_settings(path)["tolerance"] == 1e-6
    print("✓ environment beats the settings file; invalid overrides are ignored")


def test_cached_settings_reset(monkeypatch):
    _clear_env(monkeypatch)
    config.reset_settings()
    first = config.get_settings()
    assert config.get_settings() is first
    monkeypatch.setenv(TOLERANCE_ENV, "1e-7")
    config.reset_settings()
    assert config.get_settings()["tolerance"] == 1e-7
    monkeypatch.delenv(TOLERANCE_ENV)
    config.reset_settings()
    print("✓ reset_settings re-reads the environment")


def test_parse_tolerance():
    assert parse_tolerance("1e-9") == 1e-9
    for bad in ("0", "-1e-3", "nan"):
        with pytest.raises(ValueError):
            parse_tolerance(bad)
    print("✓ tolerances must be positive")


def test_logger_writes_category_files(tmp_path):
    logger = SimLogger(str(tmp_path), "CRITICAL")
    logger.info("main entry")
    logger.log_check("ub_unitary", "PASS")
    logger.log_protocol_event("teleport1", "measure", "a1+")
    logger.error("broken", ValueError("bad draw"))
    assert "main entry" in (tmp_path / "brownsim.log").read_text(encoding="utf-8")
    assert "CHECK: ub_unitary | Status: PASS" in (tmp_path / "oracle.log").read_text(encoding="utf-8")
    assert "PROTOCOL TELEPORT1: measure | a1+" in (tmp_path / "protocols.log").read_text(encoding="utf-8")
    assert "ValueError: bad draw" in (tmp_path / "errors.log").read_text(encoding="utf-8")
    print("✓ each category writes its own log file")


def test_logger_follows_new_directory(tmp_path):
    SimLogger(str(tmp_path / "first"), "CRITICAL")
    second = SimLogger(str(tmp_path / "second"), "CRITICAL")
    second.info("second only")
    assert "second only" in (tmp_path / "second" / "brownsim.log").read_text(encoding="utf-8")
    assert "second only" not in (tmp_path / "first" / "brownsim.log").read_text(encoding="utf-8")
    print("✓ a new log directory takes over from the old one")


def test_draw_source_modes():
    with pytest.raises(ValueError):
        DrawSource(seed=1, draws=[0.5])
    with pytest.raises(ValueError):
        DrawSource(draws=[1.0])
    explicit = DrawSource(draws=[0.25, 0.75])
    assert explicit.take(2) == [0.25, 0.75]
    with pytest.raises(ValueError):
        explicit.next()
    with pytest.raises(ValueError):
        DrawSource(draws=[0.5]).spawn(2)
    print("✓ draw sources take a seed or a list, never both")


def test_spawned_sources_are_deterministic():
    first = [child.take(3) for child in DrawSource(seed=5).spawn(4)]
    second = [child.take(3) for child in DrawSource(seed=5).spawn(4)]
    assert first == second
    assert len({tuple(draws) for draws in first}) == 4
    print("✓ child sources depend only on the parent seed")


def test_parsers():
    assert parse_draws("0.1, 0.75") == [0.1, 0.75]
    for bad in ("", "0.5,1.0", "-0.1"):
        with pytest.raises(ValueError):
            parse_draws(bad)
    assert parse_complex_list(["0.6", [0, 0.8], "1+2i", 3]) == [0.6, 0.8j, 1 + 2j, 3]
    print("✓ draw and amplitude parsing")


def main():
    """Run all configuration and logging tests"""
    print("=" * 60)
    print("Configuration and Logging Tests")
    print("=" * 60)

    import tempfile

    def with_fixtures(test, wants_tmp=True):
        def run():
            with tempfile.TemporaryDirectory() as tmp, pytest.MonkeyPatch.context() as mp:
                args = [Path(tmp)] if wants_tmp else []
                if "monkeypatch" in test.__code__.co_varnames[:test.__code__.co_argcount]:
                    args.append(mp)
                test(*args)
        run.__name__ = test.__name__
        return run

    tests = [
        with_fixtures(test_defaults_when_file_missing),
        with_fixtures(test_file_values_and_unknown_keys),
        with_fixtures(test_environment_overrides_file),
        with_fixtures(test_cached_settings_reset, wants_tmp=False),
        test_parse_tolerance,
        with_fixtures(test_logger_writes_category_files),
        with_fixtures(test_logger_follows_new_directory),
        test_draw_source_modes,
        test_spawned_sources_are_deterministic,
        test_parsers,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"✗ Test {test.__name__} failed: {e}")

    print("\n" + "=" * 60)
    print(f"CONFIG TEST RESULTS: {passed}/{len(tests)} tests passed")
    print("=" * 60)
    return passed == len(tests)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
