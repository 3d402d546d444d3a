"""
Settings loader for brownsim
Reads config/settings.json, applies environment overrides, falls back to defaults
"""

import json
import logging
import os
from pathlib import Path
from typing import Dict, Optional

CONFIG_DIR = Path(__file__).resolve().parents[2] / "config"
SETTINGS_FILE = CONFIG_DIR / "settings.json"
TABLES_FILE = CONFIG_DIR / "printed_tables.json"

TOLERANCE_ENV = "BROWNSIM_TOLERANCE"
LOG_DIR_ENV = "BROWNSIM_LOG_DIR"

# The logger itself reads settings, so warnings here bypass SimLogger
_log = logging.getLogger("brownsim.main")

_settings: Optional[Dict] = None


def _get_default_settings() -> Dict:
    """Return default settings"""
    return {
        "tolerance": 1e-10,
        "log_dir": "logs",
        "console_level": "WARNING",
        "default_seed": 0,
        "batch_workers": 0,
    }


def _load_settings_file(path: Path) -> Dict:
    """Load settings from file, keeping defaults for anything missing or invalid"""
    settings = _get_default_settings()

    try:
        if path.exists():
            with open(path, 'r', encoding='utf-8') as f:
                loaded = json.load(f)
            if not isinstance(loaded, dict):
                raise ValueError("settings file must contain a JSON object")
            for key, value in loaded.items():
                if key in settings:
                    settings[key] = value
                else:
                    _log.warning(f"Ignoring unknown setting '{key}' in {path}")
        else:
            _log.warning(f"Settings file not found at {path}, using defaults")

    except Exception as e:
        _log.warning(f"Failed to load settings from {path}, using defaults | Exception: {e}")
        settings = _get_default_settings()

    return settings


def parse_tolerance(raw) -> float:
    """Parse and validate a tolerance value"""
    value = float(raw)
    if not value > 0:
        raise ValueError(f"tolerance must be positive, got {raw!r}")
    return value


def load_settings(path: Optional[Path] = None) -> Dict:
    """Load settings with precedence: environment > settings file > defaults"""
    settings = _load_settings_file(path or SETTINGS_FILE)

    env_tolerance = os.environ.get(TOLERANCE_ENV)
    if env_tolerance:
        try:
            settings["tolerance"] = parse_tolerance(env_tolerance)
        except ValueError as e:
            _log.warning(f"Ignoring {TOLERANCE_ENV}={env_tolerance!r}: {e}")

    env_log_dir = os.environ.get(LOG_DIR_ENV)
    if env_log_dir:
        settings["log_dir"] = env_log_dir

    try:
        settings["tolerance"] = parse_tolerance(settings["tolerance"])
    except (TypeError, ValueError) as e:
        _log.warning(f"Invalid tolerance in settings, using default | Exception: {e}")
        settings["tolerance"] = _get_default_settings()["tolerance"]
    return settings


def get_settings() -> Dict:
    """Get the cached settings, loading them on first use"""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings():
    """Drop cached settings so the next get_settings() re-reads file and environment"""
    global _settings
    _settings = None
