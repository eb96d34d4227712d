"""Layered run configuration: command-line flags > TOML config file > built-in defaults.

The config file is flat `key = value` TOML whose keys mirror the flag names
(dashes or underscores). Anything the command does not know is rejected.
"""

from __future__ import annotations

import logging
import math
import os
from pathlib import Path
from typing import Dict, Mapping, Optional

try:
    import tomllib
except ImportError as e:
    raise ImportError("corrwitness needs Python 3.11 or newer (standard-library tomllib)") from e

from . import dephasing, spinstar
from .errors import UsageError
from .sim import DEFAULT_SAMPLES, INCREASE_TOLERANCE, LAMBDA_POINTS, TIME_POINTS

logger = logging.getLogger(__name__)

THREADS_ENV = "CORRWITNESS_THREADS"
LOG_LEVEL_ENV = "CORRWITNESS_LOG_LEVEL"
DEFAULT_LOG_LEVEL = "WARNING"

JS_LOG_BASES = {"bits": 2.0, "natural": math.e}

_PHYSICAL = {
    "epsilon": dephasing.EPSILON,
    "omega": dephasing.OMEGA,
    "g0": dephasing.G0,
    "z_re": dephasing.Z.real,
    "z_im": dephasing.Z.imag,
}

_AMPLITUDES = {
    "b1_re": None,
    "b1_im": None,
    "b2_re": None,
    "b2_im": None,
    "equal_weights": False,
}

_SPIN_STAR = {
    "n_bath": spinstar.N_BATH,
    "a0": spinstar.A0,
}

_OUTPUT = {
    "seed": 0,
    "out": "-",
}

COMMAND_DEFAULTS: Dict[str, Dict[str, object]] = {
    "timetrace": {
        **_OUTPUT,
        **_PHYSICAL,
        **_AMPLITUDES,
        **_SPIN_STAR,
        "model": "dephasing",
        "family": "original",
        "lambdas": "0.1",
        "time_points": TIME_POINTS,
        "t_max": None,
        "js_log": "bits",
    },
    "frequency": {
        **_OUTPUT,
        **_PHYSICAL,
        "family": "original",
        "samples": DEFAULT_SAMPLES,
        "lambda_points": LAMBDA_POINTS,
        "time_points": TIME_POINTS,
        "tolerance": INCREASE_TOLERANCE,
        "threads": None,
        "js_log": "bits",
    },
    "concurrence": {
        **_OUTPUT,
        **_PHYSICAL,
        **_AMPLITUDES,
        "family": "original",
        "lambda_points": LAMBDA_POINTS,
        "time_points": TIME_POINTS,
        "tolerance": INCREASE_TOLERANCE,
    },
    "spinstar": {
        **_OUTPUT,
        **_SPIN_STAR,
        "family": "haar",
        "samples": DEFAULT_SAMPLES,
        "lambda_points": LAMBDA_POINTS,
        "time_points": TIME_POINTS,
        "t_max": None,
        "tolerance": INCREASE_TOLERANCE,
        "threads": None,
        "js_log": "bits",
    },
    "verify": {
        **_OUTPUT,
        **_PHYSICAL,
        "suite": "all",
        "quick": False,
    },
}


def _key(name: str) -> str:
    return name.strip().replace("-", "_")


def load_config_file(path) -> Dict[str, object]:
    path = Path(path)
    try:
        with path.open("rb") as f:
            raw = tomllib.load(f)
    except FileNotFoundError as e:
        raise UsageError(f"config file {path} not found") from e
    except tomllib.TOMLDecodeError as e:
        raise UsageError(f"config file {path} is not valid TOML: {e}") from e
    out = {}
    for name, value in raw.items():
        if isinstance(value, (dict, list)):
            raise UsageError(f"config file {path}: key {name!r} must be a plain value, not a table or array")
        out[_key(name)] = value
    logger.debug("loaded %d keys from %s", len(out), path)
    return out


def resolve(command: str, flags: Mapping[str, object], file_values: Optional[Mapping[str, object]] = None) -> Dict[str, object]:
    """Materialize every setting of `command`; flags left at None fall through to the file, then defaults."""
    if command not in COMMAND_DEFAULTS:
        raise UsageError(f"unknown command {command!r}")
    defaults = COMMAND_DEFAULTS[command]
    resolved = dict(defaults)
    for name, value in (file_values or {}).items():
        if name not in defaults:
            raise UsageError(f"config key {name!r} does not apply to '{command}'")
        resolved[name] = value
    for name, value in flags.items():
        if name in defaults and value is not None:
            resolved[name] = value
    return resolved


def resolve_threads(requested: Optional[int] = None) -> int:
    if requested is None:
        env = os.environ.get(THREADS_ENV)
        if env is None:
            return os.cpu_count() or 1
        try:
            requested = int(env)
        except ValueError as e:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from e
    if int(requested) < 1:
        raise UsageError(f"thread count must be at least 1, got {requested}")
    return int(requested)


def default_log_level() -> str:
    return os.environ.get(LOG_LEVEL_ENV, DEFAULT_LOG_LEVEL).upper()


def js_log_base(name: str) -> float:
    try:
        return JS_LOG_BASES[name]
    except KeyError:
        raise UsageError(f"--js-log must be one of {sorted(JS_LOG_BASES)}, got {name!r}") from None
