"""Run configurations and report serialization."""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .profiles import Profile, profile_from_dict

__all__ = [
    "Command",
    "RunConfig",
    "load_config",
    "format_float",
    "dumps",
    "write_atomic",
    "resolve_output",
    "parse_profile",
    "OUTPUT_DIR_ENV",
]

OUTPUT_DIR_ENV = "WARPBAND_OUTPUT_DIR"


class Command(str, Enum):
    MODEL = "model"
    SPECTRUM = "spectrum"
    VERIFY = "verify"
    CONE = "cone"
    CHECK_BAND = "check-band"


@dataclass
class RunConfig:
    """A command, its parameters, an optional output path and tolerances."""

    command: Command
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        try:
            self.command = Command(self.command)
        except ValueError:
            raise ConfigError(f"unknown command {self.command!r}") from None
        if not isinstance(self.parameters, dict):
            raise ConfigError("parameters must be a mapping")
        for prof in _profiles_in(self.parameters):
            parse_profile(prof)
        for k, v in self.tolerances.items():
            if isinstance(v, bool) or not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"tolerance {k!r} must be a positive number, got {v!r}")

    def tolerance(self, name="default", fallback=1e-8):
        return float(self.tolerances.get(name, self.tolerances.get("default", fallback)))

    def to_dict(self):
        return {"command": self.command.value, "parameters": self.parameters,
                "output_path": self.output_path, "tolerances": self.tolerances}

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "command" not in d:
            raise ConfigError("config must be an object with a 'command' field")
        unknown = set(d) - {"command", "parameters", "output_path", "tolerances"}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(d["command"], dict(d.get("parameters") or {}), d.get("output_path"),
                   dict(d.get("tolerances") or {}))

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return RunConfig.from_json(text)


def parse_profile(d) -> Profile:
    try:
        return profile_from_dict(d)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"malformed profile {d!r}: {exc}") from exc


def _profiles_in(obj):
    """Every nested mapping carrying a ``family`` key."""
    if isinstance(obj, dict):
        if "family" in obj:
            yield obj
            return
        for v in obj.values():
            yield from _profiles_in(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _profiles_in(v)


def format_float(x) -> str:
    """17 significant digits; non-finite values as ``nan``/``inf``/``-inf``."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _enc(obj):
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "null"
        if math.isinf(x):
            return json.dumps("inf" if x > 0 else "-inf")
        return format_float(x)
    if isinstance(obj, Enum):
        return json.dumps(obj.value)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_enc(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_enc(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _enc(obj)


def resolve_output(path, default_name):
    """Place ``path`` (or ``default_name``) under the output-directory override.

    Returns ``None`` (meaning stdout) when neither a path nor the
    environment override is given.
    """
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if path is None and out_dir is None:
        return None
    p = Path(path if path is not None else default_name)
    if out_dir is not None and not p.is_absolute():
        p = Path(out_dir) / p
    return p


def write_atomic(path, text):
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc
