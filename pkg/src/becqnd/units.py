"""Unit-suffixed quantity parsing and flat key=value config files.

All frequencies are stored internally as angular frequencies in rad/s.
Frequency-valued entries must therefore be written either as plain numbers
(taken as rad/s) or with an explicit suffix:

    ``13 2pi*MHz``     -> 2*pi*13e6 rad/s
    ``3 omega_R``      -> 3 times the recoil frequency (resolved later)
    ``0.655kappa``     -> 0.655 times the cavity decay rate (resolved later)
    ``1.0e5 rad/s``    -> as written

A bare cyclic unit (``MHz`` without the ``2pi*`` prefix) is rejected: silently
guessing whether a number is cyclic or angular is exactly the 2*pi mistake
this parser exists to prevent.

Lengths accept ``m``/``mm``/``um``/``nm``, masses ``kg``/``u``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .constants import ATOMIC_MASS_KG
from .errors import ConfigError

_NUM_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")

_TWO_PI = 2.0 * math.pi

# suffix -> multiplier for absolute units
_ABSOLUTE = {
    "": 1.0,
    "rad/s": 1.0,
    "2pi*hz": _TWO_PI,
    "2pi*khz": _TWO_PI * 1e3,
    "2pi*mhz": _TWO_PI * 1e6,
    "2pi*ghz": _TWO_PI * 1e9,
    "m": 1.0,
    "mm": 1e-3,
    "um": 1e-6,
    "nm": 1e-9,
    "kg": 1.0,
    "u": ATOMIC_MASS_KG,
}

# suffixes resolved against derived scales
_RELATIVE = ("omega_r", "kappa")

_REJECTED_CYCLIC = {"hz", "khz", "mhz", "ghz"}


@dataclass(frozen=True)
class Quantity:
    """A parsed numeric value with an unresolved unit suffix."""

    value: float
    suffix: str  # normalized, lowercase; "" means already absolute

    @property
    def is_relative(self) -> bool:
        return self.suffix in _RELATIVE

    def resolve(self, omega_R: float | None = None, kappa: float | None = None) -> float:
        if self.suffix in _ABSOLUTE:
            return self.value * _ABSOLUTE[self.suffix]
        if self.suffix == "omega_r":
            if omega_R is None:
                raise ConfigError("suffix 'omega_R' cannot be resolved yet (recoil frequency unknown)")
            return self.value * omega_R
        if self.suffix == "kappa":
            if kappa is None:
                raise ConfigError("suffix 'kappa' cannot be resolved yet (kappa unknown)")
            return self.value * kappa
        raise ConfigError(f"unknown unit suffix {self.suffix!r}")


def parse_quantity(text: str | float | int, key: str = "value") -> Quantity:
    """Parse ``"<number> [suffix]"`` (suffix may be glued, e.g. ``0.655kappa``)."""
    if isinstance(text, (int, float)):
        return Quantity(float(text), "")
    m = _NUM_RE.match(text)
    if not m or not m.group(1):
        raise ConfigError(f"{key}: cannot parse quantity {text!r}")
    value = float(m.group(1))
    suffix = m.group(2).strip().lower()
    if suffix in _REJECTED_CYCLIC:
        raise ConfigError(
            f"{key}: bare cyclic unit {m.group(2)!r} is ambiguous; "
            f"write '2pi*{m.group(2).strip()}' or give the value in rad/s")
    if suffix not in _ABSOLUTE and suffix not in _RELATIVE:
        raise ConfigError(f"{key}: unknown unit suffix {m.group(2)!r}")
    return Quantity(value, suffix)


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment; returns raw strings."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = val
    return out


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
