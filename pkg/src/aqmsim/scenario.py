"""Scenario files: parsing, validation, defaults, and round-trip serialization.

A scenario is a flat TOML file of key = value pairs.  Unknown keys are
rejected with a nearest-key suggestion so typos cannot silently fall back
to defaults.  Parameters irrelevant to the chosen controller are still
validated for type and range, then ignored by the simulator.
"""

from __future__ import annotations

import dataclasses
import difflib
from dataclasses import dataclass
from pathlib import Path

import tomli

__all__ = [
    "ScenarioConfig",
    "SweepSpec",
    "ScenarioError",
    "parse_scenario",
    "parse_scenario_text",
    "parse_sweep",
    "serialize_scenario",
    "CONTROLLERS",
    "MARKINGS",
]

CONTROLLERS = (
    "pi_fixed",
    "pi2_fixed",
    "curvy_pi2",
    "convex_red",
    "codel_fixed",
    "codel_soft",
    "none",
)
MARKINGS = ("drop", "classic_ecn_mark")


class ScenarioError(ValueError):
    """Scenario file failed validation; the message names the offending key."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully validated simulation scenario."""

    controller: str
    name: str = "scenario"
    marking: str = "drop"
    link_rate_bps: float = 1e8  # bits/second
    rtt_base_s: float = 0.1
    n_flows: int = 10
    duration_s: float = 60.0
    # PI family gains; alpha/beta are applied per update (units 1/s)
    alpha: float = 0.25
    beta: float = 2.5
    period_s: float = 0.016
    # delay-target curve (q0 also serves as the CoDel base target)
    q0_s: float = 0.01
    q1_s: float = 0.09
    # CoDel parameters
    interval_s: float = 0.1
    span_s: float = 0.09
    window_s: float = 1.0
    # convex-RED parameters
    q_max_s: float = 0.1
    exponent: float = 2.0
    # queue and flow plumbing
    capacity_bytes: int = 0  # 0 means the 4x bandwidth-delay-product default
    mss_bytes: int = 1500
    ecn_capable: bool = True
    warmup_s: float = 10.0
    seed: int = 1

    @property
    def link_rate_bytes(self) -> float:
        return self.link_rate_bps / 8.0

    @property
    def capacity(self) -> int:
        """Hard tail-drop limit; defaults to 4x the bandwidth-delay product."""
        if self.capacity_bytes > 0:
            return self.capacity_bytes
        return int(4.0 * self.link_rate_bytes * self.rtt_base_s)


@dataclass(frozen=True)
class SweepSpec:
    """A one-axis experiment sweep over a base scenario."""

    base: ScenarioConfig
    axis: str
    values: tuple
    repeats: int = 1


_TYPE_NAMES = {"str": str, "int": int, "float": float, "bool": bool}
# field name -> python type (annotations are strings under postponed evaluation)
_FIELDS = {f.name: _TYPE_NAMES[f.type] for f in dataclasses.fields(ScenarioConfig)}

_POSITIVE_KEYS = {
    "link_rate_bps",
    "rtt_base_s",
    "duration_s",
    "alpha",
    "beta",
    "period_s",
    "q0_s",
    "interval_s",
    "window_s",
    "q_max_s",
    "mss_bytes",
}
_NONNEGATIVE_KEYS = {"q1_s", "span_s", "warmup_s", "capacity_bytes", "n_flows", "seed"}


def _coerce(key: str, value, target_type: type):
    if target_type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if target_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioError(f"{key}: expected an integer, got {value!r}")
        return value
    if target_type is bool:
        if not isinstance(value, bool):
            raise ScenarioError(f"{key}: expected a boolean, got {value!r}")
        return value
    if target_type is str:
        if not isinstance(value, str):
            raise ScenarioError(f"{key}: expected a string, got {value!r}")
        return value
    raise AssertionError(f"unhandled field type for {key}")


def _validate_values(cfg: ScenarioConfig) -> None:
    for key in _POSITIVE_KEYS:
        if not (getattr(cfg, key) > 0):
            raise ScenarioError(f"{key}: must be > 0, got {getattr(cfg, key)}")
    for key in _NONNEGATIVE_KEYS:
        if getattr(cfg, key) < 0:
            raise ScenarioError(f"{key}: must be >= 0, got {getattr(cfg, key)}")
    if cfg.controller not in CONTROLLERS:
        raise ScenarioError(
            f"controller: unknown value {cfg.controller!r}; expected one of {', '.join(CONTROLLERS)}"
        )
    if cfg.marking not in MARKINGS:
        raise ScenarioError(
            f"marking: unknown value {cfg.marking!r}; expected one of {', '.join(MARKINGS)}"
        )
    if cfg.exponent < 1.0:
        raise ScenarioError(f"exponent: must be >= 1, got {cfg.exponent}")
    if cfg.capacity_bytes and cfg.capacity_bytes < cfg.mss_bytes:
        raise ScenarioError(
            f"capacity_bytes: must hold at least one packet ({cfg.mss_bytes} B), got {cfg.capacity_bytes}"
        )


def _build_config(raw: dict, source: str) -> ScenarioConfig:
    values = {}
    for key, value in raw.items():
        if key not in _FIELDS:
            hint = difflib.get_close_matches(key, _FIELDS, n=1)
            suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
            raise ScenarioError(f"{source}: unknown key {key!r}{suggestion}")
        values[key] = _coerce(key, value, _FIELDS[key])
    if "controller" not in values:
        raise ScenarioError(f"{source}: missing required key 'controller'")
    cfg = ScenarioConfig(**values)
    _validate_values(cfg)
    return cfg


def parse_scenario_text(text: str, source: str = "<string>", name: str | None = None) -> ScenarioConfig:
    """Parse and validate a scenario from TOML text."""
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"{source}: not valid TOML: {exc}") from exc
    if name is not None and "name" not in raw:
        raw["name"] = name
    return _build_config(raw, source)


def parse_scenario(path: str | Path) -> ScenarioConfig:
    """Parse and validate a scenario file; the file stem is the default name."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    return parse_scenario_text(path.read_text(), source=str(path), name=path.stem)


def _format_toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {value!r}")


def serialize_scenario(cfg: ScenarioConfig) -> str:
    """Render a config back to flat TOML; reparsing yields an identical config."""
    lines = []
    for f in dataclasses.fields(ScenarioConfig):
        lines.append(f"{f.name} = {_format_toml_value(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def parse_sweep(path: str | Path) -> SweepSpec:
    """Parse a sweep spec: top-level axis/values/repeats plus a [base] table."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"sweep file not found: {path}")
    try:
        raw = tomli.loads(path.read_text())
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: not valid TOML: {exc}") from exc

    for key in list(raw):
        if key not in ("axis", "values", "repeats", "base"):
            hint = difflib.get_close_matches(key, ["axis", "values", "repeats", "base"], n=1)
            suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
            raise ScenarioError(f"{path}: unknown key {key!r}{suggestion}")
    if "base" not in raw or not isinstance(raw["base"], dict):
        raise ScenarioError(f"{path}: missing [base] scenario table")
    if "axis" not in raw or not isinstance(raw["axis"], str):
        raise ScenarioError(f"{path}: missing required key 'axis'")
    axis = raw["axis"]
    if axis not in _FIELDS or axis in ("name", "controller", "marking"):
        raise ScenarioError(f"{path}: axis: cannot sweep key {axis!r}")
    values = raw.get("values")
    if not isinstance(values, list) or not values:
        raise ScenarioError(f"{path}: values: must be a nonempty list")
    repeats = raw.get("repeats", 1)
    if not isinstance(repeats, int) or isinstance(repeats, bool) or repeats < 1:
        raise ScenarioError(f"{path}: repeats: must be an integer >= 1, got {repeats!r}")

    base = _build_config(raw["base"], f"{path}:[base]")
    if "name" not in raw["base"]:
        base = dataclasses.replace(base, name=path.stem)
    # validate every axis value by instantiating the point configs now
    points = []
    for v in values:
        coerced = _coerce(f"values[{axis}]", v, _FIELDS[axis])
        point = dataclasses.replace(base, **{axis: coerced})
        _validate_values(point)
        points.append(coerced)
    return SweepSpec(base=base, axis=axis, values=tuple(points), repeats=repeats)
