"""Experiment configuration: defaults, file parsing, overrides, round-trip.

The on-disk format is line-oriented ``key = value`` grouped in
``[section]`` headers.  Every experiment kind starts from its own
default set; files and ``--override section.key=value`` pairs replace
individual values.  Unknown sections or keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

EXPERIMENT_KINDS = ("sweep", "ising2", "xy", "analyze", "crosscheck")
MODEL_VARIANTS = ("tls", "ising", "xydm")
ENGINES = ("collision", "lindblad")
MODES = ("sequential", "simultaneous")


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 2)."""


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = 0
    engines: tuple = ("collision",)
    # model
    variant: str = "tls"
    h_s: float = 1.0
    ising_h: tuple = (0.5, 0.5)
    ising_j: tuple = (1.0,)
    xy_j: float = 1.0
    # schedule
    tau_c_ns: float = 200.0
    tau_p_ns: float = 200.0
    count: int = 50
    g: float = 1e-3
    h_b: float | None = None  # None -> derived from the model's resonance
    modes: tuple = ("sequential",)
    # bath
    temperature_mk: float = 10.0
    # initial states (descriptors)
    initial_states: tuple = ("excited",)
    # sweep grid
    h_b_min: float = 0.25
    h_b_max: float = 1.75
    points: int = 61
    # analysis
    include_zero_frequency: bool = False
    # output
    out_path: str = ""

    def validate(self) -> "ExperimentConfig":
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.variant not in MODEL_VARIANTS:
            raise ConfigError(f"unknown model variant {self.variant!r}")
        for e in self.engines:
            if e not in ENGINES:
                raise ConfigError(f"unknown engine {e!r}")
        for m in self.modes:
            if m not in MODES:
                raise ConfigError(f"unknown mode {m!r}")
        if not (0 < self.tau_c_ns <= self.tau_p_ns):
            raise ConfigError("need 0 < tau_c_ns <= tau_p_ns")
        if self.count < 0:
            raise ConfigError("count must be nonnegative")
        if self.g < 0:
            raise ConfigError("g must be nonnegative")
        if self.temperature_mk <= 0:
            raise ConfigError("temperature_mk must be positive")
        if self.kind == "sweep":
            if not (
                math.isfinite(self.h_b_min)
                and math.isfinite(self.h_b_max)
                and self.h_b_max >= self.h_b_min
            ):
                raise ConfigError("sweep grid bounds must be finite with h_b_max >= h_b_min")
            if self.points < 1:
                raise ConfigError("sweep needs at least one grid point")
            if self.points > 1 and self.h_b_max == self.h_b_min:
                raise ConfigError("degenerate sweep grid with points > 1")
        if not self.initial_states:
            raise ConfigError("need at least one initial state")
        for s in self.initial_states:
            parse_initial_descriptor(s)
        if len(self.ising_h) < 1 or len(self.ising_j) != len(self.ising_h) - 1:
            raise ConfigError("ising couplings must have length len(fields) - 1")
        return self


def parse_initial_descriptor(text: str) -> tuple:
    """Split a descriptor into (name, argument).

    Supported: excited | ground | infinite-temperature | thermal:<mK> |
    basis:<bitstring>.
    """
    t = text.strip()
    if t in ("excited", "ground", "infinite-temperature"):
        return (t, None)
    if t.startswith("thermal:"):
        try:
            temp = float(t.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad thermal descriptor {text!r}") from None
        if temp <= 0:
            raise ConfigError(f"thermal temperature must be positive in {text!r}")
        return ("thermal", temp)
    if t.startswith("basis:"):
        bits = t.split(":", 1)[1]
        if not bits or any(c not in "01" for c in bits):
            raise ConfigError(f"bad basis descriptor {text!r}")
        return ("basis", bits)
    raise ConfigError(f"unknown initial state descriptor {text!r}")


_DEFAULTS = {
    "sweep": ExperimentConfig(kind="sweep"),
    "crosscheck": ExperimentConfig(kind="crosscheck"),
    "ising2": ExperimentConfig(
        kind="ising2",
        variant="ising",
        tau_c_ns=400.0,
        tau_p_ns=400.0,
        count=150,
        modes=("sequential", "simultaneous"),
        initial_states=("infinite-temperature",),
    ),
    "xy": ExperimentConfig(
        kind="xy",
        variant="xydm",
        tau_c_ns=400.0,
        tau_p_ns=400.0,
        count=600,
        engines=("collision", "lindblad"),
        initial_states=("thermal:1000", "thermal:100", "thermal:5", "excited"),
    ),
    "analyze": ExperimentConfig(kind="analyze", variant="xydm", count=1),
}


def default_config(kind: str) -> ExperimentConfig:
    if kind not in _DEFAULTS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    return _DEFAULTS[kind]


# (section, key) -> (field name, parser, serializer)
def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise ConfigError(f"expected comma-separated floats, got {text!r}") from None


def _strings(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip() != "")


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a float, got {text!r}") from None


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _optional_float(text: str):
    t = text.strip()
    return None if t in ("", "none", "derived") else _float(t)


def _fmt(value) -> str:
    if value is None:
        return "derived"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


_SCHEMA = {
    ("experiment", "kind"): ("kind", str),
    ("experiment", "seed"): ("seed", _int),
    ("experiment", "engines"): ("engines", _strings),
    ("model", "variant"): ("variant", str),
    ("model", "h_s"): ("h_s", _float),
    ("model", "h"): ("ising_h", _floats),
    ("model", "j"): ("ising_j", _floats),
    ("model", "xy_j"): ("xy_j", _float),
    ("schedule", "tau_c_ns"): ("tau_c_ns", _float),
    ("schedule", "tau_p_ns"): ("tau_p_ns", _float),
    ("schedule", "count"): ("count", _int),
    ("schedule", "g"): ("g", _float),
    ("schedule", "h_b"): ("h_b", _optional_float),
    ("schedule", "modes"): ("modes", _strings),
    ("bath", "temperature_mk"): ("temperature_mk", _float),
    ("initial", "states"): ("initial_states", _strings),
    ("sweep", "h_b_min"): ("h_b_min", _float),
    ("sweep", "h_b_max"): ("h_b_max", _float),
    ("sweep", "points"): ("points", _int),
    ("analysis", "include_zero_frequency"): ("include_zero_frequency", _bool),
    ("output", "path"): ("out_path", str),
}

_SECTION_ORDER = ("experiment", "model", "schedule", "bath", "initial", "sweep", "analysis", "output")


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse config text, filling unset keys from the kind's defaults."""
    raw: dict = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith(";"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in _SECTION_ORDER:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside of any [section]")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if (section, key) not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{section}]")
        raw[(section, key)] = value.strip()

    if base is None:
        kind = raw.get(("experiment", "kind"))
        if kind is None:
            raise ConfigError("config must set [experiment] kind")
        base = default_config(kind)
    updates = {}
    for (section, key), value in raw.items():
        name, parser = _SCHEMA[(section, key)]
        updates[name] = parser(value)
    return replace(base, **updates).validate()


def parse_config_file(path: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, base=base)


def apply_overrides(cfg: ExperimentConfig, overrides) -> ExperimentConfig:
    """Apply ``section.key=value`` strings on top of a config."""
    updates = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        dotted, _, value = item.partition("=")
        dotted = dotted.strip()
        if "." not in dotted:
            raise ConfigError(f"override key must be section.key, got {dotted!r}")
        section, _, key = dotted.partition(".")
        if (section, key) not in _SCHEMA:
            raise ConfigError(f"unknown override target {dotted!r}")
        name, parser = _SCHEMA[(section, key)]
        updates[name] = parser(value.strip())
    return replace(cfg, **updates).validate()


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; parse(serialize(c)) == c."""
    by_section: dict = {s: [] for s in _SECTION_ORDER}
    for (section, key), (name, _parser) in _SCHEMA.items():
        by_section[section].append((key, getattr(cfg, name)))
    lines = []
    for section in _SECTION_ORDER:
        lines.append(f"[{section}]")
        for key, value in by_section[section]:
            lines.append(f"{key} = {_fmt(value)}")
        lines.append("")
    return "\n".join(lines)
