"""System parameters, config-file I/O and blocking-capacitor design bounds."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping


class Topology(str, Enum):
    YAB = "YAB"
    ACDC_DAB = "ACDC_DAB"


class ConfigError(ValueError):
    """Bad configuration input. ``key`` names the offending entry when there is one."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class ConverterParams:
    # grid and DC side
    v_g_rms: float = 277.0
    f_g: float = 60.0
    v_dc: float = 200.0
    # switching cell and link
    f_sw: float = 100e3
    L_t: float = 19.3e-6
    R_series: float = 24.8e-3
    C_B: float = 4.5e-6
    # sampling
    N_sw: int = 512
    n_theta: int = 360
    # device; no datasheet defaults
    R_ds_on: float | None = None
    C_oss: float | None = None
    # magnetics
    N_l: float = 6
    A_c_l: float = 1.56e-3
    N_t: float = 21
    A_c_t: float = 7.84e-4
    topology: Topology = Topology.YAB
    # inert metadata (filter and DC-link parts, nameplate power)
    C_a: float = 0.5e-6
    C_fa: float = 10e-6
    C_dc: float = 10e-6
    P_rated: float = 6e3

    @property
    def v_g_peak(self) -> float:
        return math.sqrt(2.0) * self.v_g_rms

    @property
    def T_sw(self) -> float:
        return 1.0 / self.f_sw

    def replace(self, **changes) -> "ConverterParams":
        return dataclasses.replace(self, **changes)


PARAM_NAMES = tuple(f.name for f in fields(ConverterParams))
_INT_KEYS = {"N_sw", "n_theta"}
_OPTIONAL_KEYS = {"R_ds_on", "C_oss"}


@dataclass(frozen=True)
class CapBounds:
    c_min: float
    c_max: float
    epsilon: float
    lam: float


@dataclass(frozen=True)
class Violation:
    key: str
    message: str
    severity: str = "error"  # or "warning"

    def __str__(self) -> str:
        return f"{self.severity}: {self.key}: {self.message}"


def blocking_cap_bounds(L_t: float, f_g: float, f_sw: float,
                        epsilon: float = 0.01, lam: float = 0.2) -> CapBounds:
    """Allowed blocking-capacitance window.

    The upper limit keeps the grid-frequency flux below ``epsilon`` times the
    switching-frequency flux; the lower limit keeps the L-C resonance below
    ``lam * f_sw``.
    """
    for name, value in (("L_t", L_t), ("f_g", f_g), ("f_sw", f_sw),
                        ("epsilon", epsilon), ("lam", lam)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")
    if epsilon >= 1 or lam > 1:
        raise ValueError("epsilon must be < 1 and lam <= 1")
    c_max = epsilon / (f_g * (f_sw - epsilon * f_g) * L_t)
    c_min = 1.0 / (4.0 * math.pi ** 2 * lam ** 2 * f_sw ** 2 * L_t)
    return CapBounds(c_min=c_min, c_max=c_max, epsilon=epsilon, lam=lam)


def resonant_frequency(L_t: float, C_B: float) -> float:
    return 1.0 / (2.0 * math.pi * math.sqrt(L_t * C_B))


def validate(params: ConverterParams) -> list[Violation]:
    """Return every violated invariant; an empty list means the set is usable.

    Blocking capacitance outside the design window is reported as a warning.
    """
    out: list[Violation] = []
    positive = ("v_g_rms", "f_g", "v_dc", "f_sw", "L_t", "C_B",
                "N_l", "A_c_l", "N_t", "A_c_t")
    for key in positive:
        value = getattr(params, key)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            out.append(Violation(key, f"{key} must be positive"))
    for key in _OPTIONAL_KEYS:
        value = getattr(params, key)
        if value is not None and not (math.isfinite(value) and value > 0):
            out.append(Violation(key, f"{key} must be positive when given"))
    if not (math.isfinite(params.R_series) and params.R_series >= 0):
        out.append(Violation("R_series", "R_series must be non-negative"))

    if not isinstance(params.N_sw, int) or params.N_sw % 2:
        out.append(Violation("N_sw", "N_sw must be even"))
    elif params.N_sw < 8:
        out.append(Violation("N_sw", "N_sw must be at least 8"))
    if not isinstance(params.n_theta, int) or params.n_theta < 8:
        out.append(Violation("n_theta", "n_theta must be an integer >= 8"))
    if not isinstance(params.topology, Topology):
        out.append(Violation("topology", f"unknown topology {params.topology!r}"))

    if params.v_dc > 0 and params.v_g_rms > 0 and params.v_dc < params.v_g_peak / 2:
        out.append(Violation(
            "v_dc",
            f"over-modulation: v_dc={params.v_dc:g} V is below v_g_peak/2="
            f"{params.v_g_peak / 2:.4g} V"))

    if not any(v.key in ("L_t", "f_g", "f_sw", "C_B") for v in out):
        bounds = blocking_cap_bounds(params.L_t, params.f_g, params.f_sw)
        if params.C_B < bounds.c_min:
            out.append(Violation("C_B", "C_B below resonance lower bound "
                                 f"({bounds.c_min:.4g} F)", "warning"))
        elif params.C_B > bounds.c_max:
            out.append(Violation("C_B", "C_B above grid-frequency blocking upper bound "
                                 f"({bounds.c_max:.4g} F)", "warning"))
    return out


def errors(violations: Iterable[Violation]) -> list[Violation]:
    return [v for v in violations if v.severity == "error"]


def parse_value(key: str, text: str):
    """Convert the textual value of ``key`` to its field type."""
    if key not in PARAM_NAMES:
        raise ConfigError(f"unknown key {key!r}", key)
    text = text.strip()
    if key == "topology":
        try:
            return Topology(text.upper())
        except ValueError:
            raise ConfigError(f"topology: unknown value {text!r}", key) from None
    if key in _OPTIONAL_KEYS and text.lower() in ("", "none"):
        return None
    try:
        if key in _INT_KEYS:
            number = float(text)
            if number != int(number):
                raise ConfigError(f"{key} must be an integer, got {text!r}", key)
            return int(number)
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as a number", key) from None


def apply_overrides(params: ConverterParams, overrides: Mapping[str, str]) -> ConverterParams:
    changes = {key: parse_value(key, value) for key, value in overrides.items()}
    return params.replace(**changes)


def check(params: ConverterParams) -> ConverterParams:
    """Raise ConfigError on the first hard violation, else return params unchanged."""
    bad = errors(validate(params))
    if bad:
        raise ConfigError(bad[0].message, bad[0].key)
    return params


def parse_config_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in PARAM_NAMES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", key)
        entries[key] = value
    return entries


def load_config(path: str | Path, overrides: Mapping[str, str] | None = None) -> ConverterParams:
    """Read a ``key = value`` file; unspecified keys keep their defaults."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    entries = parse_config_text(path.read_text(encoding="utf-8"))
    if overrides:
        entries.update(overrides)
    return check(apply_overrides(ConverterParams(), entries))


def format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, Topology):
        return value.value
    return repr(value)


def dump_config(params: ConverterParams) -> str:
    return "".join(f"{name} = {format_value(getattr(params, name))}\n" for name in PARAM_NAMES)


def save_config(params: ConverterParams, path: str | Path) -> None:
    Path(path).write_text(dump_config(params), encoding="utf-8")


def describe(params: ConverterParams) -> str:
    """Single-line ``key=value`` rendering, used for CSV header comments."""
    return " ".join(f"{name}={format_value(getattr(params, name))}" for name in PARAM_NAMES)
