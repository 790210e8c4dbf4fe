"""Run configuration: JSON ingestion with field-path errors, sweeps and figure presets.

A configuration file looks like::

    {
      "schema": 1,
      "stack": {
        "background": {"model": "vacuum"},
        "plate_l": {"material": {"model": "perfect_conductor"}, "thickness_m": 1e-8},
        "plate_r": {"material": {"model": "perfect_conductor"}, "thickness_m": 1e-8},
        "separation_m": 1e-8,
        "mass_kg": 0.0
      },
      "sweep": {"parameter": "mass", "start": 0.0, "stop": 0.0, "points": 1, "spacing": "linear"},
      "channels": ["TE", "TM", "total"],
      "quadrature": {"rel_tol": 1e-8, "max_evals": 2000000},
      "output": {"format": "csv", "path": "out.csv"},
      "parallelism": 1
    }

All values are SI. The swept quantity may be omitted from ``stack``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from .errors import CasimirError, ConfigError
from .materials import (
    ConstantEpsMu,
    ConstantIndex,
    InfinitelyPermeable,
    MaterialModel,
    PerfectConductor,
    Plasma,
    Tabulated,
    Vacuum,
    load_tabulated,
)
from .quadrature import GaussLegendre, QuadratureSpec, TanhSinh, Transform
from .stack import LimitKind, Plate, StackConfig, classify, mass_from_bar

SCHEMA_VERSION = 1
CHANNELS = ("TE", "TM", "TM_I", "TM_II", "total")
SPLIT_CHANNELS = ("TM_I", "TM_II")

# probe frequencies (rad/s) used to decide whether a background has unit index
_INDEX_PROBES = np.geomspace(1.0, 1e20, 41)


@dataclass(frozen=True)
class Sweep:
    parameter: str = "mass"
    start: float = 0.0
    stop: float = 0.0
    points: int = 1
    spacing: str = "linear"

    @property
    def param_name(self) -> str:
        return "mass_kg" if self.parameter == "mass" else "separation_m"

    def values(self) -> list[float]:
        if self.points == 1:
            return [float(self.start)]
        if self.spacing == "log":
            grid = np.geomspace(self.start, self.stop, self.points)
        else:
            grid = np.linspace(self.start, self.stop, self.points)
        return [float(x) for x in grid]

    def apply(self, stack: StackConfig, value: float) -> StackConfig:
        if self.parameter == "mass":
            return stack.with_mass(value)
        return stack.with_separation(value)


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    stack: StackConfig
    sweep: Sweep = field(default_factory=Sweep)
    channels: tuple[str, ...] = ("TE", "TM", "total")
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    parallelism: int = 1

    def to_dict(self) -> dict[str, Any]:
        """JSON form; the worker count is left out because it does not affect results."""
        rule = self.quad.base_rule
        base = ({"kind": "gauss_legendre", "n": rule.n} if isinstance(rule, GaussLegendre)
                else {"kind": "tanh_sinh", "level": rule.level})
        return {
            "schema": SCHEMA_VERSION,
            "stack": self.stack.to_dict(),
            "sweep": {"parameter": self.sweep.parameter, "start": self.sweep.start, "stop": self.sweep.stop,
                      "points": self.sweep.points, "spacing": self.sweep.spacing},
            "channels": list(self.channels),
            "quadrature": {"rel_tol": self.quad.rel_tol, "abs_tol": self.quad.abs_tol,
                           "max_evals": self.quad.max_evals, "transform": self.quad.transform.value,
                           "base_rule": base},
            "output": {"format": self.output.format},
        }


# ---------------------------------------------------------------------------
# field helpers


def _obj(data: Any, path: str, allowed: tuple[str, ...]) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{_join(path, unknown[0])}: unknown field")
    return data


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _number(data: dict, key: str, path: str, default: Any = ..., *, positive=False, nonneg=False) -> float:
    p = _join(path, key)
    if key not in data:
        if default is ...:
            raise ConfigError(f"{p}: required field missing")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{p}: expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{p}: must be > 0, got {value!r}")
    if nonneg and not value >= 0:
        raise ConfigError(f"{p}: must be >= 0, got {value!r}")
    return float(value)


def _integer(data: dict, key: str, path: str, default: int, minimum: int) -> int:
    p = _join(path, key)
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{p}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{p}: must be >= {minimum}, got {value!r}")
    return value


def _choice(data: dict, key: str, path: str, options: tuple[str, ...], default: Optional[str] = None) -> str:
    p = _join(path, key)
    value = data.get(key, default)
    if value is None:
        raise ConfigError(f"{p}: required field missing")
    if value not in options:
        raise ConfigError(f"{p}: must be one of {', '.join(options)}; got {value!r}")
    return value


# ---------------------------------------------------------------------------
# sections


_MATERIAL_FIELDS = {
    "vacuum": (),
    "constant_index": ("n",),
    "constant_eps_mu": ("eps_r", "mu_r"),
    "plasma": ("omega_p_rad_per_s",),
    "tabulated": ("xi_rad_per_s", "eps_rel", "path"),
    "perfect_conductor": (),
    "infinitely_permeable": (),
}


def parse_material(data: Any, path: str, base_dir: str = ".") -> MaterialModel:
    """Material from its JSON form; relative tabulated paths resolve against ``base_dir``."""
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = _choice(data, "model", path, tuple(_MATERIAL_FIELDS))
    _obj(data, path, ("model",) + _MATERIAL_FIELDS[kind])
    try:
        if kind == "vacuum":
            return Vacuum()
        if kind == "constant_index":
            return ConstantIndex(_number(data, "n", path))
        if kind == "constant_eps_mu":
            return ConstantEpsMu(_number(data, "eps_r", path), _number(data, "mu_r", path, 1.0))
        if kind == "plasma":
            return Plasma(_number(data, "omega_p_rad_per_s", path))
        if kind == "perfect_conductor":
            return PerfectConductor()
        if kind == "infinitely_permeable":
            return InfinitelyPermeable()
        if "path" in data:
            if not isinstance(data["path"], str):
                raise ConfigError(f"{_join(path, 'path')}: expected a string")
            return load_tabulated(os.path.join(base_dir, data["path"]))
        xs, ys = data.get("xi_rad_per_s"), data.get("eps_rel")
        for key, arr in (("xi_rad_per_s", xs), ("eps_rel", ys)):
            if not isinstance(arr, list) or not all(
                    isinstance(x, (int, float)) and not isinstance(x, bool) for x in arr):
                raise ConfigError(f"{_join(path, key)}: expected a list of numbers")
        return Tabulated(tuple(map(float, xs)), tuple(map(float, ys)))
    except ConfigError:
        raise
    except (CasimirError, ValueError, OSError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _plate(data: Any, path: str, base_dir: str) -> Plate:
    data = _obj(data, path, ("material", "thickness_m"))
    if "material" not in data:
        raise ConfigError(f"{path}.material: required field missing")
    return Plate(parse_material(data["material"], f"{path}.material", base_dir),
                 _number(data, "thickness_m", path, positive=True))


def parse_stack(data: Any, path: str = "stack", base_dir: str = ".",
                swept: Optional[str] = None, swept_default: float = 0.0) -> StackConfig:
    data = _obj(data, path, ("background", "plate_l", "plate_r", "separation_m", "mass_kg"))
    for key in ("background", "plate_l", "plate_r"):
        if key not in data:
            raise ConfigError(f"{path}.{key}: required field missing")
    background = parse_material(data["background"], f"{path}.background", base_dir)
    if background.is_limit:
        raise ConfigError(f"{path}.background: a limit model cannot be the background medium")
    sep_default = swept_default if swept == "separation" else ...
    mass_default = swept_default if swept == "mass" else 0.0
    stack = StackConfig(
        background=background,
        plate_l=_plate(data["plate_l"], f"{path}.plate_l", base_dir),
        plate_r=_plate(data["plate_r"], f"{path}.plate_r", base_dir),
        separation=_number(data, "separation_m", path, sep_default, positive=True),
        mass=_number(data, "mass_kg", path, mass_default, nonneg=True),
    )
    try:
        classify(stack)
    except CasimirError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return stack


def parse_sweep(data: Any, path: str = "sweep") -> Sweep:
    data = _obj(data, path, ("parameter", "start", "stop", "points", "spacing"))
    parameter = _choice(data, "parameter", path, ("mass", "separation"), "mass")
    spacing = _choice(data, "spacing", path, ("linear", "log"), "linear")
    points = _integer(data, "points", path, 1, 1)
    start = _number(data, "start", path, positive=parameter == "separation", nonneg=True)
    stop = _number(data, "stop", path, start, positive=parameter == "separation", nonneg=True)
    if start > stop:
        raise ConfigError(f"{path}.stop: must be >= start ({start!r}), got {stop!r}")
    if spacing == "log" and points > 1 and start <= 0.0:
        raise ConfigError(f"{path}.start: log spacing needs start > 0, got {start!r}")
    return Sweep(parameter, start, stop, points, spacing)


def parse_quadrature(data: Any, path: str = "quadrature") -> QuadratureSpec:
    data = _obj(data, path, ("rel_tol", "abs_tol", "max_evals", "transform", "base_rule"))
    transform = Transform(_choice(data, "transform", path, ("exp", "rational"), "exp"))
    rule_data = _obj(data.get("base_rule", {}), f"{path}.base_rule", ("kind", "n", "level"))
    kind = _choice(rule_data, "kind", f"{path}.base_rule", ("gauss_legendre", "tanh_sinh"), "gauss_legendre")
    try:
        if kind == "gauss_legendre":
            rule = GaussLegendre(_integer(rule_data, "n", f"{path}.base_rule", 7, 2))
        else:
            rule = TanhSinh(_integer(rule_data, "level", f"{path}.base_rule", 3, 3))
        return QuadratureSpec(
            rel_tol=_number(data, "rel_tol", path, 1e-8, positive=True),
            abs_tol=_number(data, "abs_tol", path, 0.0, nonneg=True),
            max_evals=_integer(data, "max_evals", path, 2_000_000, 100),
            transform=transform,
            base_rule=rule,
        )
    except ConfigError:
        raise
    except CasimirError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def unit_index_background(stack: StackConfig) -> bool:
    """True when ``eps_b mu_b = 1`` at every probe frequency."""
    bg = stack.background
    return bool(np.all(np.asarray(bg.eps(_INDEX_PROBES)) * np.asarray(bg.mu(_INDEX_PROBES)) == 1.0))


def split_available(stack: StackConfig) -> bool:
    """Whether the TM channel separates into two polarizations for this stack."""
    kind = classify(stack)
    if kind is LimitKind.PERMEABLE_PERMEABLE:
        return True
    return kind is LimitKind.CONDUCTOR_CONDUCTOR and unit_index_background(stack)


def check_channels(channels, stack: StackConfig, path: str = "channels") -> tuple[str, ...]:
    if not isinstance(channels, list) or not channels:
        raise ConfigError(f"{path}: expected a non-empty list")
    for i, ch in enumerate(channels):
        if ch not in CHANNELS:
            raise ConfigError(f"{path}[{i}]: must be one of {', '.join(CHANNELS)}; got {ch!r}")
        if ch in SPLIT_CHANNELS and not split_available(stack):
            raise ConfigError(
                f"{path}[{i}]: {ch} needs conductors in a unit-index background or permeable plates"
            )
    if len(set(channels)) != len(channels):
        raise ConfigError(f"{path}: duplicate channel")
    return tuple(channels)


def parse_config(data: Any, base_dir: str = ".") -> RunConfig:
    """Validate a decoded JSON document and build a :class:`RunConfig`.

    Raises
    ------
    ConfigError
        With the dotted path of the first offending field.
    """
    data = _obj(data, "", ("schema", "stack", "sweep", "channels", "quadrature", "output", "parallelism"))
    if data.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"schema: expected {SCHEMA_VERSION}, got {data.get('schema')!r}")
    if "stack" not in data:
        raise ConfigError("stack: required field missing")
    sweep = parse_sweep(data.get("sweep", {}))
    stack = parse_stack(data["stack"], "stack", base_dir, sweep.parameter, sweep.start)
    channels = check_channels(data.get("channels", ["TE", "TM", "total"]), stack)
    quad = parse_quadrature(data.get("quadrature", {}))
    out = _obj(data.get("output", {}), "output", ("format", "path"))
    fmt = _choice(out, "format", "output", ("csv", "json"), "csv")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path: expected a string")
    if path is not None and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    parallelism = _integer(data, "parallelism", "", 1, 1)
    return RunConfig(stack, sweep, channels, quad, OutputSpec(fmt, path), parallelism)


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(data, os.path.dirname(os.path.abspath(path)))


# ---------------------------------------------------------------------------
# figure presets

SCENARIO_SEPARATION = 10e-9
SCENARIO_POINTS = 25
# (plates, channels, m_bar range); ranges are chosen per figure, see README
SCENARIOS = {
    "fig3": ((PerfectConductor(), PerfectConductor()), ("TE", "TM", "total"), (1e-2, 1.5)),
    "fig4": ((InfinitelyPermeable(), InfinitelyPermeable()), ("TE", "TM", "TM_I", "TM_II", "total"), (1e-2, 5.0)),
    "fig5": ((PerfectConductor(), InfinitelyPermeable()), ("TE", "TM", "total"), (1e-2, 5.0)),
}
SCENARIO_INDICES = (1.0, 2.0)


def scenario_configs(name: str, base: Optional[RunConfig] = None) -> list[tuple[str, RunConfig]]:
    """Preset sweeps over the field mass at ``a = t_l = t_r = 10 nm`` for ``n_b = 1`` and ``2``.

    Returns ``(suffix, config)`` pairs, the suffix being ``nb1`` or ``nb2``.
    Quadrature settings and worker count are taken from ``base`` when given.
    """
    if name not in SCENARIOS:
        raise ConfigError(f"scenario: must be one of {', '.join(SCENARIOS)}; got {name!r}")
    (left, right), channels, (m_lo, m_hi) = SCENARIOS[name]
    a = SCENARIO_SEPARATION
    out = []
    for nb in SCENARIO_INDICES:
        background = Vacuum() if nb == 1.0 else ConstantIndex(nb)
        stack = StackConfig(background, Plate(left, a), Plate(right, a), a)
        sweep = Sweep("mass", mass_from_bar(m_lo, a), mass_from_bar(m_hi, a), SCENARIO_POINTS, "log")
        cfg = RunConfig(stack, sweep, channels)
        if base is not None:
            cfg = replace(cfg, quad=base.quad, output=base.output, parallelism=base.parallelism)
        out.append((f"nb{nb:g}", cfg))
    return out
