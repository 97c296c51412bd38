"""Run configuration: JSON file plus command-line overrides."""
from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass, field, fields
from typing import List, Optional

import numpy as np

from .branchstate import ModelParams

TIME_SWEEP_COLUMNS = (
    "t",
    "mi_s1s2_e1",
    "entropy_s1s2",
    "coherence_s1s2",
    "coherence_e1",
    "discord_s1s2_measured_s1",
    "discord_s1ek_measured_s1",
    "backward_nullity_residual",
)
FRACTION_SWEEP_COLUMNS = ("f", "mi_composite_over_S", "mi_single_over_S_single")
QUANTITIES = tuple(c for c in TIME_SWEEP_COLUMNS if c != "t")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


class ConfigError(ValueError):
    pass


def parse_real(text) -> float:
    """Parse a real number, allowing literals such as ``pi/6`` or ``3*pi/4 - 0.1``."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ConfigError(f"cannot parse number {text!r}")

    try:
        return float(ev(ast.parse(str(text).strip(), mode="eval")))
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def parse_time_grid(text) -> List[float]:
    """``a:b:n`` for n evenly spaced points in [a, b], or a comma-separated list."""
    if isinstance(text, (list, tuple)):
        return [parse_real(x) for x in text]
    text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"time grid {text!r} must look like start:stop:count")
        a, b, n = parse_real(parts[0]), parse_real(parts[1]), int(parse_real(parts[2]))
        if n < 1:
            raise ConfigError("time grid count must be positive")
        return [float(x) for x in np.linspace(a, b, n)]
    return [parse_real(x) for x in text.split(",") if x.strip()]


def parse_int_list(text) -> List[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    return [int(x) for x in str(text).split(",") if x.strip()]


@dataclass
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    Jx: Optional[float] = None
    Jy: Optional[float] = None
    time_grid: List[float] = field(default_factory=lambda: [math.pi / 4])
    fraction_grid: Optional[List[int]] = None  # None means 1..N
    outputs: Optional[List[str]] = None  # None means every column
    format: str = "csv"
    output_path: str = "-"
    seed: int = 0
    plateau_tol: float = 1e-3
    nullity_tol: float = 1e-8

    def __post_init__(self):
        self.validate()

    @property
    def non_commuting(self) -> bool:
        jx = self.params.J if self.Jx is None else self.Jx
        jy = self.params.J if self.Jy is None else self.Jy
        return jx != jy

    def fractions(self) -> List[int]:
        return list(range(1, self.params.N + 1)) if self.fraction_grid is None else list(self.fraction_grid)

    def validate(self):
        if not self.time_grid:
            raise ConfigError("time grid is empty")
        if any(t < 0 for t in self.time_grid):
            raise ConfigError("times must be nonnegative")
        if self.fraction_grid is not None:
            if not self.fraction_grid:
                raise ConfigError("fraction grid is empty")
            bad = [m for m in self.fraction_grid if not 0 <= m <= self.params.N]
            if bad:
                raise ConfigError(f"fraction sizes {bad} outside [0, {self.params.N}]")
        if self.outputs is not None:
            unknown = [q for q in self.outputs if q not in QUANTITIES]
            if unknown:
                raise ConfigError(f"unknown quantity {unknown[0]!r}; valid names: {', '.join(QUANTITIES)}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["params"] = dict(self.params.__dict__)
        return d


_PARAM_KEYS = {"theta1": "theta1", "theta2": "theta2", "J": "J", "j": "J", "Jz": "Jz", "jz": "Jz",
               "Jse": "Jse", "jse": "Jse", "N": "N", "n_env": "N", "t": "t"}


def params_from_mapping(base: ModelParams, mapping: dict) -> ModelParams:
    changes = {}
    for key, value in mapping.items():
        if key not in _PARAM_KEYS:
            raise ConfigError(f"unknown parameter {key!r}")
        name = _PARAM_KEYS[key]
        changes[name] = int(parse_real(value)) if name == "N" else parse_real(value)
    return base.replace(**changes)


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def build_config(file_data: Optional[dict], overrides: dict) -> RunConfig:
    """Merge a config-file mapping with flag overrides (flags win)."""
    data = dict(file_data or {})
    params_map = dict(data.pop("params", {}) or {})
    for key in ("theta1", "theta2", "J", "Jz", "Jse", "N"):
        if overrides.get(key) is not None:
            params_map[key] = overrides[key]

    known = {f.name for f in fields(RunConfig)} - {"params"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in known:
        if overrides.get(key) is not None:
            data[key] = overrides[key]

    try:
        params = params_from_mapping(ModelParams(), params_map)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    kw = {}
    if "time_grid" in data:
        kw["time_grid"] = parse_time_grid(data["time_grid"])
    if data.get("fraction_grid") is not None:
        kw["fraction_grid"] = parse_int_list(data["fraction_grid"])
    if data.get("outputs") is not None:
        out = data["outputs"]
        kw["outputs"] = [q.strip() for q in out.split(",")] if isinstance(out, str) else list(out)
    for key in ("Jx", "Jy", "plateau_tol", "nullity_tol"):
        if data.get(key) is not None:
            kw[key] = parse_real(data[key])
    for key in ("format", "output_path"):
        if data.get(key) is not None:
            kw[key] = str(data[key])
    if data.get("seed") is not None:
        kw["seed"] = int(data["seed"])
    return RunConfig(params=params, **kw)
