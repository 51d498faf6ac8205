"""Scenario files: YAML documents describing a system and the checks to run on it.

Example::

    system:
      preset: pair-zz        # free | pair-zz | pair+triple-random | random
      N: 3
    seed: 42
    times: [0.1, 0.7]
    gamma_values: [0.05, 0.15, 0.3]
    checks: all
    tolerance_overrides:
      group_law: 1.0e-9

Inline systems give ``d``, ``N``, ``h1`` and ``potentials`` (a list of
``{k, phi}``) instead of ``preset``.  Complex matrices are lists of rows
whose entries are either real numbers or ``[re, im]`` pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from ..errors import CapacityError, ConfigParseError, ValidationError
from ..hamiltonian import (
    MAX_DIMENSION,
    PRESETS,
    InteractionPotential,
    SystemSpec,
    preset_spec,
    random_spec,
)
from .checks import CHECKS

DEFAULT_TIMES = (0.1, 0.25, 0.7, 1.0)
DEFAULT_GAMMAS = (0.05, 0.15, 0.3)
TOP_LEVEL_KEYS = {
    "system", "seed", "times", "gamma_values", "checks", "tolerance_overrides", "instances",
}
SYSTEM_KEYS = {"preset", "d", "N", "hbar", "h1", "potentials", "symmetrize", "orders", "preset_seed"}


@dataclass
class Scenario:
    system: dict
    seed: int = 0
    times: list = field(default_factory=lambda: list(DEFAULT_TIMES))
    gamma_values: list = field(default_factory=lambda: list(DEFAULT_GAMMAS))
    checks: list = field(default_factory=list)
    tolerance_overrides: dict = field(default_factory=dict)
    instances: int = 3
    source: str | None = None

    def spec_for(self, instance: int) -> SystemSpec:
        """System used by the given instance (identical for every instance unless the preset is ``random``)."""
        return build_system(self.system, self.seed, instance)

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "seed": self.seed,
            "times": list(self.times),
            "gamma_values": list(self.gamma_values),
            "checks": list(self.checks),
            "tolerance_overrides": dict(sorted(self.tolerance_overrides.items())),
            "instances": self.instances,
        }


def parse_matrix(value: Any, name: str, dim: int | None = None) -> np.ndarray:
    """Rows of real numbers or [re, im] pairs -> complex ndarray."""
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ValidationError(name, "expected a list of matrix rows")
    rows = []
    for i, row in enumerate(value):
        out = []
        for j, x in enumerate(row):
            if isinstance(x, bool):
                raise ValidationError(f"{name}[{i}][{j}]", "expected a number or [re, im]")
            if isinstance(x, (int, float)):
                out.append(complex(x))
            elif isinstance(x, list) and len(x) == 2 and all(isinstance(y, (int, float)) for y in x):
                out.append(complex(x[0], x[1]))
            else:
                raise ValidationError(f"{name}[{i}][{j}]", "expected a number or [re, im]")
        rows.append(out)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValidationError(name, "matrix must be square")
    if dim is not None and n != dim:
        raise ValidationError(name, f"expected a {dim}x{dim} matrix, got {n}x{n}")
    m = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValidationError(name, "matrix has non-finite entries")
    return m


def _int(value, name, lo=None, hi=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(name, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ValidationError(name, f"must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ValidationError(name, f"must be <= {hi}, got {value}")
    return value


def _real(value, name) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValidationError(name, f"expected a finite real number, got {value!r}")
    return float(value)


def _real_list(value, name) -> list:
    if not isinstance(value, list) or not value:
        raise ValidationError(name, "expected a nonempty list of numbers")
    return [_real(v, f"{name}[{i}]") for i, v in enumerate(value)]


def build_system(system: dict, seed: int = 0, instance: int = 0) -> SystemSpec:
    """Turn the ``system`` section into a validated :class:`SystemSpec`."""
    if not isinstance(system, dict):
        raise ValidationError("system", "expected a mapping")
    unknown = set(system) - SYSTEM_KEYS
    if unknown:
        raise ValidationError(f"system.{sorted(unknown)[0]}", f"unknown key; valid keys: {sorted(SYSTEM_KEYS)}")
    hbar = _real(system.get("hbar", 1.0), "system.hbar")
    if hbar <= 0:
        raise ValidationError("system.hbar", "must be positive")
    N = _int(system.get("N", 3), "system.N", lo=1)
    preset = system.get("preset")
    if preset is not None:
        if preset == "random":
            d = _int(system.get("d", 2), "system.d", lo=2)
            orders = system.get("orders", [2, 3])
            if not isinstance(orders, list):
                raise ValidationError("system.orders", "expected a list of body orders")
            orders = [_int(k, f"system.orders[{i}]", lo=2) for i, k in enumerate(orders)]
            _guard(d, N)
            rng = np.random.default_rng([seed, 0x5EED, instance])
            return random_spec(rng, d, N, orders, hbar=hbar)
        if preset not in PRESETS:
            raise ValidationError(
                "system.preset", f"unknown preset {preset!r}; choose from {sorted(PRESETS + ('random',))}"
            )
        _guard(2, N)
        preset_seed = _int(system.get("preset_seed", seed), "system.preset_seed", lo=0)
        return preset_spec(preset, N, seed=preset_seed, hbar=hbar)

    d = _int(system.get("d", 2), "system.d", lo=2)
    _guard(d, N)
    if "h1" not in system:
        raise ValidationError("system.h1", "required when no preset is given")
    h1 = parse_matrix(system["h1"], "system.h1", d)
    symmetrize = bool(system.get("symmetrize", False))
    pots = []
    raw = system.get("potentials", []) or []
    if not isinstance(raw, list):
        raise ValidationError("system.potentials", "expected a list")
    for i, p in enumerate(raw):
        name = f"system.potentials[{i}]"
        if not isinstance(p, dict) or "k" not in p or "phi" not in p:
            raise ValidationError(name, "expected a mapping with keys k and phi")
        k = _int(p["k"], f"{name}.k", lo=2, hi=N)
        phi = parse_matrix(p["phi"], f"{name}.phi", d ** k)
        try:
            pots.append(InteractionPotential(k, phi, d, symmetrize=symmetrize))
        except ValidationError as exc:
            raise ValidationError(f"{name}.phi", exc.message) from None
    try:
        return SystemSpec(d, N, h1, tuple(pots), hbar)
    except ValidationError as exc:
        field_name = exc.field if exc.field.startswith("system.") else f"system.{exc.field}"
        raise ValidationError(field_name, exc.message) from None


def _guard(d: int, N: int):
    if d ** N > MAX_DIMENSION:
        raise CapacityError(f"d**N = {d ** N} exceeds the dimension capacity {MAX_DIMENSION}")


def scenario_from_dict(data: Any, source: str | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise ValidationError("<root>", "scenario must be a mapping")
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ValidationError(sorted(unknown)[0], f"unknown key; valid keys: {sorted(TOP_LEVEL_KEYS)}")
    if "system" not in data:
        raise ValidationError("system", "required")
    system = data["system"]
    seed = _int(data.get("seed", 0), "seed", lo=0, hi=2 ** 64 - 1)
    times = _real_list(data.get("times", list(DEFAULT_TIMES)), "times")
    gammas = _real_list(data.get("gamma_values", list(DEFAULT_GAMMAS)), "gamma_values")
    for i, g in enumerate(gammas):
        if not 0 < g < math.exp(-1):
            raise ValidationError(f"gamma_values[{i}]", f"must lie in (0, 1/e), got {g}")
    checks = data.get("checks", "all")
    if checks == "all" or checks is None:
        checks = list(CHECKS)
    elif isinstance(checks, list) and all(isinstance(c, str) for c in checks):
        for c in checks:
            if c not in CHECKS:
                raise ValidationError("checks", f"unknown check id {c!r}; valid ids: {', '.join(CHECKS)}")
    else:
        raise ValidationError("checks", "expected 'all' or a list of check ids")
    overrides = data.get("tolerance_overrides", {}) or {}
    if not isinstance(overrides, dict):
        raise ValidationError("tolerance_overrides", "expected a mapping of check id to tolerance")
    for k, v in overrides.items():
        if k not in CHECKS:
            raise ValidationError(
                f"tolerance_overrides.{k}", f"unknown check id; valid ids: {', '.join(CHECKS)}"
            )
        if _real(v, f"tolerance_overrides.{k}") < 0:
            raise ValidationError(f"tolerance_overrides.{k}", "must be non-negative")
    overrides = {k: float(v) for k, v in overrides.items()}
    instances = _int(data.get("instances", 3), "instances", lo=1, hi=1000)
    scenario = Scenario(system, seed, times, gammas, list(checks), overrides, instances, source)
    scenario.spec_for(0)  # validates matrices and capacity up front
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    """Read, parse and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParseError(str(path), f"cannot read file: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        col = mark.column + 1 if mark is not None else None
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigParseError(str(path), problem, line, col) from None
    return scenario_from_dict(data, str(path))
