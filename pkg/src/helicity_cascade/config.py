"""Scenario configuration: parsing of flag/file values and validation."""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .cascade import MAX_SCATTERINGS
from .errors import ConfigError
from .relkin import M_ELECTRON, M_PROTON
from .sweep import Measure

_PI_TOKEN = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(value: Any, field: str = "angle") -> float:
    """Radians from a number or a ``pi`` literal such as ``0.95pi`` or ``pi/2``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(field, f"cannot read angle from {value!r}")
    match = _PI_TOKEN.match(value)
    if match:
        coef = float(match.group(1)) if match.group(1) else 1.0
        div = float(match.group(2)) if match.group(2) else 1.0
        return coef * math.pi / div
    try:
        return float(value)
    except ValueError:
        raise ConfigError(field, f"cannot read angle from {value!r}") from None


def parse_float(value: Any, field: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(field, f"expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(field, f"expected a finite number, got {value!r}")
    return x


def parse_axis(value: Any, field: str, angle: bool = False) -> np.ndarray:
    """An axis given as ``start:stop:count``, a comma list, or a YAML list."""
    read = (lambda v: parse_angle(v, field)) if angle else (lambda v: parse_float(v, field))
    if value is None or (isinstance(value, str) and not value.strip()):
        raise ConfigError(field, "axis is empty")
    if isinstance(value, str) and ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(field, f"expected start:stop:count, got {value!r}")
        start, stop = read(parts[0]), read(parts[1])
        try:
            count = int(parts[2])
        except ValueError:
            raise ConfigError(field, f"count must be an integer, got {parts[2]!r}") from None
        if count < 1:
            raise ConfigError(field, "axis is empty")
        axis = np.linspace(start, stop, count)
    else:
        items = value.split(",") if isinstance(value, str) else value
        if not isinstance(items, (list, tuple)):
            items = [items]
        items = [x for x in items if not (isinstance(x, str) and not x.strip())]
        if not items:
            raise ConfigError(field, "axis is empty")
        axis = np.array([read(x) for x in items])
    if len(axis) > 1 and np.any(np.diff(axis) <= 0):
        raise ConfigError(field, "axis must be strictly increasing")
    return axis


def parse_initial_field(value: Any, n: int) -> tuple[int, ...]:
    field = "initial"
    if isinstance(value, str):
        bits = [x.strip() for x in value.replace(";", ",").split(",") if x.strip()]
    elif isinstance(value, (list, tuple)):
        bits = [str(x) for x in value]
    else:
        raise ConfigError(field, f"cannot read helicities from {value!r}")
    if any(b not in ("0", "1") for b in bits):
        raise ConfigError(field, f"helicity indices must be 0 or 1, got {value!r}")
    if len(bits) != n + 1:
        raise ConfigError(field, f"need {n + 1} entries (target then projectiles), got {len(bits)}")
    return tuple(int(b) for b in bits)


def default_initial(n: int) -> tuple[int, ...]:
    """Target helicity +1, every projectile -1."""
    return (0,) + (1,) * n


@dataclass
class ScenarioConfig:
    """Everything a CLI command needs, already validated.

    Angles are radians, momenta and masses MeV, helicities as qubit
    indices (0 for +1).
    """

    command: str
    n: int = 1
    m: float = M_ELECTRON
    M: float = M_PROTON
    initial: tuple[int, ...] = (0, 1)
    thetas: tuple[float, ...] = (math.pi,)
    dphis: tuple[float, ...] = ()
    p: float | None = None
    p_axis: tuple[float, ...] | None = None
    theta_axis: tuple[float, ...] | None = None
    theta1_axis: tuple[float, ...] | None = None
    theta2_axis: tuple[float, ...] | None = None
    dphi_axis: tuple[float, ...] | None = None
    p_bracket: tuple[float, float] | None = None
    coarse_points: int = 41
    measure: str | None = None
    ratios: tuple[float, ...] | None = None
    theta_set: tuple[float, ...] | None = None
    out: str = "-"

    def echo(self) -> dict:
        """Plain-data copy for embedding in reports."""
        d = asdict(self)
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}

    def angles(self) -> tuple[tuple[float, float], ...]:
        """(theta, phi) per scattering; phi accumulates the relative azimuths."""
        phis = [0.0]
        for dp in self.dphis:
            phis.append((phis[-1] + dp) % (2 * math.pi))
        return tuple(zip(self.thetas, phis))


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"{path}: not valid YAML/JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path}: top level must be a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _per_scattering(raw: dict, n: int, key: str, default) -> list:
    """Collect theta1..thetaN style keys, falling back to a shared value."""
    shared = raw.get(key, default)
    return [raw.get(f"{key}{i}", shared) for i in range(1, n + 1)]


def build_config(command: str, raw: dict) -> ScenarioConfig:
    """Validate merged flag/file values into a ScenarioConfig."""
    raw = {k: v for k, v in raw.items() if v is not None}
    defaults = {"single-map": 1, "double-map": 2, "triple-curves": 3, "mass-scan": 1}
    n_raw = raw.get("n", defaults.get(command, 1))
    try:
        n = int(n_raw)
    except (TypeError, ValueError):
        raise ConfigError("n", f"expected an integer, got {n_raw!r}") from None
    if not 1 <= n <= MAX_SCATTERINGS:
        raise ConfigError("n", f"must be in [1, {MAX_SCATTERINGS}], got {n}")
    if command in defaults and n != defaults[command] and command != "mass-scan":
        raise ConfigError("n", f"{command} requires n={defaults[command]}")

    cfg = ScenarioConfig(command=command, n=n)
    cfg.m = parse_float(raw.get("m", M_ELECTRON), "m")
    cfg.M = parse_float(raw.get("M", M_PROTON), "M")
    if cfg.m < 0 or cfg.M <= 0:
        raise ConfigError("m" if cfg.m < 0 else "M", "masses must be positive")
    cfg.initial = (parse_initial_field(raw["initial"], n) if "initial" in raw
                   else default_initial(n))

    thetas = _per_scattering(raw, n, "theta", "pi")
    cfg.thetas = tuple(parse_angle(t, f"theta{i}") for i, t in enumerate(thetas, 1))
    for i, t in enumerate(cfg.thetas, 1):
        if not 0 <= t <= math.pi:
            raise ConfigError(f"theta{i}", f"{t} outside [0, pi]")
    if n > 1:
        shared = raw.get("dphi", "pi")
        cfg.dphis = tuple(parse_angle(raw.get(f"dphi{i}", shared), f"dphi{i}")
                          for i in range(2, n + 1))

    if "p" in raw:
        cfg.p = parse_float(raw["p"], "p")
        if cfg.p <= 0:
            raise ConfigError("p", "beam momentum must be positive")
    for key, angle in (("p_axis", False), ("theta_axis", True), ("theta1_axis", True),
                       ("theta2_axis", True), ("dphi_axis", True), ("theta_set", True),
                       ("ratios", False)):
        if key in raw:
            setattr(cfg, key, tuple(float(x) for x in parse_axis(raw[key], key, angle)))
    if cfg.p_axis is not None and min(cfg.p_axis) <= 0:
        raise ConfigError("p_axis", "momenta must be positive")
    for key in ("theta_axis", "theta1_axis", "theta2_axis", "theta_set"):
        axis = getattr(cfg, key)
        if axis is not None and (min(axis) < 1e-6 or max(axis) > math.pi):
            raise ConfigError(key, "angles must lie in [1e-6, pi]")
    if cfg.ratios is not None and (min(cfg.ratios) <= 0 or max(cfg.ratios) > 1):
        raise ConfigError("ratios", "mass ratios must lie in (0, 1]")

    if "p_bracket" in raw:
        br = parse_axis(raw["p_bracket"], "p_bracket")
        if len(br) != 2 or br[0] <= 0:
            raise ConfigError("p_bracket", "expected two positive increasing momenta lo,hi")
        cfg.p_bracket = (float(br[0]), float(br[1]))
    if "coarse_points" in raw:
        try:
            cfg.coarse_points = int(raw["coarse_points"])
        except (TypeError, ValueError):
            raise ConfigError("coarse_points", "expected an integer") from None
        if cfg.coarse_points < 3:
            raise ConfigError("coarse_points", "need at least 3 points")
    if "measure" in raw:
        try:
            Measure.parse(str(raw["measure"])).validate(n)
        except ValueError as exc:
            raise ConfigError("measure", str(exc)) from None
        cfg.measure = str(raw["measure"])
    cfg.out = str(raw.get("out", "-"))
    return cfg


def index_to_helicity(indices) -> tuple[int, ...]:
    return tuple(1 - 2 * int(i) for i in indices)
