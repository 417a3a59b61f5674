"""Scenario configuration: JSON schema, validation, canonical hashing.

A scenario is one JSON document with nested sections.  All frequencies
are entered in MHz (implicit 2*pi), times in microseconds and lengths in
kilometers; conversion to internal SI/rad-s units happens here and
nowhere else.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .core import D2_WAVELENGTH, RB87_MASS, PhysicalParams, SuperpositionState

RENORM_TOL = 1e-6


class ConfigError(ValueError):
    """Configuration problem, with the offending field in the message."""


def _require(table: dict, key: str, where: str) -> Any:
    if key not in table:
        raise ConfigError(f"missing field {where}.{key}")
    return table[key]


def _number(table: dict, key: str, where: str, default: Optional[float] = None) -> float:
    if key not in table:
        if default is None:
            raise ConfigError(f"missing field {where}.{key}")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class Pulse1Config:
    shape: str = "gaussian"
    t1_us: float = 0.3
    center_us: float = 0.0


@dataclass(frozen=True)
class Pulse2Config:
    mode: str = "solve"  # "solve" | "explicit"
    family: str = "gaussian"
    free: str = "center"  # "center" | "amplitude"
    tol: float = 1e-6
    center_us: Optional[float] = None
    t2_range_us: tuple[float, float] = (0.02, 20.0)
    center_range_us: Optional[tuple[float, float]] = None
    t2_us: Optional[float] = None
    omega2_mhz: Optional[float] = None
    max_iterations: int = 80


@dataclass(frozen=True)
class GridConfig:
    span_in_t1: float = 12.0
    points: Optional[int] = None  # default: 4000 per pulse duration

    def n_points(self) -> int:
        if self.points is not None:
            return self.points
        return int(round(self.span_in_t1 * 4000)) + 1


@dataclass(frozen=True)
class ChannelConfig:
    length_km: float = 0.0
    atten_db_per_km: float = 2.0
    phase_rate: float = 0.1
    p_em: float = 1.0
    p_abs: float = 1.0


@dataclass(frozen=True)
class OutputsConfig:
    directory: str = "out"
    which: tuple[str, ...] = ("sender", "photonics", "receiver", "report")


@dataclass(frozen=True)
class ScenarioConfig:
    params: PhysicalParams
    initial_state: SuperpositionState
    pulse1: Pulse1Config
    pulse2: Pulse2Config
    grid: GridConfig
    channel: ChannelConfig
    outputs: OutputsConfig
    regime_min_ratio: float = 5.0
    strict: bool = False
    raw: dict = field(repr=False, compare=False, default_factory=dict)

    def config_hash(self) -> str:
        """Hash of the canonical serialized document, recorded in outputs."""
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def default_config_dict(qutrit: bool = False) -> dict:
    """Stock scenario document (editable starting point).

    The control-pulse solve runs in the fixed-center mode with a free
    amplitude because, for these parameters, a pulse with the same peak
    amplitude as the sender cannot accumulate the required areas (see
    README); the amplitude comes out about 13 percent higher.
    """
    if qutrit:
        state = {
            "c_m1": [math.sqrt(0.5), 0.0],
            "c_0": [math.sqrt(0.3), 0.0],
            "c_p1": [math.sqrt(0.2), 0.0],
        }
    else:
        state = {
            "c_m1": [math.sqrt(0.7), 0.0],
            "c_0": [math.sqrt(0.3), 0.0],
            "c_p1": [0.0, 0.0],
        }
    return {
        "params": {
            "g_mhz": 12.0,
            "k_mhz": 3.0,
            "gamma_sp_mhz": 5.87,
            "omega1_mhz": 10.0,
            "omega2_mhz": 10.0,
            "delta_mhz": 100.0,
            "delta_b_ground_mhz": 15.0,
            "delta_b_excited_mhz": 15.0,
            "phi2_rad": math.pi / 2,
            "atom_mass_kg": RB87_MASS,
            "wavelength_nm": D2_WAVELENGTH * 1e9,
        },
        "initial_state": state,
        "pulse1": {"shape": "gaussian", "T1_us": 0.3, "center_us": 0.0},
        "pulse2": {
            "mode": "solve",
            "family": "gaussian",
            "free": "amplitude",
            "center_us": 0.15,
            "T2_range_us": [0.02, 20.0],
            "tol": 1e-6,
        },
        "grid": {"span_in_T1": 12.0},
        "channel": {"L0_km": 0.06, "atten_db_per_km": 2.0, "phase_rate": 0.1},
        "outputs": {"directory": "out", "which": ["sender", "photonics", "receiver", "report"]},
    }


def _parse_amplitude(raw: Any, name: str) -> complex:
    if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
        raise ConfigError(f"initial_state.{name} must be a [re, im] pair")
    re_part, im_part = raw
    for v in (re_part, im_part):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"initial_state.{name} entries must be numbers")
    return complex(re_part, im_part)


def _parse_state(doc: dict) -> SuperpositionState:
    raw = _require(doc, "initial_state", "config")
    if not isinstance(raw, dict):
        raise ConfigError("initial_state must be a table of [re, im] pairs")
    c_m1 = _parse_amplitude(_require(raw, "c_m1", "initial_state"), "c_m1")
    c_0 = _parse_amplitude(_require(raw, "c_0", "initial_state"), "c_0")
    c_p1 = _parse_amplitude(raw.get("c_p1", [0.0, 0.0]), "c_p1")
    norm_sq = abs(c_m1) ** 2 + abs(c_0) ** 2 + abs(c_p1) ** 2
    if abs(norm_sq - 1.0) >= RENORM_TOL:
        raise ConfigError(
            f"initial_state norm is {norm_sq!r}; amplitudes must be "
            f"normalized to within {RENORM_TOL:g}"
        )
    if abs(norm_sq - 1.0) > 1e-15:
        # Decimal-literal drift below the rejection threshold is folded
        # back in, but not silently.
        warnings.warn(
            f"initial_state renormalized (norm deviation {norm_sq - 1.0:.2e})",
            stacklevel=2,
        )
        return SuperpositionState.normalized(c_m1, c_0, c_p1)
    return SuperpositionState(c_m1, c_0, c_p1)


def _parse_params(doc: dict) -> PhysicalParams:
    raw = _require(doc, "params", "config")
    if not isinstance(raw, dict):
        raise ConfigError("params must be a table")
    try:
        return PhysicalParams.from_mhz(
            g=_number(raw, "g_mhz", "params"),
            k=_number(raw, "k_mhz", "params"),
            gamma_sp=_number(raw, "gamma_sp_mhz", "params"),
            omega1=_number(raw, "omega1_mhz", "params"),
            omega2=_number(raw, "omega2_mhz", "params"),
            delta=_number(raw, "delta_mhz", "params"),
            delta_b_ground=_number(raw, "delta_b_ground_mhz", "params"),
            delta_b_excited=_number(raw, "delta_b_excited_mhz", "params"),
            phi2=_number(raw, "phi2_rad", "params", default=math.pi / 2),
            atom_mass=_number(raw, "atom_mass_kg", "params", default=RB87_MASS),
            wavelength=_number(raw, "wavelength_nm", "params", default=D2_WAVELENGTH * 1e9)
            * 1e-9,
        )
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from exc


def _parse_pulse1(doc: dict) -> Pulse1Config:
    raw = doc.get("pulse1", {})
    shape = raw.get("shape", "gaussian")
    if shape != "gaussian":
        raise ConfigError(f"pulse1.shape {shape!r} not supported in configs")
    return Pulse1Config(
        shape=shape,
        t1_us=_number(raw, "T1_us", "pulse1", default=0.3),
        center_us=_number(raw, "center_us", "pulse1", default=0.0),
    )


def _parse_pulse2(doc: dict) -> Pulse2Config:
    raw = doc.get("pulse2", {})
    mode = raw.get("mode", "solve")
    if mode not in ("solve", "explicit"):
        raise ConfigError(f"pulse2.mode must be 'solve' or 'explicit', got {mode!r}")
    family = raw.get("family", "gaussian")
    if family != "gaussian":
        raise ConfigError(f"pulse2.family {family!r} not supported")
    free = raw.get("free", "center")
    if free not in ("center", "amplitude"):
        raise ConfigError(f"pulse2.free must be 'center' or 'amplitude', got {free!r}")
    t2_range = raw.get("T2_range_us", [0.02, 20.0])
    if not (isinstance(t2_range, (list, tuple)) and len(t2_range) == 2):
        raise ConfigError("pulse2.T2_range_us must be [low, high]")
    center_range = raw.get("center_range_us")
    if center_range is not None and not (
        isinstance(center_range, (list, tuple)) and len(center_range) == 2
    ):
        raise ConfigError("pulse2.center_range_us must be [low, high]")
    cfg = Pulse2Config(
        mode=mode,
        family=family,
        free=free,
        tol=_number(raw, "tol", "pulse2", default=1e-6),
        center_us=(_number(raw, "center_us", "pulse2") if "center_us" in raw else None),
        t2_range_us=(float(t2_range[0]), float(t2_range[1])),
        center_range_us=(
            (float(center_range[0]), float(center_range[1])) if center_range else None
        ),
        t2_us=(_number(raw, "T2_us", "pulse2") if "T2_us" in raw else None),
        omega2_mhz=(_number(raw, "omega2_mhz", "pulse2") if "omega2_mhz" in raw else None),
        max_iterations=int(_number(raw, "max_iterations", "pulse2", default=80)),
    )
    if cfg.mode == "explicit" and cfg.t2_us is None:
        raise ConfigError("pulse2.mode = 'explicit' needs T2_us")
    if cfg.mode == "solve" and cfg.free == "amplitude" and cfg.center_us is None:
        raise ConfigError("pulse2.free = 'amplitude' needs a fixed center_us")
    return cfg


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a scenario document and convert to internal units."""
    if not isinstance(doc, dict):
        raise ConfigError("top-level config must be a JSON object")
    grid_raw = doc.get("grid", {})
    grid = GridConfig(
        span_in_t1=_number(grid_raw, "span_in_T1", "grid", default=12.0),
        points=(int(_number(grid_raw, "points", "grid")) if "points" in grid_raw else None),
    )
    if grid.n_points() < 2:
        raise ConfigError("grid.points must be at least 2")
    ch_raw = doc.get("channel", {})
    channel = ChannelConfig(
        length_km=_number(ch_raw, "L0_km", "channel", default=0.0),
        atten_db_per_km=_number(ch_raw, "atten_db_per_km", "channel", default=2.0),
        phase_rate=_number(ch_raw, "phase_rate", "channel", default=0.1),
        p_em=_number(ch_raw, "p_em", "channel", default=1.0),
        p_abs=_number(ch_raw, "p_abs", "channel", default=1.0),
    )
    out_raw = doc.get("outputs", {})
    which = out_raw.get("which", ["sender", "photonics", "receiver", "report"])
    if not isinstance(which, (list, tuple)):
        raise ConfigError("outputs.which must be a list")
    known = {"sender", "photonics", "receiver", "report", "regime"}
    for item in which:
        if item not in known:
            raise ConfigError(f"outputs.which contains unknown entry {item!r}")
    outputs = OutputsConfig(
        directory=out_raw.get("directory", "out"),
        which=tuple(which),
    )
    return ScenarioConfig(
        params=_parse_params(doc),
        initial_state=_parse_state(doc),
        pulse1=_parse_pulse1(doc),
        pulse2=_parse_pulse2(doc),
        grid=grid,
        channel=channel,
        outputs=outputs,
        regime_min_ratio=_number(doc, "regime_min_ratio", "config", default=5.0),
        strict=bool(doc.get("strict", False)),
        raw=doc,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a JSON scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return parse_config(doc)


def default_config(qutrit: bool = False) -> ScenarioConfig:
    """Parsed stock scenario."""
    return parse_config(default_config_dict(qutrit=qutrit))
