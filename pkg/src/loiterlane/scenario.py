"""Scenario files: flat key = value text, one scenario per file.

Lists are comma-separated, `#` starts a comment, and schema_version pins the
layout.  Exactly one of d_loiter / patch_length is needed (the other is
derived); supplying both is allowed only when they agree to 1e-6 relative.
main_positions gives distance-to-go values at t=0, whereas main_gaps lays the
patch out gap-by-gap at the instant the outgoing slot reaches the exit point
(much handier when designing a particular gap structure).
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .geometry import CorridorParams

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Scenario file rejected; message names the offending field."""


@dataclass(frozen=True)
class ScenarioConfig:
    v_min: float
    v_max: float
    v_m: float
    n_slots: int
    d_safe: float
    r_transit: float
    outgoing_slot: int
    v_s: float | None = None
    d_loiter: float | None = None
    patch_length: float | None = None
    main_positions: tuple | None = None
    main_gaps: tuple | None = None
    phase0: float = 0.0
    occupied_slots: tuple = ()
    dt: float = 0.01
    max_time: float = 60.0
    out_dir: str | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(
                f"schema_version: expected {SCHEMA_VERSION}, got {self.schema_version}")
        if self.v_s is None:
            object.__setattr__(self, "v_s", self.v_m)
        # Corridor validity (speed ordering, feasible separation, consistency
        # of a doubly-specified corridor) is delegated to CorridorParams,
        # which also fills whichever of d_loiter / patch_length was omitted.
        try:
            params = self.corridor_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        object.__setattr__(self, "d_loiter", params.d_loiter)
        object.__setattr__(self, "patch_length", params.patch_length)
        if not 1 <= self.outgoing_slot <= self.n_slots:
            raise ConfigError(
                f"outgoing_slot: {self.outgoing_slot} outside [1, {self.n_slots}]")
        for slot in self.occupied_slots:
            if not 1 <= slot <= self.n_slots:
                raise ConfigError(f"occupied_slots: {slot} outside [1, {self.n_slots}]")
        if len(set(self.occupied_slots)) != len(self.occupied_slots):
            raise ConfigError("occupied_slots: duplicate slot")
        if self.outgoing_slot in self.occupied_slots:
            raise ConfigError(
                f"occupied_slots: slot {self.outgoing_slot} already holds the outgoing UAV")
        if self.main_positions is not None and self.main_gaps is not None:
            raise ConfigError("give main_positions or main_gaps, not both")
        if self.main_positions is not None:
            if any(b < a for a, b in zip(self.main_positions, self.main_positions[1:])):
                raise ConfigError("main_positions: must be sorted ascending")
            if any(p < 0.0 for p in self.main_positions):
                raise ConfigError("main_positions: negative distance-to-go")
        if self.main_gaps is not None:
            if any(g < 0.0 for g in self.main_gaps):
                raise ConfigError("main_gaps: negative gap")
            if sum(self.main_gaps) > params.patch_length + 1e-9:
                raise ConfigError(
                    f"main_gaps: sum {sum(self.main_gaps):.3f} exceeds the "
                    f"patch length {params.patch_length:.3f}")
        if self.dt <= 0.0:
            raise ConfigError(f"dt: must be positive, got {self.dt}")
        if self.max_time <= 0.0:
            raise ConfigError(f"max_time: must be positive, got {self.max_time}")

    def corridor_params(self) -> CorridorParams:
        return CorridorParams(
            v_min=self.v_min, v_max=self.v_max, v_m=self.v_m, v_s=self.v_s,
            n_slots=self.n_slots, d_safe=self.d_safe, r_transit=self.r_transit,
            d_loiter=self.d_loiter, patch_length=self.patch_length)


_FLOAT_KEYS = {"v_min", "v_max", "v_m", "v_s", "d_safe", "r_transit",
               "d_loiter", "patch_length", "phase0", "dt", "max_time"}
_INT_KEYS = {"schema_version", "n_slots", "outgoing_slot"}
_FLOAT_LIST_KEYS = {"main_positions", "main_gaps"}
_INT_LIST_KEYS = {"occupied_slots"}
_STR_KEYS = {"out_dir"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _FLOAT_LIST_KEYS | _INT_LIST_KEYS | _STR_KEYS
_REQUIRED_KEYS = {"schema_version", "v_min", "v_max", "v_m", "n_slots",
                  "d_safe", "r_transit", "outgoing_slot"}


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario file."""
    raw: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value

    missing = _REQUIRED_KEYS - raw.keys()
    if missing:
        raise ConfigError(f"{path}: missing required keys: {sorted(missing)}")
    if "d_loiter" not in raw and "patch_length" not in raw:
        raise ConfigError(f"{path}: one of d_loiter or patch_length is required")

    kwargs: dict = {}
    for key, value in raw.items():
        try:
            if key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            elif key in _INT_KEYS:
                kwargs[key] = int(value)
            elif key in _FLOAT_LIST_KEYS:
                kwargs[key] = _parse_list(value, float)
            elif key in _INT_LIST_KEYS:
                kwargs[key] = _parse_list(value, int)
            else:
                kwargs[key] = value
        except ValueError as exc:
            raise ConfigError(f"{path}: {key}: {exc}") from exc
    return ScenarioConfig(**kwargs)


def _parse_list(value: str, kind) -> tuple:
    parts = [p.strip() for p in value.split(",")]
    return tuple(kind(p) for p in parts if p)


def write_config(config: ScenarioConfig, path) -> None:
    """Emit a scenario file that load_config parses back to an equal config."""
    lines = []
    for f in fields(ScenarioConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            if not value:
                continue
            rendered = ", ".join(_render(v) for v in value)
        else:
            rendered = _render(value)
        lines.append(f"{f.name} = {rendered}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _render(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)
