"""Guidance and deterministic simulation for corridor loiter-lane reinsertion."""

from .geometry import (Arc, CorridorLayout, CorridorParams, Path, Segment,
                       build_layout, loiter_radius, loiter_separation,
                       patch_bounds, patch_length_from_separation, wrap_pi,
                       wrap_two_pi)
from .guidance import (FREE_GAP, NEEDS_COOPERATION, PatchState,
                       ReinsertionPlan, SpeedCommandSet, assign_speeds,
                       check_feasibility, classify_case,
                       cooperative_merge_time, outgoing_speed,
                       plan_reinsertion)
from .scenario import ConfigError, ScenarioConfig, load_config, write_config
from .sim import (GuidanceCommand, SafetyMonitor, SafetyReport, ScenarioResult,
                  SimEvent, UavState, follow_path, run_scenario, step)
from .slots import SlotRing

__version__ = "0.1.0"

__all__ = [
    "Arc", "ConfigError", "CorridorLayout", "CorridorParams", "FREE_GAP",
    "GuidanceCommand", "NEEDS_COOPERATION", "Path", "PatchState",
    "ReinsertionPlan", "SafetyMonitor", "SafetyReport", "ScenarioConfig",
    "ScenarioResult", "Segment", "SimEvent", "SlotRing", "SpeedCommandSet",
    "UavState", "assign_speeds", "build_layout", "check_feasibility",
    "classify_case", "cooperative_merge_time", "follow_path", "load_config",
    "loiter_radius", "loiter_separation", "outgoing_speed", "patch_bounds",
    "patch_length_from_separation", "plan_reinsertion", "run_scenario", "step",
    "wrap_pi", "wrap_two_pi", "write_config",
]
