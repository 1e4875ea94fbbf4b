"""Deterministic fixed-step simulation of the corridor.

Every vehicle obeys the variable-speed planar kinematics

    x' = V cos(theta),  y' = V sin(theta),  a = V theta'

with speed V and lateral acceleration a as the control inputs.  States are
advanced with a classical fourth-order fixed-step integrator; commanded speed
takes effect instantly unless a slew limit is requested.  One scenario is one
single-threaded loop, so identical configurations replay bit-identically.

Scenario phases: the outgoing UAV rides its slot around the loiter circle
until the slot sweeps through the exit point D, a reinsertion plan is frozen
from the patch snapshot at that instant, speed commands are re-evaluated
every step while the UAV flies D->F->Q at its computed transit speed, and on
reaching Q it is handed over to the main lane and all speeds return to
nominal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .geometry import CorridorLayout, Path, build_layout, patch_bounds, wrap_pi
from .guidance import (PatchState, ReinsertionPlan, assign_speeds,
                       check_feasibility, classify_case, outgoing_speed,
                       plan_reinsertion)
from .slots import EXIT_ANGLE, SlotRing

LANE_MAIN = "main"
LANE_LOITER = "loiter"
LANE_TRANSIT = "outgoing-transit"

EVENT_SLOT_AT_EXIT = "slot-departure-at-D"
EVENT_PLAN = "plan-computed"
EVENT_COOPERATION = "cooperation-started"
EVENT_ENTER_LINK = "enter-transit-link"
EVENT_MERGED = "merged-at-Q"
EVENT_RESTORED = "speeds-restored"

OUTCOME_MERGED = "merged"
OUTCOME_LOITER = "loiter-continues"
OUTCOME_INCOMPLETE = "incomplete"

# Row layout of the per-step trajectory records (and of trajectories.csv).
TRAJECTORY_COLUMNS = ("t", "uav_id", "x", "y", "theta", "v", "a", "lane")


@dataclass(frozen=True)
class GuidanceCommand:
    v_cmd: float
    a_cmd: float


@dataclass(frozen=True)
class UavState:
    x: float
    y: float
    theta: float
    v: float
    lane: str
    path_s: float = 0.0


def step(state: UavState, cmd: GuidanceCommand, dt: float,
         v_min: float | None = None, v_max: float | None = None,
         max_accel: float | None = None) -> UavState:
    """Advance one vehicle by dt under (v_cmd, a_cmd).

    Speed is a direct input; pass max_accel to rate-limit it instead (off by
    default).  dt may be zero (state is returned unchanged) but not negative.
    """
    if dt < 0.0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    v = cmd.v_cmd
    if v_min is not None and v_max is not None and not v_min <= v <= v_max:
        raise ValueError(f"v_cmd={v} outside [{v_min}, {v_max}]")
    if v <= 0.0:
        raise ValueError(f"v_cmd must be positive, got {v}")
    if dt == 0.0:
        return state
    if max_accel is not None:
        dv = max_accel * dt
        v = min(max(v, state.v - dv), state.v + dv)

    omega = cmd.a_cmd / v

    def deriv(theta: float) -> tuple[float, float, float]:
        return v * math.cos(theta), v * math.sin(theta), omega

    k1 = deriv(state.theta)
    k2 = deriv(state.theta + 0.5 * dt * k1[2])
    k3 = deriv(state.theta + 0.5 * dt * k2[2])
    k4 = deriv(state.theta + dt * k3[2])
    x = state.x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    y = state.y + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    theta = wrap_pi(state.theta + dt * omega)
    return replace(state, x=x, y=y, theta=theta, v=v,
                   path_s=state.path_s + v * dt)


def follow_path(state: UavState, path: Path, v_cmd: float,
                gain_cross: float = 1.0, gain_heading: float = 1.4) -> GuidanceCommand:
    """Lateral-acceleration command tracking the path at the state's arc length.

    Curvature feedforward plus a proportional correction on cross-track and
    heading error; with an exact on-path initialisation the feedforward alone
    tracks lines and arcs.
    """
    pos, tangent, curvature = path.point_at(state.path_s)
    nx, ny = -tangent[1], tangent[0]
    cross = (state.x - pos[0]) * nx + (state.y - pos[1]) * ny
    heading_err = wrap_pi(state.theta - math.atan2(tangent[1], tangent[0]))
    a = v_cmd * v_cmd * curvature \
        - gain_cross * cross - gain_heading * v_cmd * heading_err
    return GuidanceCommand(v_cmd=v_cmd, a_cmd=a)


# ---------------------------------------------------------------------------
# Safety monitoring
# ---------------------------------------------------------------------------

@dataclass
class SafetyReport:
    """Pairwise-separation summary of a run."""

    d_safe: float
    min_separation: float = math.inf
    min_time: float | None = None
    min_pair: tuple | None = None
    violating_pair: tuple | None = None     # (uav_a, uav_b, time) of first breach
    series: list = field(default_factory=list)  # (t, per-step min) tuples

    @property
    def violated(self) -> bool:
        return self.violating_pair is not None


class SafetyMonitor:
    """Accumulates pairwise Euclidean separations step by step.

    Exactly the safety distance is compliant.  The cooperative speed guards
    steer gaps asymptotically onto that boundary, so separations within
    BOUNDARY_SLACK of it are treated as on it rather than below it.
    """

    BOUNDARY_SLACK = 1e-6

    def __init__(self, d_safe: float):
        self.report = SafetyReport(d_safe=d_safe)

    def update(self, t: float, positions: list) -> None:
        """positions: list of (uav_id, x, y); needs at least two entries to act."""
        report = self.report
        step_min = math.inf
        step_pair = None
        for i in range(len(positions)):
            id_a, xa, ya = positions[i]
            for j in range(i + 1, len(positions)):
                id_b, xb, yb = positions[j]
                d = math.hypot(xb - xa, yb - ya)
                if d < step_min:
                    step_min = d
                    step_pair = (id_a, id_b)
        if step_pair is None:
            return
        report.series.append((t, step_min))
        if step_min < report.min_separation:
            report.min_separation = step_min
            report.min_time = t
            report.min_pair = step_pair
        if (step_min < report.d_safe - self.BOUNDARY_SLACK
                and report.violating_pair is None):
            report.violating_pair = (step_pair[0], step_pair[1], t)


@dataclass
class SimEvent:
    time: float
    kind: str
    data: dict = field(default_factory=dict)


@dataclass
class ScenarioResult:
    rows: list                # trajectory records, see TRAJECTORY_COLUMNS
    events: list              # SimEvent, time-ordered
    safety: SafetyReport
    metrics: dict
    layout: CorridorLayout

    def states_of(self, uav_id: str) -> list:
        return [r for r in self.rows if r[1] == uav_id]


# ---------------------------------------------------------------------------
# Scenario execution
# ---------------------------------------------------------------------------

OUTGOING_ID = "out"


def run_scenario(config) -> ScenarioResult:
    """Run one scenario to completion, recording everything at each step."""
    params = config.corridor_params()
    layout = build_layout(params)
    d_p_min, d_p_max = patch_bounds(layout, params)
    l_out = layout.l_out
    x_q, _ = layout.point_q
    main_y = layout.main_y
    dt = config.dt

    ring = SlotRing(n_slots=params.n_slots, slot_speed=params.v_s,
                    r_loiter=params.r_loiter, phase0=config.phase0)
    ring = ring.occupy(config.outgoing_slot, OUTGOING_ID)
    holders = []
    for slot in config.occupied_slots:
        uid = f"hold{slot}"
        ring = ring.occupy(slot, uid)
        holders.append((uid, slot))

    # The planning instant is the first step boundary at or after the slot's
    # analytic pass through D; the whole event chain hangs off it.
    t_exit_exact = ring.next_departure_time(config.outgoing_slot, 0.0, EXIT_ANGLE)
    k_exit = math.ceil(t_exit_exact / dt - 1e-9)
    t_plan = k_exit * dt

    main_ids, dist0 = _initial_main_distances(config, d_p_min, t_plan)

    states: dict[str, UavState] = {}
    for uid, d0 in zip(main_ids, dist0):
        states[uid] = UavState(x=x_q - d0, y=main_y, theta=0.0,
                               v=params.v_m, lane=LANE_MAIN)
    states[OUTGOING_ID] = _slot_state(ring, config.outgoing_slot, 0.0, params.v_s)
    for uid, slot in holders:
        states[uid] = _slot_state(ring, slot, 0.0, params.v_s)

    monitor = SafetyMonitor(params.d_safe)
    events: list[SimEvent] = []
    rows: list = []
    plan: ReinsertionPlan | None = None
    patch_ids: list[str] = []
    case = None
    v_out = None
    merge_time = None
    cooperation_seen = False
    link_entered = False
    n_steps = int(round(config.max_time / dt))
    if k_exit > n_steps:
        raise ValueError("max_time ends before the outgoing slot reaches D")

    def frame_distance(uid: str, t: float) -> float:
        # Patch-frame coordinate: distance-to-go corrected back to plan time.
        return (x_q - states[uid].x) + params.v_m * (t - t_plan)

    for k in range(n_steps + 1):
        t = k * dt

        if k == k_exit:
            members = sorted(
                (uid for uid in main_ids
                 if d_p_min <= x_q - states[uid].x <= d_p_max),
                key=lambda uid: x_q - states[uid].x)
            patch_ids = members
            patch = PatchState(
                distances_to_go=tuple(x_q - states[uid].x for uid in members),
                speeds=tuple(states[uid].v for uid in members),
                d_p_min=d_p_min, d_p_max=d_p_max)
            events.append(SimEvent(t, EVENT_SLOT_AT_EXIT,
                                   {"uav": OUTGOING_ID,
                                    "slot": config.outgoing_slot}))
            if check_feasibility(patch, params.d_safe):
                case = classify_case(patch, params.d_safe)
                plan = plan_reinsertion(patch, params.d_safe, params.v_m)
                v_out = outgoing_speed(plan.t_out, l_out, params.v_min, params.v_max)
                events.append(SimEvent(t, EVENT_PLAN, {
                    "uav": OUTGOING_ID, "outcome": "insert", "case": case,
                    "t_out": plan.t_out, "target_s": plan.target_s,
                    "h": plan.h, "v_out": v_out, "m": patch.m}))
                ring = ring.release(config.outgoing_slot)
                dx, dy = layout.point_d
                # Departure is grid-aligned but the slot passed D a fraction
                # of a step earlier; starting that far along the path keeps
                # the rendezvous on the planned instant.
                states[OUTGOING_ID] = UavState(
                    x=dx, y=dy, theta=-0.5 * math.pi,
                    v=v_out, lane=LANE_TRANSIT,
                    path_s=(t_plan - t_exit_exact) * v_out)
            else:
                plan = ReinsertionPlan()
                events.append(SimEvent(t, EVENT_PLAN, {
                    "uav": OUTGOING_ID, "outcome": "loiter", "m": patch.m}))

        # Commands for this step.
        commands: dict[str, GuidanceCommand] = {}
        cooperating = (plan is not None and plan.is_insert
                       and merge_time is None and patch_ids)
        if cooperating:
            current = sorted(patch_ids, key=lambda uid: frame_distance(uid, t))
            live_patch = PatchState(
                distances_to_go=tuple(frame_distance(uid, t) for uid in current),
                speeds=tuple(states[uid].v for uid in current),
                d_p_min=d_p_min, d_p_max=d_p_max)
            cmd_set = assign_speeds(live_patch, plan, params.d_safe, params.v_m,
                                    params.v_min, params.v_max, l_out)
            for uid, v_i in zip(current, cmd_set.v_main):
                commands[uid] = GuidanceCommand(v_cmd=v_i, a_cmd=0.0)
            if (not cooperation_seen
                    and any(v_i != params.v_m for v_i in cmd_set.v_main)):
                cooperation_seen = True
                events.append(SimEvent(t, EVENT_COOPERATION,
                                       {"h": plan.h,
                                        "v_main": list(cmd_set.v_main)}))
        for uid in main_ids:
            if uid not in commands:
                commands[uid] = GuidanceCommand(v_cmd=params.v_m, a_cmd=0.0)
        out_state = states[OUTGOING_ID]
        if out_state.lane == LANE_LOITER:
            commands[OUTGOING_ID] = follow_path(out_state, layout.loiter_circle,
                                                params.v_s)
        elif out_state.lane == LANE_TRANSIT:
            commands[OUTGOING_ID] = follow_path(out_state, layout.outgoing_path,
                                                v_out)
        else:
            commands[OUTGOING_ID] = GuidanceCommand(v_cmd=params.v_m, a_cmd=0.0)
        for uid, _slot in holders:
            commands[uid] = follow_path(states[uid], layout.loiter_circle,
                                        params.v_s)

        for uid, state in states.items():
            cmd = commands[uid]
            rows.append((t, uid, state.x, state.y, state.theta,
                         cmd.v_cmd, cmd.a_cmd, state.lane))
        monitor.update(t, [(uid, s.x, s.y) for uid, s in states.items()])

        if k == n_steps:
            break

        for uid in states:
            states[uid] = step(states[uid], commands[uid], dt,
                               params.v_min, params.v_max)

        out_state = states[OUTGOING_ID]
        if out_state.lane == LANE_TRANSIT:
            t_next = (k + 1) * dt
            seg_len = layout.outgoing_path.primitives[0].length
            if not link_entered and out_state.path_s >= seg_len:
                link_entered = True
                events.append(SimEvent(t_next, EVENT_ENTER_LINK,
                                       {"uav": OUTGOING_ID}))
            if out_state.path_s >= l_out:
                merge_time = t_next
                overshoot = out_state.path_s - l_out
                states[OUTGOING_ID] = UavState(
                    x=x_q + overshoot, y=main_y, theta=0.0,
                    v=params.v_m, lane=LANE_MAIN)
                events.append(SimEvent(t_next, EVENT_MERGED,
                                       {"uav": OUTGOING_ID,
                                        "target_s": plan.target_s,
                                        "planned": t_plan + plan.t_out}))
                events.append(SimEvent(t_next, EVENT_RESTORED,
                                       {"v_m": params.v_m}))

    if merge_time is not None:
        outcome = OUTCOME_MERGED
    elif plan is not None and not plan.is_insert:
        outcome = OUTCOME_LOITER
    else:
        outcome = OUTCOME_INCOMPLETE

    report = monitor.report
    metrics = {
        "outcome": outcome,
        "t_slot_exit": t_plan,
        "m_patch": len(patch_ids),
        "case": case,
        "t_out": plan.t_out if plan is not None else None,
        "target_s": plan.target_s if plan is not None else None,
        "h": plan.h if plan is not None else None,
        "v_out": v_out,
        "merge_time": merge_time,
        "min_separation": report.min_separation,
        "min_separation_time": report.min_time,
        "min_separation_pair": report.min_pair,
        "violation": report.violated,
    }
    return ScenarioResult(rows=rows, events=events, safety=report,
                          metrics=metrics, layout=layout)


def _slot_state(ring: SlotRing, slot: int, t: float, v_s: float) -> UavState:
    """Kinematic state of a vehicle riding its slot at time t."""
    phi = ring.slot_angle(slot, t)
    x, y = ring.slot_position(slot, t)
    return UavState(x=x, y=y, theta=wrap_pi(phi + 0.5 * math.pi), v=v_s,
                    lane=LANE_LOITER, path_s=ring.r_loiter * phi)


def _initial_main_distances(config, d_p_min: float, t_plan: float):
    """Distance-to-go of each main-lane vehicle at t=0, downstream first.

    main_positions are already t=0 values.  main_gaps describe the patch at
    the planning instant, so they are anchored at d_p_min and shifted back by
    the nominal drift accumulated until then.
    """
    if config.main_positions is not None:
        dists = list(config.main_positions)
    elif config.main_gaps is not None:
        dists = []
        acc = d_p_min
        for gap in config.main_gaps:
            acc += gap
            dists.append(acc + config.v_m * t_plan)
    else:
        dists = []
    ids = [f"m{i:02d}" for i in range(1, len(dists) + 1)]
    return ids, dists
