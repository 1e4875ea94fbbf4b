"""Reinsertion planning: where and when the outgoing UAV joins the main lane.

Coordinates live on the "distance-to-go" axis: how far a main-lane point must
still travel to reach the merge point Q, measured at planning time.  The
feasible patch is the window [d_p_min, d_p_max] on that axis; index 1 is the
most downstream vehicle (smallest distance-to-go) and the "start of the
strip" is the d_p_min end.  Gap i sits between vehicle i and vehicle i+1,
with gap 0 running from the strip start to vehicle 1 and gap m from vehicle m
to the strip end.

The planner scans gaps from the strip start and takes the first one that is
wide enough on its own (end gaps need d_safe of room, interior gaps need
2*d_safe so the newcomer keeps d_safe to both neighbours).  If nothing fits,
it picks the widest gap, has everything downstream of it speed up and
everything at or above it slow down, and times the merge for a point one
d_safe below where the slowed block packs against the strip end.
"""

from __future__ import annotations

from dataclasses import dataclass

FREE_GAP = "free-gap"
NEEDS_COOPERATION = "needs-cooperation"


@dataclass(frozen=True)
class PatchState:
    """Snapshot of the main-lane vehicles inside the feasible patch.

    distances_to_go must be sorted ascending.  Containment in
    [d_p_min, d_p_max] is required when planning (checked there); transient
    re-evaluations during a cooperative manoeuvre may momentarily sit a few
    centimetres outside, so it is not enforced at construction.
    """

    distances_to_go: tuple
    speeds: tuple
    d_p_min: float
    d_p_max: float

    def __post_init__(self) -> None:
        if len(self.distances_to_go) != len(self.speeds):
            raise ValueError("one speed per vehicle is required")
        if any(b < a for a, b in zip(self.distances_to_go, self.distances_to_go[1:])):
            raise ValueError("distances_to_go must be sorted ascending")
        if self.d_p_max < self.d_p_min:
            raise ValueError("d_p_max must be >= d_p_min")

    @property
    def m(self) -> int:
        return len(self.distances_to_go)

    @property
    def patch_length(self) -> float:
        return self.d_p_max - self.d_p_min

    @property
    def gaps(self) -> tuple:
        """The m+1 gaps, from the d_p_min end upward.  They sum to patch_length."""
        s = self.distances_to_go
        if not s:
            return (self.d_p_max - self.d_p_min,)
        inner = tuple(b - a for a, b in zip(s, s[1:]))
        return (s[0] - self.d_p_min,) + inner + (self.d_p_max - s[-1],)


@dataclass(frozen=True)
class ReinsertionPlan:
    """Outcome of the gap scan: either a merge target or keep loitering.

    For an insert outcome t_out is the transit time from D to Q, target_s the
    merge point on the distance-to-go axis (v_m * t_out), and h the index of
    the gap to be opened cooperatively (None when a free gap was found).
    """

    t_out: float | None = None
    target_s: float | None = None
    h: int | None = None
    requires_cooperation: bool = False

    @property
    def is_insert(self) -> bool:
        return self.t_out is not None


@dataclass(frozen=True)
class SpeedCommandSet:
    """Commanded speeds: transit speed for the newcomer, one speed per patch vehicle."""

    v_out: float
    v_main: tuple


def check_feasibility(patch: PatchState, d_safe: float) -> bool:
    """True when the patch can hold one more vehicle: patch_length >= m * d_safe."""
    return patch.patch_length >= patch.m * d_safe


def classify_case(patch: PatchState, d_safe: float) -> str:
    """FREE_GAP when some gap is usable as-is, else NEEDS_COOPERATION.

    An end gap is usable above d_safe, an interior gap above 2*d_safe.
    """
    gaps = patch.gaps
    m = patch.m
    if gaps[0] > d_safe or gaps[m] > d_safe:
        return FREE_GAP
    if any(g > 2.0 * d_safe for g in gaps[1:m]):
        return FREE_GAP
    return NEEDS_COOPERATION


def plan_reinsertion(patch: PatchState, d_safe: float, v_m: float) -> ReinsertionPlan:
    """Choose the merge time and, if needed, the gap to open cooperatively.

    Must only be called on a feasible patch (see check_feasibility); raises
    ValueError otherwise.  The scan runs from the strip start and returns on
    the first usable gap, so plans are deterministic.
    """
    if not check_feasibility(patch, d_safe):
        raise ValueError(
            f"infeasible patch: length {patch.patch_length:.3f} < "
            f"{patch.m} * {d_safe}")
    for s in patch.distances_to_go:
        if not patch.d_p_min - 1e-9 <= s <= patch.d_p_max + 1e-9:
            raise ValueError(f"vehicle at {s!r} outside the patch window")

    gaps = patch.gaps
    m = patch.m
    s = patch.distances_to_go
    for i in range(m + 1):
        if i == 0:
            if gaps[0] > d_safe:
                t_out = patch.d_p_min / v_m
                return ReinsertionPlan(t_out=t_out, target_s=v_m * t_out)
        elif i == m:
            if gaps[m] > d_safe:
                t_out = patch.d_p_max / v_m
                return ReinsertionPlan(t_out=t_out, target_s=v_m * t_out)
        elif gaps[i] > 2.0 * d_safe:
            t_out = (s[i - 1] + s[i]) / (2.0 * v_m)
            return ReinsertionPlan(t_out=t_out, target_s=v_m * t_out)

    h = max(range(m + 1), key=lambda i: (gaps[i], -i))
    t_out = cooperative_merge_time(patch.d_p_max, m, h, d_safe, v_m)
    return ReinsertionPlan(t_out=t_out, target_s=v_m * t_out, h=h,
                           requires_cooperation=True)


def cooperative_merge_time(d_p_max: float, m: int, h: int, d_safe: float,
                           v_m: float) -> float:
    """Merge time when gap h must be opened by re-speeding the patch vehicles.

    Vehicles h..m slow down until they pack at d_safe spacing against the
    d_p_max end; the merge point sits d_safe below the last packed vehicle.
    Gap 0 has no vehicle below it, so the packed block is vehicles 1..m and
    the h=0 offset matches h=1; without that the target could leave the
    reachable window whenever patch_length < (m+1) * d_safe.
    """
    last_packed = max(h, 1)
    return (d_p_max - ((m + 1) - last_packed) * d_safe) / v_m


def outgoing_speed(t_out: float, l_out: float, v_min: float, v_max: float) -> float:
    """Constant transit speed covering the outgoing path in t_out seconds.

    Merge times inside [d_p_min/v_m, d_p_max/v_m] map onto [v_min, v_max] by
    construction of the patch bounds; anything further out than floating-point
    noise indicates a planner bug and raises.
    """
    if t_out <= 0.0:
        raise ValueError(f"t_out must be positive, got {t_out}")
    v = l_out / t_out
    slack = 1e-9 * v_max
    if v < v_min - slack or v > v_max + slack:
        raise ValueError(
            f"commanded transit speed {v:.6f} outside [{v_min}, {v_max}]")
    return min(max(v, v_min), v_max)


def assign_speeds(patch: PatchState, plan: ReinsertionPlan, d_safe: float,
                  v_m: float, v_min: float, v_max: float,
                  l_out: float) -> SpeedCommandSet:
    """Speed commands for the newcomer and every patch vehicle.

    With a free gap everyone keeps the nominal speed.  Otherwise vehicles
    below gap h speed up while they still have more than d_safe of room ahead
    (any room at all for vehicle 1, whose room ends at the strip start), and
    vehicles at or above h slow down while they have more than d_safe of room
    behind (any room for vehicle m, whose room ends at the strip end).  Gaps
    shrink as the manoeuvre proceeds, so re-evaluating each control step makes
    commands fall back to v_m exactly when the guard room is consumed.
    """
    if not plan.is_insert:
        raise ValueError("assign_speeds requires an insert plan")
    v_out = outgoing_speed(plan.t_out, l_out, v_min, v_max)
    if plan.h is None:
        return SpeedCommandSet(v_out=v_out, v_main=(v_m,) * patch.m)

    gaps = patch.gaps
    m = patch.m
    h = plan.h
    v_main = []
    for i in range(1, m + 1):
        v_i = v_m
        if i < h:
            ahead = gaps[i - 1]
            if (ahead > d_safe and i > 1) or (ahead > 0.0 and i == 1):
                v_i = v_max
        else:
            behind = gaps[i]
            if (behind > d_safe and i < m) or (behind > 0.0 and i == m):
                v_i = v_min
        v_main.append(v_i)
    return SpeedCommandSet(v_out=v_out, v_main=tuple(v_main))
