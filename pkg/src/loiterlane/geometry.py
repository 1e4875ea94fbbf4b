"""Planar corridor geometry: design equations, lane layout, and path evaluation.

The corridor couples a straight main lane with a circular loiter lane through
two transit connections.  The outgoing side (the one modelled here in full)
leaves the loiter circle at point D, runs down a straight transit lane to F,
and joins the main lane tangentially at Q through a quarter-circle transit
link centred at A.  All distances are metres, speeds m/s, angles radians.

Canonical placement (the drawings only fix the topology, so the frame is
pinned here once and for all):

* loiter centre O at the origin, traversal counterclockwise;
* exit point D = (-R_L, 0) with exit tangent (0, -1);
* transit lane D->F vertical, length d_L + R_L;
* quarter arc F->Q of radius R_T centred at A = (-R_L + R_T, -(d_L + R_L));
* main lane is the line y = -(d_L + R_L + R_T), directed +x.

The entry-side points E, C, I mirror the outgoing side about the y axis and
exist for drawing completeness only; no entry guidance lives in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

Point = tuple[float, float]


def wrap_pi(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle, TWO_PI)
    if a > math.pi:
        a -= TWO_PI
    elif a <= -math.pi:
        a += TWO_PI
    return a


def wrap_two_pi(angle: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    return 0.0 if a == TWO_PI else a


# ---------------------------------------------------------------------------
# Path primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """Directed straight segment."""

    start: Point
    end: Point

    @property
    def length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])

    def point_at(self, s: float) -> tuple[Point, Point, float]:
        """Return (position, unit tangent, curvature) at arc length s."""
        length = self.length
        tx = (self.end[0] - self.start[0]) / length
        ty = (self.end[1] - self.start[1]) / length
        return (self.start[0] + tx * s, self.start[1] + ty * s), (tx, ty), 0.0


@dataclass(frozen=True)
class Arc:
    """Directed circular arc.  Positive sweep turns counterclockwise."""

    center: Point
    radius: float
    start_angle: float
    sweep: float

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def point_at(self, s: float) -> tuple[Point, Point, float]:
        direction = 1.0 if self.sweep >= 0.0 else -1.0
        phi = self.start_angle + direction * s / self.radius
        pos = (self.center[0] + self.radius * math.cos(phi),
               self.center[1] + self.radius * math.sin(phi))
        tangent = (-direction * math.sin(phi), direction * math.cos(phi))
        return pos, tangent, direction / self.radius


@dataclass(frozen=True)
class Path:
    """Ordered chain of primitives, optionally closed (periodic in arc length)."""

    primitives: tuple
    closed: bool = False

    @property
    def length(self) -> float:
        return sum(p.length for p in self.primitives)

    def point_at(self, s: float) -> tuple[Point, Point, float]:
        """Evaluate (position, tangent, curvature) at arc length s.

        On a closed path s wraps modulo the total length.  On an open path s
        must lie within [0, length] (a few ulps of slack are tolerated).  At
        an interior junction the earlier primitive wins.
        """
        total = self.length
        if self.closed:
            s = math.fmod(s, total)
            if s < 0.0:
                s += total
        else:
            if s < -1e-9 or s > total + 1e-9:
                raise ValueError(f"arc length {s!r} outside [0, {total!r}]")
            s = min(max(s, 0.0), total)
        acc = 0.0
        for prim in self.primitives:
            if s <= acc + prim.length + 1e-12:
                return prim.point_at(min(s - acc, prim.length))
            acc += prim.length
        return self.primitives[-1].point_at(self.primitives[-1].length)


# ---------------------------------------------------------------------------
# Design equations
# ---------------------------------------------------------------------------

def loiter_radius(n_slots: int, d_safe: float) -> float:
    """Loiter-circle radius holding n_slots equiangular slots d_safe apart.

    R = d_safe / (2 sin^2(pi/N)).  The squared sine is deliberate: with it the
    reference design row (N=6, d_safe=50) lands on 100 m, which a plain-chord
    rule would not.
    """
    if n_slots < 2:
        raise ValueError(f"n_slots must be >= 2, got {n_slots}")
    if d_safe <= 0.0:
        raise ValueError(f"d_safe must be positive, got {d_safe}")
    return d_safe / (2.0 * math.sin(math.pi / n_slots) ** 2)


def loiter_separation(patch_length: float, v_m: float, v_min: float,
                      v_max: float, r_transit: float, r_loiter: float) -> float:
    """Lateral gap between the transit-link centre level and the loiter circle.

    Derived by requiring the speed band [v_min, v_max] to sweep exactly a
    patch of the given length on the main lane:

        d_L = patch_length / (v_m (1/v_min - 1/v_max)) - pi r_transit / 2 - r_loiter

    Raises ValueError when the parameters admit no positive separation.
    """
    _check_speed_band(v_min, v_max)
    if patch_length <= 0.0 or v_m <= 0.0 or r_transit <= 0.0 or r_loiter <= 0.0:
        raise ValueError("patch_length, v_m, r_transit and r_loiter must be positive")
    d = patch_length / (v_m * (1.0 / v_min - 1.0 / v_max)) \
        - math.pi * r_transit / 2.0 - r_loiter
    if d <= 0.0:
        raise ValueError(
            f"infeasible corridor: loiter separation {d:.3f} m is not positive "
            f"for patch_length={patch_length}")
    return d


def patch_length_from_separation(d_loiter: float, v_m: float, v_min: float,
                                 v_max: float, r_transit: float,
                                 r_loiter: float) -> float:
    """Inverse of loiter_separation: main-lane patch length swept by the speed band."""
    _check_speed_band(v_min, v_max)
    if d_loiter <= 0.0:
        raise ValueError(f"d_loiter must be positive, got {d_loiter}")
    out_length = math.pi * r_transit / 2.0 + d_loiter + r_loiter
    return v_m * out_length * (1.0 / v_min - 1.0 / v_max)


def _check_speed_band(v_min: float, v_max: float) -> None:
    if not 0.0 < v_min < v_max:
        raise ValueError(f"need 0 < v_min < v_max, got v_min={v_min}, v_max={v_max}")


# ---------------------------------------------------------------------------
# Corridor parameters and layout
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorridorParams:
    """Corridor design inputs.

    Exactly one of d_loiter / patch_length may be omitted; the missing one is
    filled from the other.  If both are supplied they must agree to 1e-6
    relative, mirroring the scenario-file contract.
    """

    v_min: float
    v_max: float
    v_m: float
    v_s: float
    n_slots: int
    d_safe: float
    r_transit: float
    d_loiter: float | None = None
    patch_length: float | None = None

    def __post_init__(self) -> None:
        _check_speed_band(self.v_min, self.v_max)
        if not self.v_min <= self.v_m <= self.v_max:
            raise ValueError(f"v_m={self.v_m} outside [{self.v_min}, {self.v_max}]")
        if not self.v_min <= self.v_s <= self.v_max:
            raise ValueError(f"v_s={self.v_s} outside [{self.v_min}, {self.v_max}]")
        if self.n_slots < 2:
            raise ValueError(f"n_slots must be >= 2, got {self.n_slots}")
        if self.d_safe <= 0.0:
            raise ValueError(f"d_safe must be positive, got {self.d_safe}")
        if self.r_transit <= 0.0:
            raise ValueError(f"r_transit must be positive, got {self.r_transit}")
        r_l = loiter_radius(self.n_slots, self.d_safe)
        if self.d_loiter is None and self.patch_length is None:
            raise ValueError("one of d_loiter or patch_length is required")
        if self.d_loiter is None:
            object.__setattr__(self, "d_loiter", loiter_separation(
                self.patch_length, self.v_m, self.v_min, self.v_max,
                self.r_transit, r_l))
        elif self.patch_length is None:
            if self.d_loiter <= 0.0:
                raise ValueError(f"d_loiter must be positive, got {self.d_loiter}")
            object.__setattr__(self, "patch_length", patch_length_from_separation(
                self.d_loiter, self.v_m, self.v_min, self.v_max,
                self.r_transit, r_l))
        else:
            derived = loiter_separation(self.patch_length, self.v_m, self.v_min,
                                        self.v_max, self.r_transit, r_l)
            if abs(derived - self.d_loiter) > 1e-6 * max(abs(self.d_loiter), 1.0):
                raise ValueError(
                    f"d_loiter={self.d_loiter} inconsistent with "
                    f"patch_length={self.patch_length} (implies {derived:.6f})")

    @property
    def r_loiter(self) -> float:
        return loiter_radius(self.n_slots, self.d_safe)


@dataclass(frozen=True)
class CorridorLayout:
    """Derived planar geometry of the corridor in the canonical frame."""

    r_loiter: float
    origin: Point
    point_d: Point
    point_f: Point
    point_q: Point
    center_a: Point
    point_e: Point
    point_c: Point
    point_i: Point
    center_entry: Point
    main_y: float
    outgoing_path: Path
    loiter_circle: Path
    entry_path: Path

    @property
    def l_out(self) -> float:
        """Total outgoing path length D->F->Q."""
        return self.outgoing_path.length


def build_layout(params: CorridorParams) -> CorridorLayout:
    """Realise the canonical corridor placement for the given parameters."""
    r_l = params.r_loiter
    r_t = params.r_transit
    d_l = params.d_loiter

    point_d = (-r_l, 0.0)
    point_f = (-r_l, -(d_l + r_l))
    center_a = (-r_l + r_t, -(d_l + r_l))
    point_q = (-r_l + r_t, -(d_l + r_l + r_t))
    main_y = -(d_l + r_l + r_t)

    outgoing_path = Path((
        Segment(point_d, point_f),
        Arc(center_a, r_t, math.pi, 0.5 * math.pi),
    ))
    loiter_circle = Path((Arc((0.0, 0.0), r_l, 0.0, TWO_PI),), closed=True)

    # Entry side, mirrored about x=0; drawn but never flown here.
    point_i = (r_l, 0.0)
    point_c = (r_l, -(d_l + r_l))
    point_e = (r_l - r_t, main_y)
    center_entry = (r_l - r_t, -(d_l + r_l))
    entry_path = Path((
        Arc(center_entry, r_t, -0.5 * math.pi, 0.5 * math.pi),
        Segment(point_c, point_i),
    ))

    return CorridorLayout(
        r_loiter=r_l, origin=(0.0, 0.0),
        point_d=point_d, point_f=point_f, point_q=point_q, center_a=center_a,
        point_e=point_e, point_c=point_c, point_i=point_i,
        center_entry=center_entry, main_y=main_y,
        outgoing_path=outgoing_path, loiter_circle=loiter_circle,
        entry_path=entry_path)


def patch_bounds(layout: CorridorLayout, params: CorridorParams) -> tuple[float, float]:
    """Reachable window of main-lane distance-to-go values for a departure at D.

    A point at distance-to-go d (measured to Q at departure time) can be met
    at Q exactly when d / v_m equals the transit time, so the speed band maps
    the outgoing path length onto [v_m/v_max, v_m/v_min] times that length.
    """
    l_out = layout.l_out
    return (params.v_m / params.v_max * l_out,
            params.v_m / params.v_min * l_out)
