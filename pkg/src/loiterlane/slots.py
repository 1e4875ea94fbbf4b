"""Virtual slots rotating on the loiter circle.

Slots are 1-indexed imaginary positions spaced uniformly around the circle,
all advancing counterclockwise at a common constant speed.  A holding UAV
occupies a slot and simply flies with it; reinsertion can start only when the
occupied slot sweeps through the exit point D (angle pi in the canonical
frame).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import TWO_PI, Point, wrap_two_pi

EXIT_ANGLE = math.pi


@dataclass(frozen=True)
class SlotRing:
    """State of the N rotating slots, value-semantic.

    occupancy holds one entry per slot, None for empty, otherwise a UAV id.
    """

    n_slots: int
    slot_speed: float
    r_loiter: float
    phase0: float = 0.0
    occupancy: tuple = ()

    def __post_init__(self) -> None:
        if self.n_slots < 2:
            raise ValueError(f"n_slots must be >= 2, got {self.n_slots}")
        if self.slot_speed <= 0.0 or self.r_loiter <= 0.0:
            raise ValueError("slot_speed and r_loiter must be positive")
        if not self.occupancy:
            object.__setattr__(self, "occupancy", (None,) * self.n_slots)
        elif len(self.occupancy) != self.n_slots:
            raise ValueError("occupancy length must equal n_slots")

    @property
    def alpha(self) -> float:
        """Angular spacing between consecutive slots."""
        return TWO_PI / self.n_slots

    @property
    def omega(self) -> float:
        """Angular rate of every slot (counterclockwise positive)."""
        return self.slot_speed / self.r_loiter

    @property
    def period(self) -> float:
        return TWO_PI * self.r_loiter / self.slot_speed

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.n_slots:
            raise ValueError(f"slot index {i} outside [1, {self.n_slots}]")

    def slot_angle(self, i: int, t: float) -> float:
        """Angle of slot i at time t, wrapped to [0, 2*pi)."""
        self._check_index(i)
        return wrap_two_pi(self.phase0 + (i - 1) * self.alpha + self.omega * t)

    def slot_position(self, i: int, t: float, center: Point = (0.0, 0.0)) -> Point:
        phi = self.slot_angle(i, t)
        return (center[0] + self.r_loiter * math.cos(phi),
                center[1] + self.r_loiter * math.sin(phi))

    def next_departure_time(self, i: int, t_now: float,
                            exit_angle: float = EXIT_ANGLE) -> float:
        """Earliest t >= t_now at which slot i sits at exit_angle."""
        deficit = wrap_two_pi(exit_angle - self.slot_angle(i, t_now))
        return t_now + deficit / self.omega

    def occupant(self, i: int):
        self._check_index(i)
        return self.occupancy[i - 1]

    def occupy(self, i: int, uav: str) -> "SlotRing":
        """Return a ring with UAV uav holding slot i."""
        self._check_index(i)
        if self.occupancy[i - 1] is not None:
            raise ValueError(f"slot {i} already occupied by {self.occupancy[i - 1]!r}")
        if uav in self.occupancy:
            raise ValueError(f"{uav!r} already holds a slot")
        new = list(self.occupancy)
        new[i - 1] = uav
        return replace(self, occupancy=tuple(new))

    def release(self, i: int) -> "SlotRing":
        """Return a ring with slot i emptied."""
        self._check_index(i)
        if self.occupancy[i - 1] is None:
            raise ValueError(f"slot {i} is already empty")
        new = list(self.occupancy)
        new[i - 1] = None
        return replace(self, occupancy=tuple(new))
