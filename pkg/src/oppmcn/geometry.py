"""Planar geometry: positions, mobility traces, rectangular obstacles and the LOS test."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Position:
    x: float  # meters east
    y: float  # meters north

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite position ({self.x}, {self.y})")

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned rectangular building footprint."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float
    penetration_loss: float  # dB per traversal

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("degenerate obstacle rectangle")
        if self.penetration_loss < 0:
            raise ValueError("penetration loss must be >= 0")

    @property
    def corners(self) -> tuple[Position, Position, Position, Position]:
        return (
            Position(self.x_min, self.y_min),
            Position(self.x_max, self.y_min),
            Position(self.x_max, self.y_max),
            Position(self.x_min, self.y_max),
        )

    def contains(self, p: Position) -> bool:
        return self.x_min <= p.x <= self.x_max and self.y_min <= p.y <= self.y_max


@dataclass(frozen=True)
class Waypoint:
    t: float  # seconds since run start
    pos: Position

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("waypoint time must be >= 0")


@dataclass(frozen=True)
class MobilityTrace:
    waypoints: tuple[Waypoint, ...]
    indoor_until: float | None = None  # time the node leaves the building, if it starts inside

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("trace needs at least one waypoint")
        times = [w.t for w in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")
        object.__setattr__(self, "_times", times)

    def end_time(self) -> float:
        return self.waypoints[-1].t


def trace_from_legs(start: tuple[float, float], legs: list[tuple[float, float, float]],
                    t0: float = 0.0) -> MobilityTrace:
    """Build a trace from (x, y, speed_m_s) legs walked at constant speed per leg."""
    wps = [Waypoint(t0, Position(*start))]
    t, cur = t0, Position(*start)
    for x, y, speed in legs:
        nxt = Position(x, y)
        d = cur.distance_to(nxt)
        if speed <= 0:
            raise ValueError("leg speed must be > 0")
        if d == 0:
            continue
        t += d / speed
        wps.append(Waypoint(t, nxt))
        cur = nxt
    return MobilityTrace(tuple(wps))


def with_dwell(trace: MobilityTrace, at_t: float, dwell_s: float) -> MobilityTrace:
    """Insert a stationary dwell of `dwell_s` starting at `at_t`; later waypoints shift."""
    if dwell_s < 0:
        raise ValueError("dwell must be >= 0")
    if dwell_s == 0:
        return trace
    pos = position_at(trace, at_t)
    wps: list[Waypoint] = []
    for w in trace.waypoints:
        if w.t <= at_t:
            wps.append(w)
        else:
            wps.append(Waypoint(w.t + dwell_s, w.pos))
    hold_start = Waypoint(at_t, pos) if not wps or wps[-1].t < at_t else None
    out = [w for w in wps if w.t <= at_t]
    if hold_start is not None:
        out.append(hold_start)
    out.append(Waypoint(at_t + dwell_s, pos))
    out.extend(w for w in wps if w.t > at_t + dwell_s - 1e-12 and w.t > out[-1].t)
    return MobilityTrace(tuple(out), trace.indoor_until)


def position_at(trace: MobilityTrace, t: float) -> Position:
    """Position linearly interpolated between waypoints, clamped outside the time range."""
    if t < 0:
        raise ValueError("t must be >= 0")
    wps = trace.waypoints
    if t <= wps[0].t:
        return wps[0].pos
    if t >= wps[-1].t:
        return wps[-1].pos
    i = bisect_right(trace._times, t)  # type: ignore[attr-defined]
    a, b = wps[i - 1], wps[i]
    f = (t - a.t) / (b.t - a.t)
    return Position(a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y))


def _segment_box_span(ax: float, ay: float, bx: float, by: float, o: Obstacle) -> float:
    """Length fraction of segment a-b that lies inside obstacle `o` (0.0 if disjoint).

    Liang-Barsky clip of the parametric segment to the closed box.
    """
    dx = bx - ax
    dy = by - ay
    t0, t1 = 0.0, 1.0
    for d, lo, hi, p in ((dx, o.x_min, o.x_max, ax), (dy, o.y_min, o.y_max, ay)):
        if d == 0.0:
            if p < lo or p > hi:
                return 0.0
            continue
        ta = (lo - p) / d
        tb = (hi - p) / d
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
        if t0 >= t1:
            return 0.0
    return t1 - t0


def is_los(a: Position, b: Position, obstacles: tuple[Obstacle, ...] | list[Obstacle]) -> tuple[bool, float]:
    """True plus 0 dB when the segment a-b crosses no obstacle, else False plus summed penetration."""
    loss = 0.0
    clear = True
    for o in obstacles:
        if _segment_box_span(a.x, a.y, b.x, b.y, o) > 0.0:
            clear = False
            loss += o.penetration_loss
    return clear, loss


def obstruction(a: Position, b: Position,
                obstacles: tuple[Obstacle, ...] | list[Obstacle]) -> tuple[bool, float, float]:
    """LOS flag, summed penetration dB, and meters of the path inside obstacles containing one endpoint.

    The interior chord only counts for obstacles holding exactly one of `a`, `b` (an
    indoor node talking out through the walls).  An obstacle containing both endpoints
    is the room they share and does not obstruct; a building between two outdoor
    endpoints contributes its flat penetration only.
    """
    loss = 0.0
    depth = 0.0
    clear = True
    seg_len = math.hypot(b.x - a.x, b.y - a.y)
    for o in obstacles:
        in_a, in_b = o.contains(a), o.contains(b)
        if in_a and in_b:
            continue
        span = _segment_box_span(a.x, a.y, b.x, b.y, o)
        if span > 0.0:
            clear = False
            loss += o.penetration_loss
            if in_a or in_b:
                depth += span * seg_len
    return clear, loss, depth


ROLE_SOURCE = "source"
ROLE_RELAY = "relay"
ROLE_BASE_STATION = "base_station"
ROLE_SERVER = "server"

MOUNT_HANDHELD = "handheld"
MOUNT_CABIN = "in_vehicle_cabin"
MOUNT_ROOF = "vehicle_roof"

_ROLES = {ROLE_SOURCE, ROLE_RELAY, ROLE_BASE_STATION, ROLE_SERVER}
_MOUNTS = {MOUNT_HANDHELD, MOUNT_CABIN, MOUNT_ROOF}


@dataclass(frozen=True)
class NodeSpec:
    id: str
    role: str
    trace: MobilityTrace
    mount: str = MOUNT_HANDHELD

    def __post_init__(self):
        if self.role not in _ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if self.mount not in _MOUNTS:
            raise ValueError(f"unknown mount {self.mount!r}")
        if self.role == ROLE_BASE_STATION and len(self.trace.waypoints) != 1:
            raise ValueError("base station trace must be a single fixed waypoint")
