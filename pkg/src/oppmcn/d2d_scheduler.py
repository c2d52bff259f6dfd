"""Demand-driven pause/resume control of the device-to-device link.

The link monitor averages the RSSI of the last nb_rx control frames (data ACKs while
transmitting, beacons otherwise).  Transmission pauses after nb_below_thr consecutive
averages strictly below rssi_thr, and a paused link re-checks every t_d2d seconds,
resuming once the average is at or above the threshold again.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .decision_log import (EVENT_OBSERVE, EVENT_PAUSE, EVENT_RESUME, LINK_D2D,
                           DecisionRecord)

PHASE_ACTIVE = "active"
PHASE_PAUSED = "paused"


@dataclass(frozen=True)
class D2DSchedulerParams:
    rssi_thr: float = -70.0  # dBm
    nb_rx: int = 7
    nb_below_thr: int = 3
    t_d2d: float = 1.0  # seconds between resume checks
    beacon_interval: float = 0.1  # seconds between monitoring frames while idle

    def __post_init__(self):
        if self.nb_rx < 1 or self.nb_below_thr < 1:
            raise ValueError("nb_rx and nb_below_thr must be >= 1")
        if self.t_d2d <= 0 or self.beacon_interval <= 0:
            raise ValueError("t_d2d and beacon_interval must be > 0")


class D2dScheduler:
    """Single-owner state machine; one instance per D2D link per run."""

    __slots__ = ("params", "phase", "below_counter", "current_avg", "next_check_at",
                 "_window", "_last_t", "log", "record_observes")

    def __init__(self, params: D2DSchedulerParams, initially_paused: bool,
                 now: float = 0.0, log: list[DecisionRecord] | None = None,
                 record_observes: bool = False):
        self.params = params
        self.phase = PHASE_PAUSED if initially_paused else PHASE_ACTIVE
        self.below_counter = 0
        self.current_avg: float | None = None
        self.next_check_at: float | None = (now + params.t_d2d) if initially_paused else None
        self._window: deque[float] = deque(maxlen=params.nb_rx)
        self._last_t = now
        self.log = log if log is not None else []
        self.record_observes = record_observes

    def observe(self, t: float, rssi: float) -> None:
        """Feed one RSSI sample (ACK or beacon); may trigger a pause while active."""
        if t < self._last_t:
            raise ValueError(f"sample at t={t} precedes previous sample at t={self._last_t}")
        self._last_t = t
        w = self._window
        w.append(rssi)
        p = self.params
        if len(w) == p.nb_rx:
            avg = sum(w) / p.nb_rx
            self.current_avg = avg
            if self.phase == PHASE_ACTIVE:
                if avg < p.rssi_thr:
                    self.below_counter += 1
                    if self.below_counter == p.nb_below_thr:
                        self.phase = PHASE_PAUSED
                        self.next_check_at = t + p.t_d2d
                        self.log.append(DecisionRecord(t, LINK_D2D, EVENT_PAUSE, avg,
                                                       self.below_counter, self.phase))
                        return
                else:
                    self.below_counter = 0
        if self.record_observes:
            self.log.append(DecisionRecord(t, LINK_D2D, EVENT_OBSERVE, self.current_avg,
                                           self.below_counter, self.phase))

    def tick(self, now: float) -> bool:
        """Periodic resume check; returns True when the link resumes at this instant."""
        if self.phase == PHASE_ACTIVE or now < self.next_check_at:  # type: ignore[operator]
            return False
        p = self.params
        avg = self.current_avg
        if avg is not None and len(self._window) == p.nb_rx and avg >= p.rssi_thr:
            self.phase = PHASE_ACTIVE
            self.below_counter = 0
            self.next_check_at = None
            self.log.append(DecisionRecord(now, LINK_D2D, EVENT_RESUME, avg, 0, self.phase))
            return True
        self.next_check_at = now + p.t_d2d
        return False

    def is_transmitting(self) -> bool:
        return self.phase == PHASE_ACTIVE
