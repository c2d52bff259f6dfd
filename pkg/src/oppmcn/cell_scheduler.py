"""Opportunistic pause/resume control of the uplink cellular connection.

While transmitting, the granted transport-block-size indices from the control channel
are averaged over a trailing window; the uplink pauses when that average drops strictly
below itbs_thr.  While paused no grants exist, so the downlink reference-signal RSRP is
averaged instead, and the uplink resumes when its window average strictly exceeds
rsrp_thr.  Decisions require a window that spans the full averaging horizon.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .decision_log import EVENT_PAUSE, EVENT_RESUME, LINK_CELL, DecisionRecord
from .errors import ProtocolError

PHASE_ACTIVE = "active"
PHASE_PAUSED = "paused"

_RESYNC_EVERY = 4096  # exact recompute cadence for the running window sums


@dataclass(frozen=True)
class CellSchedulerParams:
    itbs_thr: float = 18.0
    rsrp_thr: float = -80.0  # dBm
    t_cell_avg: float = 1.0  # seconds
    full_window_tol: float = 0.005  # slack on the span test, one sample period

    def __post_init__(self):
        if not 0 <= self.itbs_thr <= 26:
            raise ValueError("itbs_thr must be in [0, 26]")
        if self.t_cell_avg <= 0:
            raise ValueError("t_cell_avg must be > 0")


class CellScheduler:
    """Single-owner state machine; one instance per cellular link per run."""

    __slots__ = ("params", "phase", "_itbs", "_itbs_sum", "_rsrp", "_rsrp_sum",
                 "_last_t", "_ops", "log")

    def __init__(self, params: CellSchedulerParams, initially_paused: bool,
                 log: list[DecisionRecord] | None = None):
        self.params = params
        self.phase = PHASE_PAUSED if initially_paused else PHASE_ACTIVE
        self._itbs: deque[tuple[float, float]] = deque()
        self._itbs_sum = 0.0
        self._rsrp: deque[tuple[float, float]] = deque()
        self._rsrp_sum = 0.0
        self._last_t = 0.0
        self._ops = 0
        self.log = log if log is not None else []

    def _check_order(self, t: float) -> None:
        if t < self._last_t:
            raise ValueError(f"sample at t={t} precedes previous sample at t={self._last_t}")
        self._last_t = t

    def observe_grant(self, i_tbs: int, t: float) -> None:
        if self.phase != PHASE_ACTIVE:
            raise ProtocolError("grant observed while the uplink is paused")
        self._check_order(t)
        self._itbs.append((t, float(i_tbs)))
        self._itbs_sum += i_tbs
        self._evict_itbs(t - self.params.t_cell_avg)

    def observe_rsrp(self, rsrp: float, t: float) -> None:
        self._check_order(t)
        self._rsrp.append((t, rsrp))
        self._rsrp_sum += rsrp
        self._evict_rsrp(t - self.params.t_cell_avg)

    def _evict_itbs(self, cutoff: float) -> None:
        dq = self._itbs
        while dq and dq[0][0] < cutoff:
            self._itbs_sum -= dq.popleft()[1]
        self._ops += 1
        if self._ops >= _RESYNC_EVERY:
            self._ops = 0
            self._itbs_sum = sum(v for _, v in self._itbs)
            self._rsrp_sum = sum(v for _, v in self._rsrp)

    def _evict_rsrp(self, cutoff: float) -> None:
        dq = self._rsrp
        while dq and dq[0][0] < cutoff:
            self._rsrp_sum -= dq.popleft()[1]

    def evaluate(self, t: float) -> str | None:
        """Per-TTI phase decision; returns "pause" or "resume" when a transition fires."""
        p = self.params
        horizon = t - p.t_cell_avg
        if self.phase == PHASE_ACTIVE:
            self._evict_itbs(horizon)
            dq = self._itbs
            if dq and dq[0][0] <= horizon + p.full_window_tol:
                avg = self._itbs_sum / len(dq)
                if avg < p.itbs_thr:
                    self.phase = PHASE_PAUSED
                    self._clear()
                    self.log.append(DecisionRecord(t, LINK_CELL, EVENT_PAUSE, avg, 0, self.phase))
                    return EVENT_PAUSE
        else:
            self._evict_rsrp(horizon)
            dq = self._rsrp
            if dq and dq[0][0] <= horizon + p.full_window_tol:
                avg = self._rsrp_sum / len(dq)
                if avg > p.rsrp_thr:
                    self.phase = PHASE_ACTIVE
                    self._clear()
                    self.log.append(DecisionRecord(t, LINK_CELL, EVENT_RESUME, avg, 0, self.phase))
                    return EVENT_RESUME
        return None

    def _clear(self) -> None:
        self._itbs.clear()
        self._rsrp.clear()
        self._itbs_sum = 0.0
        self._rsrp_sum = 0.0

    def itbs_average(self) -> float | None:
        return self._itbs_sum / len(self._itbs) if self._itbs else None

    def rsrp_average(self) -> float | None:
        return self._rsrp_sum / len(self._rsrp) if self._rsrp else None

    def is_transmitting(self) -> bool:
        return self.phase == PHASE_ACTIVE
