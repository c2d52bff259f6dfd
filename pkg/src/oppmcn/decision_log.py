"""Structured pause/resume/observe records emitted by the link schedulers."""

from __future__ import annotations

from dataclasses import dataclass

LINK_D2D = "d2d"
LINK_CELL = "cell"

EVENT_PAUSE = "pause"
EVENT_RESUME = "resume"
EVENT_OBSERVE = "observe"


@dataclass(frozen=True)
class DecisionRecord:
    t: float
    link: str
    event: str
    avg: float | None  # governing window average at the event, None when undefined
    counter: int
    phase: str  # phase after the event

    def line(self) -> str:
        avg = "nan" if self.avg is None else f"{self.avg:.3f}"
        prefix = "" if self.link == LINK_D2D else f"link={self.link} "
        return f"{self.t:.3f} {prefix}{self.event} {avg} {self.counter} {self.phase}"


def format_log(records: list[DecisionRecord]) -> str:
    return "\n".join(r.line() for r in records) + ("\n" if records else "")
