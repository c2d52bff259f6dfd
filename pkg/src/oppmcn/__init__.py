"""Simulator of uplink file transfers over direct, opportunistic and relay-assisted cellular links."""

__version__ = "0.1.0"

from .engine import Mode, RunResult, run  # noqa: F401
from .scenarios import build, list_scenarios, validate  # noqa: F401
