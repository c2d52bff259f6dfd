"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Invalid scenario, parameter set or override file."""


class TraceFormatError(ValueError):
    """Malformed replay trace line; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ProtocolError(RuntimeError):
    """Engine fed a scheduler an input its phase forbids (e.g. a grant while paused)."""


class InvariantError(RuntimeError):
    """A run-time invariant of the simulation was violated; the run aborts."""
