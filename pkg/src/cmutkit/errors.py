"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: input/configuration problems
(DesignFileError, SweepConfigError, ContactError, ValueError) exit 2,
computation failures (IntegrationDivergedError, BracketError,
InfeasibleTargetError) exit 1.
"""


class CmutError(Exception):
    """Base class for toolkit-specific errors."""


class ContactError(CmutError, ValueError):
    """Displacement at or beyond the gap: the plates are touching."""


class IntegrationDivergedError(CmutError, RuntimeError):
    """Time integration produced a non-finite state."""

    def __init__(self, step: int, time: float):
        self.step = step
        self.time = time
        super().__init__(f"integration diverged at step {step} (t = {time:.6e} s)")


class BracketError(CmutError, ValueError):
    """Root-finding bounds do not bracket the target."""


class InfeasibleTargetError(CmutError, ValueError):
    """Requested target cannot be reached by any admissible parameter value."""


class SweepConfigError(CmutError, ValueError):
    """Sweep metric and parameter combination cannot be evaluated."""


class DesignFileError(CmutError, ValueError):
    """Design file cannot be parsed or validated; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
