"""Exception types shared across the package."""


class SoftarmError(Exception):
    """Base class for all package-specific errors."""


class MismatchedChainLength(SoftarmError):
    """Configuration and geometry disagree on the number of segments."""


class DegenerateQuaternion(SoftarmError):
    """Quaternion norm too small to define an orientation."""


class NotConverged(SoftarmError):
    """Iterative solver exhausted its budget.

    Carries the best iterate found so the caller can decide whether to
    command it anyway.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class InvalidSegment(SoftarmError):
    """Segment index outside the chain."""


class ConfigError(SoftarmError):
    """Malformed configuration or trajectory description."""


class IncompleteLog(SoftarmError):
    """Run log does not cover the full set-point schedule."""


class ExportError(SoftarmError):
    """Failed to write result files; message carries the path."""
