"""Exception types shared across the package."""


class PitAssignError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(PitAssignError, ValueError):
    """Arguments violate a documented precondition or type invariant."""


class DimensionMismatch(PitAssignError, ValueError):
    """Operand shapes are incompatible for the requested operation."""


class ZeroTargetEnergy(PitAssignError, ValueError):
    """A target signal (or the target total) carries no energy, so no
    energy-ratio loss is defined for it."""


class Infeasible(PitAssignError):
    """No valid utterance-to-channel assignment exists for the instance."""


class ProblemFormatError(PitAssignError, ValueError):
    """A problem file does not follow the documented JSON schema."""
