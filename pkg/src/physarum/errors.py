"""Exception taxonomy for the physarum package.

Grouped so the command line tool can map failures onto stable exit codes:
input/validation problems, numerical failures, and capability limits.
"""

from __future__ import annotations


class PhysarumError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PhysarumError):
    """The problem data or a call argument violates a documented precondition."""


class RankDeficientError(ValidationError):
    pass


class NonPositiveCostError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class NonPositiveStateError(ValidationError):
    pass


class NotInKernelError(ValidationError):
    pass


class BadEpsError(ValidationError):
    pass


class BadStepError(ValidationError):
    pass


class InfeasibleStartError(ValidationError):
    pass


class NumericalError(PhysarumError):
    """A computation failed for numerical reasons at runtime."""


class NotPositiveDefiniteError(NumericalError):
    pass


class PositivityLostError(NumericalError):
    pass


class FeasibilityLostError(NumericalError):
    pass


class StepSizeUnderflowError(NumericalError):
    pass


class NewtonStalledError(NumericalError):
    pass


class DualOverflowError(NumericalError):
    """A dual exponent exceeded the safe range; the caller must damp its step."""


class NoInteriorPointError(NumericalError):
    pass


class NoFeasibleInteriorStartError(NumericalError):
    pass


class LimitError(PhysarumError):
    """The instance exceeds a documented size cap for an exact routine."""


class ExactTooLargeError(LimitError):
    pass


class TooLargeError(LimitError):
    pass


class InsufficientTraceError(PhysarumError):
    pass


class MissingVerifyDataError(PhysarumError):
    pass


class ProblemFileError(PhysarumError):
    """Base class for problem-file reading failures."""


class ProblemIOError(ProblemFileError):
    pass


class MalformedProblemError(ProblemFileError):
    pass


class ValidationFailedError(ProblemFileError):
    """A structurally sound file failed semantic validation.

    The underlying model error is kept as ``__cause__``.
    """
