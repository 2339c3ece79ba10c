"""Exception hierarchy.

Input problems derive from :class:`InputError` (a ``ValueError``), numerical
breakdowns from :class:`NumericalError` (an ``ArithmeticError``).  The CLI
maps the two families to different exit codes.
"""


class WfaError(Exception):
    """Base class for every error raised by this package."""


class InputError(WfaError, ValueError):
    pass


class NumericalError(WfaError, ArithmeticError):
    pass


class DimensionMismatch(InputError):
    pass


class GroupNotAtBoundary(InputError):
    """The requested rank cuts through a group of tied singular numbers."""

    def __init__(self, message, start=None, stop=None):
        super().__init__(message)
        self.start = start
        self.stop = stop


class NonConvergent(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class EigenvalueOnCircle(NumericalError):
    pass


class SpectralRadiusTooLarge(NumericalError):
    pass


class NotMinimal(NumericalError):
    pass


class SingularCore(NumericalError):
    pass


class InertiaMismatch(NumericalError):
    pass


class NearPole(NumericalError):
    pass


class NearZeroDenominator(NumericalError):
    pass


class DivergentDivision(NumericalError):
    pass


class SingularTransition(NumericalError):
    pass


class VerificationFailed(WfaError):
    """A computed reduction did not pass its optimality certificate."""


class DegenerateCaseWarning(UserWarning):
    pass


class TruncationWarning(UserWarning):
    pass
