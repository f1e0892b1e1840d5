"""Exception types raised by the integrators and their building blocks."""


class LirkwError(Exception):
    """Base class for all package errors."""


class DegenerateParameters(LirkwError, ValueError):
    """Tableau parameters hit a zero denominator."""


class SingularFactor(LirkwError, ArithmeticError):
    """A factor ``I - sigma * L_r`` could not be inverted.

    Attributes
    ----------
    part_index : int or None
        Zero-based index of the failing part inside an AMF operator, when known.
    """

    def __init__(self, message, part_index=None):
        super().__init__(message)
        self.part_index = part_index


class SingularStageSystem(LirkwError, ArithmeticError):
    """The stacked stage system of a transfer matrix is singular."""


class NonfiniteState(LirkwError, FloatingPointError):
    """A stage or step produced NaN or inf entries."""

    def __init__(self, message, step_index=None, stage_index=None):
        super().__init__(message)
        self.step_index = step_index
        self.stage_index = stage_index


class FamilyMismatch(LirkwError, ValueError):
    """A tree was evaluated under a method type whose family excludes it."""


class NotAMeagreTree(LirkwError, ValueError):
    """Density requested for a tree containing fat or square vertices."""


class UnknownProblem(LirkwError, KeyError):
    """No built-in problem is registered under the requested name."""


class TableauFormatError(LirkwError, ValueError):
    """A serialized tableau could not be parsed."""
