"""Exception hierarchy.

Every error carries structured fields so the CLI can report them without
string parsing.
"""


class CalculusError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message, **fields):
        super().__init__(message)
        self.fields = fields

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self), **self.fields}


class DimensionMismatch(CalculusError):
    pass


class ParityError(CalculusError):
    pass


class NotTypeIError(CalculusError):
    pass


class GeometryError(CalculusError):
    """Inconsistent surface invariants (e.g. Noether's formula fails)."""


class ContextMismatch(CalculusError):
    pass


class DegreeOutOfRange(CalculusError):
    pass


class UndeclaredRank(CalculusError):
    """A twist was requested on a bundle whose honest pieces are unknown."""


class HypothesisViolation(CalculusError):
    """An inequality required by the expansion does not hold."""


class OrderCycle(CalculusError):
    pass


class InternalAssertion(CalculusError):
    """Two independent evaluations of the same quantity disagree."""
