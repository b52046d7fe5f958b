"""Exception hierarchy.

Every domain failure derives from :class:`ReebEditError` so that the command
line front end can map it to exit code 1.
"""


class ReebEditError(Exception):
    """Base class for domain errors."""


class UnsupportedDerivative(ReebEditError):
    pass


class NotSimpleMorse(ReebEditError):
    pass


class MixedRepresentation(ReebEditError):
    pass


class InvalidGraph(ReebEditError):
    pass


class InvalidDeformation(ReebEditError):
    def __init__(self, message, step=None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class UnknownVertexId(InvalidDeformation):
    pass


class DeathOnTwoVertexGraph(InvalidDeformation):
    pass


class InvalidPlan(ReebEditError):
    pass


class BudgetExceeded(ReebEditError):
    pass


class ResolutionTooLow(ReebEditError):
    pass


class NonGenericPath(ReebEditError):
    pass


class ReplayMismatch(ReebEditError):
    pass


class PreconditionViolated(ReebEditError):
    pass


class RejectionBudgetExceeded(ReebEditError):
    pass


class FormatError(Exception):
    """Malformed input file; deliberately not a domain error."""
