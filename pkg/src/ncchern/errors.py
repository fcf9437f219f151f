"""Exception hierarchy shared by all ncchern modules.

The CLI maps these onto exit codes, so every failure a user can trigger
derives from :class:`NCChernError` and carries an ``exit_code``.
"""


class NCChernError(Exception):
    exit_code = 1


class InputError(NCChernError, ValueError):
    """Malformed or out-of-range user input."""
    exit_code = 2


class ParseError(InputError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class RangeError(InputError):
    pass


class InvalidSize(InputError):
    pass


class EmptyProduct(InputError):
    pass


class DomainError(InputError):
    pass


class NonSquare(InputError):
    pass


class CapMismatch(InputError):
    pass


class AlgebraMismatch(InputError):
    pass


class ValidationFailure(NCChernError):
    """A mathematical precondition on user data does not hold."""
    exit_code = 3


class NotIdempotent(ValidationFailure):
    pass


class NotInvertible(ValidationFailure):
    pass


class OddDegree(ValidationFailure):
    pass


class SizeBound(NCChernError):
    exit_code = 4


class CompositionNonzero(NCChernError):
    """d_out . d_in != 0: an operator implementation is broken."""
    exit_code = 5


class InvariantViolation(NCChernError):
    exit_code = 5
