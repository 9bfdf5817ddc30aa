"""Exception hierarchy shared by every module of the package."""


class QtsError(Exception):
    """Base class for all errors raised by qtsimage."""


class ShapeError(QtsError, ValueError):
    """Index sets, array lengths or dimensions do not match."""


class OrderError(QtsError, ValueError):
    """A node was built with a child that is not below it in the index order."""


class CapacityError(QtsError):
    """A densifying operation would exceed the configured size cap."""


class ParseError(QtsError, ValueError):
    """Malformed ``.qts`` text. Carries the offending line number."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)


class ParameterError(QtsError, ValueError):
    """Invalid benchmark or algorithm parameters."""


class NonProjectorError(QtsError, ValueError):
    """Basis extraction did not terminate, so the input was not a projector."""


class PreconditionError(QtsError, ValueError):
    """An input violates a documented precondition (e.g. non-orthonormal basis)."""


class ComputationTimeout(QtsError):
    """The engine deadline passed while an operation was running."""
