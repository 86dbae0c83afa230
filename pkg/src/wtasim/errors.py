"""Exception hierarchy shared by all modules."""


class WtaError(Exception):
    """Base class for every error raised by this package."""


class CapabilityError(WtaError):
    """The semiring lacks a capability the operation needs."""


class DivergentStarError(WtaError):
    """``a*`` was requested for a value whose geometric series diverges."""


class PreconditionError(WtaError):
    """An operation's documented precondition does not hold."""


class ShapeError(WtaError):
    """Index sets of matrices/vectors do not line up."""


class ClassificationError(WtaError):
    """A matrix lacks the structural property an operation relies on."""


class NotInvertibleError(WtaError):
    pass


class TreeError(WtaError):
    """Unknown symbol or arity mismatch in a tree."""


class InputError(WtaError):
    """Incompatible automata, alphabets or state maps."""


class BudgetError(WtaError):
    """A desk-scale guard was exceeded; shrink the inputs."""


class InvariantError(WtaError):
    """Internal consistency check failed; this indicates a bug."""


class ParseError(WtaError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)


class CarrierError(WtaError):
    """A value does not belong to the semiring's carrier."""
