"""Exception types shared across the engine."""


class CiExtError(Exception):
    """Base class for engine errors."""


class ZeroInverse(CiExtError, ZeroDivisionError):
    pass


class DimensionMismatch(CiExtError, ValueError):
    pass


class ExponentOverflow(CiExtError, OverflowError):
    pass


class NotHomogeneous(CiExtError, ValueError):
    pass


class NotRegularSequence(CiExtError, ValueError):
    def __init__(self, index, witness):
        self.index = index
        self.witness = witness
        super().__init__(f"f_{index} is a zero divisor modulo its predecessors (witness {witness})")


class ComposeNotZero(CiExtError, ValueError):
    pass


class LiftFailure(CiExtError, ArithmeticError):
    pass


class ImproperIdeal(CiExtError, ValueError):
    pass


class WindowTooSmall(CiExtError, ValueError):
    pass


class NoFit(CiExtError):
    def __init__(self, message, max_order=None):
        self.max_order = max_order
        super().__init__(message)


class TailOutsideGrid(CiExtError, ValueError):
    pass


class EngineConsistencyError(CiExtError, RuntimeError):
    """A mathematically impossible state was reached; indicates a bug."""
