"""Exception types raised by the library."""


class DimensionError(ValueError):
    """Truncation too small to hold the input state."""


class InvalidStateError(ValueError):
    """A density matrix has a significantly negative eigenvalue."""


class ConvergenceError(RuntimeError):
    """The truncation loop hit its dimension cap before converging.

    The partial ``(dim, qfi)`` history is kept on the exception.
    """

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class DivergentOptimumError(ValueError):
    """Optimal N requested at r = 0, where it is unbounded."""


class ScanCapError(RuntimeError):
    """Optimal-N scan reached its upper N without a confirmed maximum."""

    def __init__(self, message, partial=()):
        super().__init__(message)
        self.partial = list(partial)


class InsufficientDataError(ValueError):
    """Too few usable points for a least-squares fit."""


class UnboundedUncertaintyError(ZeroDivisionError):
    """Zero Fisher information: no finite precision bound exists."""
