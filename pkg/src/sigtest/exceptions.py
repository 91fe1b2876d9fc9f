"""Exception types raised by :mod:`sigtest`."""


class ShapeMismatchError(ValueError):
    """Operands have incompatible dimensions or truncation levels."""


class ConvergenceError(ArithmeticError):
    """A root finder failed to converge.

    The last bracketing interval is kept on ``bracket`` so callers can
    report or retry with a looser tolerance.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket
