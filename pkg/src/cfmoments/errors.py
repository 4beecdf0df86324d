"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation.

    Raised for hard hypothesis violations (an even-integer moment order
    where the sine factor vanishes, a zero alternating sum in a constant's
    denominator, a pole of the gamma function) rather than returning a
    sentinel value.
    """


class DivergenceSuspectedError(ArithmeticError):
    """A difference integral shows no sign of converging.

    Signals that the underlying measure most likely does not possess a
    finite absolute moment of the requested order.  Carries the diagnostic
    that triggered the classification.
    """

    def __init__(self, message, *, slope=None, alpha=None):
        super().__init__(message)
        self.slope = slope
        self.alpha = alpha


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class SeriesDivergenceError(ArithmeticError):
    """A series truncation would return garbage: terms grow before decaying."""
