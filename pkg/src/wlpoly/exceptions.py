"""Exception types shared across the package."""


class WlpError(ValueError):
    """Invalid input: malformed expression, bad configuration, out-of-range value."""


class WlpSyntaxError(WlpError):
    def __init__(self, message, position, token):
        super().__init__(f"{message} at position {position} (token {token!r})")
        self.position = position
        self.token = token


class LatticeBoundsError(WlpError):
    pass


class ArityError(WlpError):
    pass


class NumericalError(ArithmeticError):
    """A numerical routine could not deliver its promised accuracy."""


class QuadratureError(NumericalError):
    pass


class HypothesisViolation(NumericalError):
    """The tail condition g(y)(1 - F_i(y)) -> 0 fails at the truncation point."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
