"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    pass


class DegenerateInput(InvalidArgument):
    """Input carries no usable signal (all-zero data, collapsed clusters)."""


class NumericFailure(ArithmeticError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class NoRootError(NumericFailure):
    """det f(z) has no zero on the search interval."""
