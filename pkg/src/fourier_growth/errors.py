"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """An experiment configuration is inconsistent or incomplete."""


class DimensionMismatchError(ValueError):
    pass


class AccuracyError(RuntimeError):
    """A quadrature resolution guard failed."""


class DivergenceError(ArithmeticError):
    """An integral that should be finite is divergent for the given exponents."""
