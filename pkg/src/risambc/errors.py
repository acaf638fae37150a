"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    pass


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class NumericalError(ArithmeticError):
    """A series, continued fraction or adaptive integral failed to converge."""


class ConfigError(ValueError):
    pass


class FormatError(ValueError):
    """Input file does not match the expected CSV/chart schema."""
