"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid arguments (usage error). The CLI maps this to exit code 2."""


class NumericalDomainError(ArithmeticError):
    """A computation left its valid numeric domain. The CLI maps this to exit code 1."""
