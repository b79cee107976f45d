"""Exception types shared across the package."""


class DomainError(ValueError):
    """A start point or parameter lies outside the admissible region."""


class UnsupportedFormulaError(NotImplementedError):
    """No closed-form formula is available for the requested type."""
