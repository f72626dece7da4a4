"""Exception types shared across the package."""


class InvalidTargetError(ValueError):
    """Target coefficients are zero, duplicated or off the unit sphere."""


class DomainError(ValueError):
    """Argument outside the domain where a formula is analytic or defined."""


class NumericalStabilityError(RuntimeError):
    """A search or truncation failed its self-consistency check."""
