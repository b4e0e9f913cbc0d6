"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a structural precondition (shape, orthogonality, ...)."""


class NumericFailure(RuntimeError):
    """A numerical procedure failed to converge or hit a residual floor."""


class EnumerationTooLarge(ValidationError):
    """Requested enumeration exceeds the configured size limit."""
