class ValidationError(ValueError):
    """Input violates a documented invariant (shape, trace, positivity, ...)."""


class ResourceGuardError(RuntimeError):
    """Requested computation exceeds the configured size budget."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or hit a degenerate draw."""
