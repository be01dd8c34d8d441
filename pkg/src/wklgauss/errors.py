"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Malformed or out-of-domain input (bad shapes, non-finite values, unknown ids)."""


class NotPositiveDefinite(ValueError):
    """A matrix required to be symmetric positive definite is not."""


class PreconditionViolated(ValueError):
    """A caller-checkable precondition does not hold (e.g. covariances that must commute)."""
