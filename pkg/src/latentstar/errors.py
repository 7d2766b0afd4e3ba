"""Exception types shared across the package."""


class EdgeWeightDomainError(ValueError):
    """An edge-weight vector violates the model domain (0 < |a_i| < 1, n >= 2)."""


class BranchMismatchError(ValueError):
    """A branch-specific routine was called on a vector of the other branch."""
