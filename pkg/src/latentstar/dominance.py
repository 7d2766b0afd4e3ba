"""Dominance classification of an edge-weight vector.

With magnitudes sorted non-increasingly, the vector is *dominant* when the
largest magnitude strictly exceeds the sum of all the others, *non-dominant*
when it is strictly smaller, and *boundary* at equality.  The margin

    margin = sum(|a|_(2..n)) - |a|_(1)

is the single number the whole solver dispatches on: negative margin selects
the rank n-1 decomposition, positive margin the rank-1 star.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .model import EdgeWeightVector, sort_profile

__all__ = ["Dominance", "DominanceVerdict", "classify", "default_epsilon"]


class Dominance(Enum):
    DOMINANT = "Dominant"
    NON_DOMINANT = "NonDominant"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class DominanceVerdict:
    """Classification outcome plus the raw margin it was derived from."""

    branch: Dominance
    margin: float
    dominant_index: Optional[int]

    def to_dict(self) -> dict:
        return {
            "branch": self.branch.value,
            "margin": float(self.margin),
            "dominant_index": self.dominant_index,
        }


def default_epsilon(n: int) -> float:
    """Boundary tolerance absorbing round-off in the magnitude sum."""
    return 1e-12 * n


def classify(
    alpha: EdgeWeightVector, epsilon: Optional[float] = None
) -> DominanceVerdict:
    """Classify ``alpha`` as Dominant, NonDominant, or Boundary.

    ``epsilon`` widens the equality case: |margin| <= epsilon reports
    Boundary.  Defaults to 1e-12 * n; pass 0 for exact comparison.
    The dominant index (original position of the largest magnitude) is
    reported for Dominant and Boundary verdicts only.
    """
    if epsilon is None:
        epsilon = default_epsilon(alpha.n)
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    profile = sort_profile(alpha)
    mags = profile.magnitudes
    margin = float(np.sum(mags[1:]) - mags[0])
    if margin < -epsilon:
        branch = Dominance.DOMINANT
    elif margin > epsilon:
        branch = Dominance.NON_DOMINANT
    else:
        branch = Dominance.BOUNDARY
    dominant_index = (
        int(profile.permutation[0]) if branch is not Dominance.NON_DOMINANT else None
    )
    return DominanceVerdict(branch=branch, margin=margin, dominant_index=dominant_index)
