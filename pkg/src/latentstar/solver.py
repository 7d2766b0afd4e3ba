"""Closed-form minimum-trace decompositions of the star covariance.

The trace-minimal Gramian split Sigma = sigma_t + diag(d) has exactly two
shapes, selected by the dominance margin of the edge weights:

* non-dominant (margin >= 0): sigma_t is the rank-one outer product a a',
  d_i = 1 - a_i^2 -- the star itself is optimal;
* dominant (margin < 0): sigma_t keeps the off-diagonal a_i*a_j but its
  diagonal drops to |a|_(1) * sum_rest on the dominant coordinate and
  |a|_(i) * (|a|_(1) - sum of the other tail magnitudes) elsewhere, which
  is a rank n-1 matrix.

At the boundary the two formulas coincide, and the trace saved by switching
from the forced star to the rank n-1 solution is the squared margin.
"""

from __future__ import annotations

import numpy as np

from .dominance import Dominance, classify
from .errors import BranchMismatchError
from .model import Branch, EdgeWeightVector, FactorDecomposition, sort_profile

__all__ = [
    "solve",
    "solve_rank1",
    "solve_rank_n_minus_1",
    "trace_advantage",
    "numerical_rank",
]

RANK_CUTOFF_SCALE = 1e-8


def numerical_rank(matrix: np.ndarray, cutoff_scale: float = RANK_CUTOFF_SCALE) -> int:
    """Rank by singular values above ``cutoff_scale * n * sigma_max``."""
    svals = np.linalg.svd(np.asarray(matrix), compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.sum(svals > cutoff_scale * matrix.shape[0] * svals[0]))


def solve_rank1(alpha: EdgeWeightVector) -> FactorDecomposition:
    """Rank-one decomposition sigma_t = a a', d = 1 - a^2.

    Only valid for non-dominant (or boundary) weights; calling it on a
    strictly dominant vector raises BranchMismatchError because the star
    would not be trace-minimal there.
    """
    verdict = classify(alpha)
    if verdict.branch is Dominance.DOMINANT:
        raise BranchMismatchError(
            f"rank-1 solution requested for a dominant vector (margin {verdict.margin:g})"
        )
    a = alpha.entries
    sigma_t = np.outer(a, a)
    d = 1.0 - a * a
    branch = Branch.BOUNDARY if verdict.branch is Dominance.BOUNDARY else Branch.RANK1
    return FactorDecomposition(
        sigma_t=sigma_t, d=d, branch=branch, trace_sigma_t=float(np.sum(a * a))
    )


def solve_rank_n_minus_1(alpha: EdgeWeightVector) -> FactorDecomposition:
    """Rank n-1 decomposition for dominant (or boundary) weights.

    In the magnitude-sorted view the diagonal of sigma_t is

        m_1 * (m_2 + ... + m_n)            on the dominant coordinate,
        m_i * (m_1 - sum_{j != i, 1} m_j)  elsewhere,

    with the off-diagonal entries a_i*a_j unchanged; the result is scattered
    back to the caller's ordering.
    """
    verdict = classify(alpha)
    if verdict.branch is Dominance.NON_DOMINANT:
        raise BranchMismatchError(
            f"rank n-1 solution requested for a non-dominant vector (margin {verdict.margin:g})"
        )
    a = alpha.entries
    profile = sort_profile(alpha)
    m = profile.magnitudes
    tail_sum = float(np.sum(m[1:]))
    diag_sorted = np.empty_like(m)
    diag_sorted[0] = m[0] * tail_sum
    diag_sorted[1:] = m[1:] * (m[0] - (tail_sum - m[1:]))
    diag = profile.unsort(diag_sorted)
    sigma_t = np.outer(a, a)
    np.fill_diagonal(sigma_t, diag)
    branch = (
        Branch.BOUNDARY if verdict.branch is Dominance.BOUNDARY else Branch.RANK_N_MINUS_1
    )
    return FactorDecomposition(
        sigma_t=sigma_t,
        d=1.0 - diag,
        branch=branch,
        trace_sigma_t=float(np.sum(diag)),
    )


def solve(alpha: EdgeWeightVector) -> FactorDecomposition:
    """Trace-minimal decomposition, dispatching on the dominance verdict.

    Boundary vectors route to the rank-one form (the two closed forms agree
    there) and are labelled Branch.BOUNDARY.
    """
    verdict = classify(alpha)
    if verdict.branch is Dominance.DOMINANT:
        return solve_rank_n_minus_1(alpha)
    return solve_rank1(alpha)


def trace_advantage(alpha: EdgeWeightVector) -> float:
    """Trace saved by the rank n-1 solution over a forced star fit.

    Equals m_1*(m_1 - 2*sum_rest) + sum_rest^2, i.e. the squared dominance
    margin; zero at the boundary and strictly increasing in m_1 for a fixed
    tail.  Raises BranchMismatchError for strictly non-dominant input, where
    the star is already optimal and the quantity is meaningless.
    """
    verdict = classify(alpha)
    if verdict.branch is Dominance.NON_DOMINANT:
        raise BranchMismatchError(
            f"trace advantage requested for a non-dominant vector (margin {verdict.margin:g})"
        )
    m = sort_profile(alpha).magnitudes
    tail_sum = float(np.sum(m[1:]))
    return float(m[0] * (m[0] - 2.0 * tail_sum) + tail_sum * tail_sum)
