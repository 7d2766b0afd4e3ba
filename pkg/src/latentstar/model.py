"""Latent star model: edge weights, the induced covariance, and sampling.

The model is a single hidden standard normal Y feeding n observables

    X_i = a_i * Y + Z_i,     Z_i ~ N(0, 1 - a_i^2) independent,

so the population covariance has unit diagonal and rank-one off-diagonal
structure a_i * a_j.  The edge-weight vector ``a`` is the sole input of
every routine in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EdgeWeightDomainError

__all__ = [
    "Branch",
    "EdgeWeightVector",
    "SortProfile",
    "StarCovariance",
    "FactorDecomposition",
    "SampleBatch",
    "build_star_covariance",
    "sort_profile",
    "sample_star_model",
]


class Branch(Enum):
    """Which closed-form decomposition a vector selects."""

    RANK1 = "Rank1"
    RANK_N_MINUS_1 = "RankNMinus1"
    BOUNDARY = "Boundary"


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EdgeWeightVector:
    """Vector of latent-star edge weights a_1..a_n.

    Every entry must satisfy 0 < |a_i| < 1 strictly: a zero weight would
    disconnect a leaf and a unit weight makes the covariance singular.
    Entries are kept in the order the caller supplied them; use
    :func:`sort_profile` for the magnitude-sorted view.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 1:
            raise EdgeWeightDomainError("edge weights must form a 1-d vector")
        if arr.size < 2:
            raise EdgeWeightDomainError(
                f"need at least 2 edge weights, got {arr.size}"
            )
        mags = np.abs(arr)
        bad = np.nonzero(~np.isfinite(arr) | (mags <= 0.0) | (mags >= 1.0))[0]
        if bad.size:
            i = int(bad[0])
            raise EdgeWeightDomainError(
                f"edge weight at index {i} is {float(arr[i])!r}; "
                "every entry must satisfy 0 < |a_i| < 1"
            )
        object.__setattr__(self, "entries", _frozen_array(arr))

    @property
    def n(self) -> int:
        return int(self.entries.size)

    def to_dict(self) -> dict:
        return {"alpha": [float(a) for a in self.entries]}

    @classmethod
    def from_dict(cls, data: dict) -> "EdgeWeightVector":
        return cls(np.asarray(data["alpha"], dtype=float))


@dataclass(frozen=True)
class SortProfile:
    """Magnitude-sorted view of an edge-weight vector.

    ``permutation[k]`` is the original index of the k-th largest magnitude,
    ties broken by lower original index.  ``magnitudes`` is non-increasing.
    """

    permutation: np.ndarray
    magnitudes: np.ndarray

    def sort(self, values: np.ndarray) -> np.ndarray:
        """Reorder ``values`` into the sorted view."""
        return np.asarray(values)[self.permutation]

    def unsort(self, values_sorted: np.ndarray) -> np.ndarray:
        """Scatter sorted-view ``values_sorted`` back to the original order."""
        out = np.empty_like(np.asarray(values_sorted))
        out[self.permutation] = values_sorted
        return out

    def unsort_rows(self, matrix_sorted: np.ndarray) -> np.ndarray:
        """Scatter the rows of a sorted-view matrix back to original order."""
        out = np.empty_like(np.asarray(matrix_sorted))
        out[self.permutation, :] = matrix_sorted
        return out


@dataclass(frozen=True)
class StarCovariance:
    """Population covariance of the star model: unit diagonal, a_i*a_j off it."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen_array(self.matrix))

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    def to_dict(self) -> dict:
        return {"sigma": [[float(v) for v in row] for row in self.matrix]}


@dataclass(frozen=True)
class FactorDecomposition:
    """A split of the star covariance into a Gramian low-rank part plus a diagonal.

    ``sigma_t + diag(d)`` reconstructs the covariance entrywise; ``branch``
    records which closed form produced it (the boundary case is shared by
    both and reported as such).
    """

    sigma_t: np.ndarray
    d: np.ndarray
    branch: Branch
    trace_sigma_t: float

    def __post_init__(self):
        object.__setattr__(self, "sigma_t", _frozen_array(self.sigma_t))
        object.__setattr__(self, "d", _frozen_array(self.d))

    @property
    def n(self) -> int:
        return int(self.d.size)

    def reconstruct(self) -> np.ndarray:
        """Return sigma_t + diag(d), which should equal the star covariance."""
        return self.sigma_t + np.diag(self.d)

    def to_dict(self) -> dict:
        return {
            "sigma_t": [[float(v) for v in row] for row in self.sigma_t],
            "d": [float(v) for v in self.d],
            "branch": self.branch.value,
            "trace": float(self.trace_sigma_t),
        }


@dataclass(frozen=True)
class SampleBatch:
    """Rows drawn from the star model, plus the seed that produced them."""

    observations: np.ndarray
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "observations", _frozen_array(self.observations))

    @property
    def shape(self) -> tuple:
        return self.observations.shape

    def empirical_covariance(self) -> np.ndarray:
        """Second-moment matrix of the rows (the model is zero-mean)."""
        x = self.observations
        return x.T @ x / x.shape[0]

    def to_csv(self, stream) -> None:
        """Write the batch as CSV with an X1..Xn header, one row per draw."""
        n = self.observations.shape[1]
        stream.write(",".join(f"X{i + 1}" for i in range(n)) + "\n")
        for row in self.observations:
            stream.write(",".join(f"{v:.17g}" for v in row) + "\n")


def build_star_covariance(alpha: EdgeWeightVector) -> StarCovariance:
    """Build the n x n star covariance: entry (i, j) is a_i*a_j, diagonal 1.

    Parameters
    ----------
    alpha : EdgeWeightVector
        Validated edge weights (0 < |a_i| < 1, n >= 2).

    Returns
    -------
    StarCovariance
    """
    a = alpha.entries
    sigma = np.outer(a, a)
    np.fill_diagonal(sigma, 1.0)
    return StarCovariance(sigma)


def sort_profile(alpha: EdgeWeightVector) -> SortProfile:
    """Magnitude sort of ``alpha``, non-increasing, stable in the original index."""
    mags = np.abs(alpha.entries)
    perm = np.argsort(-mags, kind="stable")
    return SortProfile(
        permutation=_frozen_array(perm, dtype=np.intp),
        magnitudes=_frozen_array(mags[perm]),
    )


# Rows are generated in fixed 4096-row blocks; block b owns the disjoint
# Philox counter range starting at b*4096 << 128, so row i of a batch
# depends only on (seed, i) and blocks can be generated in any order.
_ROW_BLOCK = 4096
_ROW_STRIDE_BITS = 128


def _block_rng(seed: int, first_row: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=seed, counter=first_row << _ROW_STRIDE_BITS)
    )


def sample_star_model(alpha: EdgeWeightVector, s: int, seed: int) -> SampleBatch:
    """Draw ``s`` rows of the star model a*Y + Z.

    Y is standard normal and Z_i is independent normal with variance
    1 - a_i^2, so the empirical covariance converges to the star covariance.
    Row i is a pure function of (seed, i): re-running with the same seed, or
    asking for a different number of rows, never changes the rows already
    drawn, and blocks of rows may be generated in parallel.

    Parameters
    ----------
    alpha : EdgeWeightVector
    s : int
        Number of rows, >= 1.
    seed : int
        Non-negative RNG seed.
    """
    if s < 1:
        raise ValueError(f"sample count must be >= 1, got {s}")
    a = alpha.entries
    noise_scale = np.sqrt(1.0 - a * a)
    n = a.size
    out = np.empty((s, n))
    for start in range(0, s, _ROW_BLOCK):
        rows = min(_ROW_BLOCK, s - start)
        draws = _block_rng(seed, start).standard_normal((rows, n + 1))
        out[start : start + rows] = draws[:, :1] * a + draws[:, 1:] * noise_scale
    return SampleBatch(observations=out, seed=seed)
