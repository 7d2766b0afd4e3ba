"""Probabilistic feasibility of assembling star clusters into a Gaussian tree.

For a cluster of n observables with iid uniform(0, 1) edge-weight magnitudes,
the chance that a designated entry strictly exceeds the sum of all the others
is 1/n! (integrate the Irwin-Hall tail-sum law t^{n-2}/(n-2)! over the entry),
so a designated entry fails to dominate with probability 1 - 1/n!.  Treating
that as the per-cluster success probability, m independent clusters all
succeed with probability prod_i (1 - 1/n_i!), and requiring that product to
reach delta yields factorial threshold conditions:

    necessary:   mean_i(n_i!) >= 1 / (1 - delta^(1/m))
    sufficient:  min_i(n_i)!  >= 1 / (1 - delta^(1/m))

Everything here is exact integer/fraction arithmetic where possible, with
seeded Monte Carlo estimators for empirical validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

__all__ = [
    "MonteCarloEstimate",
    "DensityCheckResult",
    "ClusterSpec",
    "TreeFeasibilityReport",
    "prob_nondominant",
    "mc_prob_nondominant",
    "density_sum_check",
    "check_tree_feasibility",
]

# relative slack on the factorial threshold comparisons, so representation
# noise in delta^(1/m) cannot flip a verdict
COMPARISON_GUARD = 1e-12

# math.factorial(170) is the largest factorial representable as a float
_FLOAT_FACTORIAL_LIMIT = 170


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample fraction with a 95% normal-approximation half-width."""

    estimate: float
    half_width: float
    trials: int

    def to_dict(self) -> dict:
        return {
            "estimate": float(self.estimate),
            "half_width": float(self.half_width),
            "trials": self.trials,
        }


@dataclass(frozen=True)
class DensityCheckResult:
    """Goodness of fit of the restricted tail-sum sample to its power law."""

    max_deviation: float
    mass_below_one: float
    kept: int
    trials: int
    n: int

    def to_dict(self) -> dict:
        return {
            "max_deviation": float(self.max_deviation),
            "mass_below_one": float(self.mass_below_one),
            "kept": self.kept,
            "trials": self.trials,
            "n": self.n,
        }


@dataclass(frozen=True)
class ClusterSpec:
    """Cluster sizes n_1..n_m and the required joint success probability."""

    sizes: Tuple[int, ...]
    delta: float

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        if len(sizes) < 1:
            raise ValueError("need at least one cluster")
        if any(n < 2 for n in sizes):
            raise ValueError(f"every cluster needs >= 2 observables, got {sizes}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie strictly in (0, 1), got {self.delta}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def m(self) -> int:
        return len(self.sizes)

    def to_dict(self) -> dict:
        return {"sizes": list(self.sizes), "delta": float(self.delta)}

    @classmethod
    def from_dict(cls, data: dict) -> "ClusterSpec":
        return cls(sizes=tuple(data["sizes"]), delta=float(data["delta"]))


@dataclass(frozen=True)
class TreeFeasibilityReport:
    necessary_holds: bool
    sufficient_holds: bool
    exact_joint_probability: float
    threshold: float
    mc_estimate: Optional[MonteCarloEstimate] = None

    def to_dict(self) -> dict:
        return {
            "necessary_holds": self.necessary_holds,
            "sufficient_holds": self.sufficient_holds,
            "exact_joint_probability": float(self.exact_joint_probability),
            "threshold": float(self.threshold),
            "mc_estimate": None if self.mc_estimate is None else self.mc_estimate.to_dict(),
        }


def prob_nondominant(n: int) -> float:
    """1 - 1/n!: the chance a designated entry fails to dominate the rest."""
    if n < 2:
        raise ValueError(f"cluster size must be >= 2, got {n}")
    if n > _FLOAT_FACTORIAL_LIMIT:
        return 1.0
    return 1.0 - 1.0 / math.factorial(n)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def _half_width(p_hat: float, trials: int) -> float:
    return 1.96 * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / trials)


def mc_prob_nondominant(n: int, trials: int, seed: int) -> MonteCarloEstimate:
    """Monte Carlo estimate of prob_nondominant(n).

    Each trial draws n iid uniform(0, 1) magnitudes plus one uniform pivot
    selector, so any entry may be the one tested; the trial succeeds when the
    pivot entry does not strictly exceed the sum of the other magnitudes.
    Draw counts per trial are fixed, so trial i depends only on (seed, i).
    """
    if n < 2:
        raise ValueError(f"cluster size must be >= 2, got {n}")
    if trials < 1:
        raise ValueError(f"trial count must be >= 1, got {trials}")
    draws = _rng(seed).random((trials, n + 1))
    magnitudes = draws[:, :n]
    pivot = np.minimum((draws[:, n] * n).astype(np.intp), n - 1)
    pivot_value = magnitudes[np.arange(trials), pivot]
    margin = magnitudes.sum(axis=1) - 2.0 * pivot_value
    p_hat = float(np.mean(margin > 0.0))
    return MonteCarloEstimate(
        estimate=p_hat, half_width=_half_width(p_hat, trials), trials=trials
    )


def _restricted_tail_sums(n: int, trials: int, seed: int) -> np.ndarray:
    """Sorted sums of n-1 iid uniforms, restricted to sums below one."""
    sums = _rng(seed).random((trials, n - 1)).sum(axis=1)
    return np.sort(sums[sums < 1.0])


def theoretical_tail_sum_cdf(t: np.ndarray, n: int) -> np.ndarray:
    """CDF of the tail sum conditioned on being below one: t^(n-1) on (0, 1)."""
    return np.asarray(t) ** (n - 1)


def density_sum_check(n: int, trials: int, seed: int) -> DensityCheckResult:
    """Kolmogorov-Smirnov-style check of the tail-sum law on (0, 1).

    The sum of the n-1 non-pivot magnitudes has density t^(n-2)/(n-2)! below
    one; conditioned on landing there (mass 1/(n-1)!) its CDF is t^(n-1).
    Returns the two-sided sup deviation of the empirical CDF from that law.
    """
    if n < 3:
        raise ValueError(f"tail-sum check needs n >= 3, got {n}")
    if trials < 1:
        raise ValueError(f"trial count must be >= 1, got {trials}")
    sample = _restricted_tail_sums(n, trials, seed)
    kept = sample.size
    if kept == 0:
        return DensityCheckResult(
            max_deviation=1.0, mass_below_one=0.0, kept=0, trials=trials, n=n
        )
    theory = theoretical_tail_sum_cdf(sample, n)
    upper = np.arange(1, kept + 1) / kept
    lower = np.arange(0, kept) / kept
    deviation = float(
        max(np.max(np.abs(upper - theory)), np.max(np.abs(lower - theory)))
    )
    return DensityCheckResult(
        max_deviation=deviation,
        mass_below_one=kept / trials,
        kept=kept,
        trials=trials,
        n=n,
    )


def _joint_mc(spec: ClusterSpec, trials: int, seed: int) -> MonteCarloEstimate:
    """Simulate all m clusters per trial; success = every pivot fails to dominate."""
    columns = sum(n + 1 for n in spec.sizes)
    draws = _rng(seed).random((trials, columns))
    success = np.ones(trials, dtype=bool)
    offset = 0
    for n in spec.sizes:
        magnitudes = draws[:, offset : offset + n]
        pivot = np.minimum((draws[:, offset + n] * n).astype(np.intp), n - 1)
        pivot_value = magnitudes[np.arange(trials), pivot]
        success &= magnitudes.sum(axis=1) - 2.0 * pivot_value > 0.0
        offset += n + 1
    p_hat = float(np.mean(success))
    return MonteCarloEstimate(
        estimate=p_hat, half_width=_half_width(p_hat, trials), trials=trials
    )


def check_tree_feasibility(
    spec: ClusterSpec, mc_trials: Optional[int] = None, seed: int = 0
) -> TreeFeasibilityReport:
    """Evaluate the factorial threshold conditions for the cluster spec.

    Factorials are exact integers; the comparisons against the float
    threshold carry a 1e-12 relative guard band (Python compares int vs
    float exactly, so huge factorials never overflow).  With ``mc_trials``
    set, the joint success probability is also estimated by simulation.
    """
    m = spec.m
    factorials = [math.factorial(n) for n in spec.sizes]
    threshold = 1.0 / (1.0 - spec.delta ** (1.0 / m))
    slack = 1.0 - COMPARISON_GUARD
    necessary = sum(factorials) >= m * threshold * slack
    sufficient = min(factorials) >= threshold * slack
    exact = 1.0
    for n, f in zip(spec.sizes, factorials):
        exact *= 1.0 if n > _FLOAT_FACTORIAL_LIMIT else 1.0 - 1.0 / f
    mc = None if mc_trials is None else _joint_mc(spec, mc_trials, seed)
    return TreeFeasibilityReport(
        necessary_holds=bool(necessary),
        sufficient_holds=bool(sufficient),
        exact_joint_probability=exact,
        threshold=threshold,
        mc_estimate=mc,
    )
