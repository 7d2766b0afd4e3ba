"""Brute-force verification of trace minimality, independent of the closed forms.

The underlying program: over diagonal vectors d, maximize sum(d) subject to
Sigma - diag(d) staying positive semidefinite and d >= 0.  Two deliberately
different searches are provided so a bug in one cannot silently confirm the
other:

* a coordinate grid with local refinement (small n only): the trailing n-1
  coordinates run over a grid and the first coordinate is pushed to the PSD
  boundary in closed form, which makes the gridded surrogate concave and the
  refinement reliable;
* projected ascent that follows the PSD boundary, with bisection back to
  the last feasible iterate whenever a step leaves the cone.

Feasibility is judged by the smallest eigenvalue rather than a Cholesky
success flag, since the optimum sits exactly on the boundary of the cone.
Reported traces are Tr(Sigma - diag(d)), the quantity being minimized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional

import numpy as np

from .model import StarCovariance

__all__ = [
    "OracleResult",
    "FeasibilityResult",
    "feasibility_check",
    "brute_force_cmtfa",
    "projected_descent_cmtfa",
    "FEASIBILITY_TOL",
]

FEASIBILITY_TOL = 1e-9
_ACTIVE_TOL = 1e-7


class FeasibilityResult(NamedTuple):
    feasible: bool
    lambda_min: float


@dataclass(frozen=True)
class OracleResult:
    """Best feasible diagonal found, with method and search diagnostics."""

    best_d: np.ndarray
    best_trace: float
    method: str
    diagnostics: Dict[str, object]

    def __post_init__(self):
        d = np.array(self.best_d, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "best_d", d)

    def to_dict(self) -> dict:
        return {
            "best_d": [float(v) for v in self.best_d],
            "best_trace": float(self.best_trace),
            "method": self.method,
            "diagnostics": dict(self.diagnostics),
        }


def feasibility_check(
    sigma: StarCovariance, d: np.ndarray, tol: float = FEASIBILITY_TOL
) -> FeasibilityResult:
    """True iff d >= -tol entrywise and lambda_min(Sigma - diag(d)) >= -tol."""
    d = np.asarray(d, dtype=float)
    if d.shape != (sigma.n,):
        raise ValueError(f"diagonal has shape {d.shape}, expected ({sigma.n},)")
    lam = float(np.linalg.eigvalsh(sigma.matrix - np.diag(d))[0])
    feasible = bool(np.min(d) >= -tol and lam >= -tol)
    return FeasibilityResult(feasible=feasible, lambda_min=lam)


def _lambda_min(matrix: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(matrix)[0])


def _evaluate_rest_grid(matrix: np.ndarray, rest: np.ndarray) -> tuple:
    """Max feasible first coordinate and total sum(d) for each rest-row.

    For fixed trailing coordinates r, the largest d_1 keeping
    M - d_1 e_1 e_1' within the tolerance band of the PSD cone (where
    M = Sigma - diag(0, r)) is 1/((M + tol*I)^-1)_11, the standard rank-one
    downdate bound.  Rows whose M is already outside the band get -inf.
    """
    k, m = rest.shape
    n = m + 1
    idx = np.arange(1, n)
    stacked = np.broadcast_to(matrix, (k, n, n)).copy()
    stacked[:, idx, idx] -= rest
    lams = np.linalg.eigvalsh(stacked)[:, 0]
    # run the downdate at half the feasibility band so rounding noise cannot
    # push the reported point past the -FEASIBILITY_TOL cut
    ok = lams > -0.25 * FEASIBILITY_TOL
    d1 = np.full(k, -np.inf)
    if ok.any():
        shifted = stacked[ok]
        shifted[:, np.arange(n), np.arange(n)] += 0.5 * FEASIBILITY_TOL
        inv11 = np.linalg.inv(shifted)[:, 0, 0]
        d1[ok] = np.clip(1.0 / inv11, 0.0, 1.0)
    return d1, d1 + rest.sum(axis=1)


def _best_on_rest_grid(matrix: np.ndarray, axes) -> tuple:
    """Best (d1, rest, total) over a product grid of trailing coordinates."""
    mesh = np.meshgrid(*axes, indexing="ij")
    rest = np.stack([g.ravel() for g in mesh], axis=-1)
    d1, totals = _evaluate_rest_grid(matrix, rest)
    winner = int(np.argmax(totals))
    return d1[winner], rest[winner], float(totals[winner]), rest.shape[0]


def brute_force_cmtfa(
    sigma: StarCovariance, resolution: float = 0.05, refine_rounds: int = 3
) -> OracleResult:
    """Grid search over d, then shrink the grid around the incumbent.

    Starts from a full product grid at ``resolution``; each refinement
    divides the spacing by 10 and re-searches a box around the incumbent,
    followed by fixed-spacing walk passes so the incumbent can travel along
    flat ridges.  The best total never decreases across rounds.  Cost grows
    as grid^(n-1); limited to n <= 5.
    """
    n = sigma.n
    if n > 5:
        raise ValueError(f"grid oracle supports n <= 5, got n = {n}")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    matrix = np.asarray(sigma.matrix)
    axes = [np.arange(0.0, 1.0 + 0.5 * resolution, resolution)] * (n - 1)
    d1, rest, total, evaluations = _best_on_rest_grid(matrix, axes)
    if not np.isfinite(total):
        raise ValueError(
            "no feasible grid point; the input matrix is not positive semidefinite"
        )

    def walk(d1, rest, total, spacing, evaluations):
        offsets = np.arange(-2, 3) * spacing
        for _ in range(100):
            axes = [
                np.unique(np.clip(rest[j] + offsets, 0.0, 1.0)) for j in range(n - 1)
            ]
            c_d1, c_rest, c_total, used = _best_on_rest_grid(matrix, axes)
            evaluations += used
            if c_total > total:
                d1, rest, total = c_d1, c_rest, c_total
            else:
                break
        return d1, rest, total, evaluations

    spacing = resolution
    d1, rest, total, evaluations = walk(d1, rest, total, spacing, evaluations)
    for _ in range(refine_rounds):
        spacing /= 10.0
        offsets = np.arange(-10, 11) * spacing
        axes = [np.unique(np.clip(rest[j] + offsets, 0.0, 1.0)) for j in range(n - 1)]
        c_d1, c_rest, c_total, used = _best_on_rest_grid(matrix, axes)
        evaluations += used
        if c_total >= total:
            d1, rest, total = c_d1, c_rest, c_total
        d1, rest, total, evaluations = walk(d1, rest, total, spacing, evaluations)
    best_d = np.concatenate([[d1], rest])
    return OracleResult(
        best_d=best_d,
        best_trace=float(np.trace(matrix) - total),
        method="GridRefine",
        diagnostics={
            "final_resolution": spacing,
            "refine_rounds": refine_rounds,
            "evaluations": evaluations,
        },
    )


def _bisect_to_feasible(
    matrix: np.ndarray, anchor: np.ndarray, target: np.ndarray, iters: int = 30
) -> np.ndarray:
    """Largest feasible point on the segment anchor -> target (anchor feasible)."""
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        point = anchor + mid * (target - anchor)
        if _lambda_min(matrix - np.diag(point)) >= -FEASIBILITY_TOL:
            lo = mid
        else:
            hi = mid
    return anchor + lo * (target - anchor)


def projected_descent_cmtfa(
    sigma: StarCovariance,
    step: float = 0.05,
    max_iter: int = 800,
    seed: int = 0,
    d0: Optional[np.ndarray] = None,
) -> OracleResult:
    """Boundary-following ascent of sum(d) over the PSD-feasible box.

    Strictly inside the cone the ascent direction is the all-ones vector.
    On the boundary, ones is projected onto the tangent of the active
    eigenvalue constraints, then tilted slightly inward (spending 30% of the
    projected ascent rate) so the iterate rides just inside the cone instead
    of pinning itself to the tolerance contour, where curvature would leave
    no room to move.  Every step is clipped to [0, 1]^n and pulled back to
    the last feasible iterate by bisection when it leaves the cone; the step
    halves on failure to improve and the best feasible iterate is returned.
    Deterministic for fixed (seed, parameters): the seed only drives probe
    directions when the tangent degenerates.
    """
    n = sigma.n
    if n > 64:
        raise ValueError(f"descent oracle supports n <= 64, got n = {n}")
    matrix = np.asarray(sigma.matrix)
    ones = np.ones(n)
    if d0 is None:
        d = np.zeros(n)
    else:
        d = np.clip(np.asarray(d0, dtype=float), 0.0, 1.0)
        if _lambda_min(matrix - np.diag(d)) < -FEASIBILITY_TOL:
            d = _bisect_to_feasible(matrix, np.zeros(n), d)
    rng = np.random.Generator(np.random.Philox(key=seed))
    best_d = d.copy()
    best_total = float(d.sum())
    current_step = float(step)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        eigvals, eigvecs = np.linalg.eigh(matrix - np.diag(d))
        # constraints within reach of the current step count as active, which
        # stops the active set from chattering between nearby faces
        active = eigvals < max(_ACTIVE_TOL, 0.3 * current_step)
        if active.any():
            squares = eigvecs[:, active] ** 2
            coeffs, *_ = np.linalg.lstsq(squares, ones, rcond=None)
            tangent = ones - squares @ coeffs
            inward = squares.sum(axis=1)
            tilt = 0.3 * float(ones @ tangent) / max(float(ones @ inward), 1e-12)
            direction = tangent - tilt * inward
        else:
            direction = ones
        scale = float(np.max(np.abs(direction)))
        if scale < 1e-13:
            direction = rng.uniform(0.0, 1.0, n)
            scale = float(np.max(np.abs(direction)))
        ascent_rate = float(ones @ (direction / scale))
        target = np.clip(d + current_step * direction / scale, 0.0, 1.0)
        if _lambda_min(matrix - np.diag(target)) >= -FEASIBILITY_TOL:
            candidate = target
        else:
            candidate = _bisect_to_feasible(matrix, d, target)
        gain = float(candidate.sum() - d.sum())
        if gain > 1e-12 and candidate.sum() > best_total:
            best_d = candidate.copy()
            best_total = float(candidate.sum())
        # sufficient-increase rule: when curvature eats most of the step,
        # shrink it instead of crawling at full length
        if gain > max(1e-12, 0.01 * current_step * max(ascent_rate, 0.0)):
            d = candidate
            current_step = min(float(step), current_step * 1.3)
        else:
            if gain > 1e-12:
                d = candidate
            current_step *= 0.5
            if current_step < 1e-10:
                converged = True
                break
    return OracleResult(
        best_d=best_d,
        best_trace=float(np.trace(matrix) - best_total),
        method="ProjectedDescent",
        diagnostics={
            "iterations": iterations,
            "converged": converged,
            "final_step": current_step,
        },
    )
