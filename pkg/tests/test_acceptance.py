"""Acceptance suite: one test per release criterion, printed pass/fail.

Each criterion pins its tolerances and runtime budget; a failed assertion
names the offending case.
"""

import time

import numpy as np
import pytest

from latentstar import (
    Branch,
    ClusterSpec,
    EdgeWeightVector,
    FactorDecomposition,
    brute_force_cmtfa,
    build_beta,
    build_certificate,
    build_certificate_dominant,
    build_star_covariance,
    check_tree_feasibility,
    density_sum_check,
    mc_prob_nondominant,
    numerical_rank,
    prob_nondominant,
    projected_descent_cmtfa,
    solve,
    solve_rank1,
    solve_rank_n_minus_1,
    trace_advantage,
    verify_certificate,
)
from latentstar.cli import sweep_rows

from conftest import random_alpha


def _report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")
    assert ok, f"{name}{suffix}"


def test_criterion_1_rank_dichotomy():
    """500 random vectors, n in 3..8: rank exactly 1 or exactly n-1."""
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    for _ in range(500):
        n = int(rng.integers(3, 9))
        dec = solve(random_alpha(rng, n))
        rank = numerical_rank(dec.sigma_t)
        expected = n - 1 if dec.branch is Branch.RANK_N_MINUS_1 else 1
        assert rank == expected, f"rank {rank} != {expected} for branch {dec.branch}"
    elapsed = time.perf_counter() - start
    _report("1 rank-dichotomy", elapsed < 10.0, f"{elapsed:.1f}s < 10s")


def test_criterion_2_oracle_agreement():
    """100 random vectors, n in 3..4: both oracles reproduce the trace."""
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    worst_grid = worst_descent = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 5))
        alpha = random_alpha(rng, n)
        sigma = build_star_covariance(alpha)
        target = solve(alpha).trace_sigma_t
        grid_gap = abs(brute_force_cmtfa(sigma).best_trace - target)
        descent_gap = abs(projected_descent_cmtfa(sigma).best_trace - target)
        worst_grid = max(worst_grid, grid_gap)
        worst_descent = max(worst_descent, descent_gap)
        assert grid_gap <= 1e-3, (alpha.entries, grid_gap)
        assert descent_gap <= 1e-4, (alpha.entries, descent_gap)
    elapsed = time.perf_counter() - start
    _report(
        "2 oracle-agreement",
        elapsed < 120.0,
        f"grid<= {worst_grid:.1e}, descent<= {worst_descent:.1e}, {elapsed:.1f}s < 120s",
    )


def test_criterion_3_certificate_suite():
    """500 random vectors: certificates verify at 1e-8; tampering always caught."""
    rng = np.random.default_rng(303)
    for trial in range(500):
        n = int(rng.integers(3, 9))
        alpha = random_alpha(rng, n)
        dec = solve(alpha)
        cert = build_certificate(alpha)
        report = verify_certificate(dec, cert, tol=1e-8)
        assert report.passed, (alpha.entries, report.to_dict())

        tampered_d = np.array(dec.d)
        tampered_d[int(rng.integers(0, n))] += 0.05
        sigma = build_star_covariance(alpha).matrix
        tampered = FactorDecomposition(
            sigma_t=sigma - np.diag(tampered_d),
            d=tampered_d,
            branch=dec.branch,
            trace_sigma_t=float(np.trace(sigma - np.diag(tampered_d))),
        )
        assert not verify_certificate(tampered, cert, tol=1e-8).passed, (
            alpha.entries,
            trial,
        )
    _report("3 certificate-suite", True, "500/500 verified, 500/500 tampers caught")


def test_criterion_4_worked_example():
    """The dominant showcase vector, cross-checked by both oracles."""
    alpha = EdgeWeightVector([0.9, 0.2, 0.1])
    dec = solve(alpha)
    np.testing.assert_allclose(np.diag(dec.sigma_t), [0.27, 0.16, 0.07], atol=1e-12)
    assert dec.trace_sigma_t == pytest.approx(0.50, abs=1e-12)
    assert trace_advantage(alpha) == pytest.approx(0.36, abs=1e-12)
    cert = build_certificate_dominant(alpha)
    np.testing.assert_array_equal(cert.witness[:, 0], [1.0, -1.0, -1.0])
    residual = float(np.linalg.norm(dec.sigma_t @ cert.witness[:, 0]))
    assert residual <= 1e-10
    sigma = build_star_covariance(alpha)
    assert abs(brute_force_cmtfa(sigma).best_trace - 0.50) <= 1e-3
    assert abs(projected_descent_cmtfa(sigma).best_trace - 0.50) <= 1e-4
    _report("4 worked-example", True, f"null residual {residual:.1e}")


def test_criterion_5_boundary_collapse():
    """At the dominance boundary both closed forms and the witness degenerate."""
    alpha = EdgeWeightVector([0.7, 0.4, 0.3])
    assert build_beta(alpha).beta_nn == pytest.approx(1.0, abs=1e-12)
    nd = solve_rank1(alpha)
    dm = solve_rank_n_minus_1(alpha)
    gap = float(np.max(np.abs(nd.sigma_t - dm.sigma_t)))
    assert gap <= 1e-12
    witness_rank = numerical_rank(build_certificate(alpha).witness)
    assert witness_rank == 1
    _report("5 boundary-collapse", True, f"matrix gap {gap:.1e}, witness rank 1")


def test_criterion_6_probability_law():
    """Monte Carlo matches 1 - 1/n! within 0.01; tail-sum law fits within 0.01."""
    start = time.perf_counter()
    for n in (2, 3, 4, 5):
        estimate = mc_prob_nondominant(n, trials=100000, seed=600 + n)
        gap = abs(estimate.estimate - prob_nondominant(n))
        assert gap < 0.01, (n, estimate.estimate, prob_nondominant(n))
    for n in (3, 4):
        deviation = density_sum_check(n, trials=100000, seed=650 + n).max_deviation
        assert deviation < 0.01, (n, deviation)
    elapsed = time.perf_counter() - start
    _report("6 probability-law", elapsed < 30.0, f"{elapsed:.1f}s < 30s")


def test_criterion_7_tree_implication_chain():
    """sufficient => exact >= delta => necessary over 200 random cluster specs."""
    rng = np.random.default_rng(707)
    for _ in range(200):
        m = int(rng.integers(1, 6))
        sizes = tuple(int(v) for v in rng.integers(2, 9, m))
        delta = float(rng.uniform(0.5, 0.99))
        report = check_tree_feasibility(ClusterSpec(sizes=sizes, delta=delta))
        if report.sufficient_holds:
            assert report.exact_joint_probability >= delta * (1 - 1e-12), (
                sizes,
                delta,
            )
        if report.exact_joint_probability >= delta:
            assert report.necessary_holds, (sizes, delta)

    four = check_tree_feasibility(ClusterSpec(sizes=(4, 4), delta=0.9))
    assert four.sufficient_holds and four.necessary_holds
    assert four.exact_joint_probability == pytest.approx((23 / 24) ** 2)
    three = check_tree_feasibility(ClusterSpec(sizes=(3, 3), delta=0.9))
    assert not three.necessary_holds
    assert three.exact_joint_probability == pytest.approx((5 / 6) ** 2)
    single = check_tree_feasibility(ClusterSpec(sizes=(3,), delta=0.8))
    assert single.sufficient_holds
    assert single.exact_joint_probability == pytest.approx(5 / 6)
    _report("7 tree-implications", True, "200 specs + 3 worked cases")


def test_criterion_8_sweep_reproduction():
    """Trace advantage rises from 0 at the boundary and respects its cap."""
    tail = [0.2, 0.1]
    rows = sweep_rows(tail, start=0.3, stop=0.95, step=0.05)
    advantages = [row[3] for row in rows]
    assert rows[0][0] == pytest.approx(0.3)
    assert abs(advantages[0]) < 1e-12
    assert all(b > a for a, b in zip(advantages, advantages[1:]))
    tail_sum = sum(tail)
    cap = 1 - 2 * tail_sum + tail_sum**2
    assert all(adv < cap for adv in advantages)
    _report("8 sweep-reproduction", True, f"{len(rows)} rows, cap {cap:.2f}")
