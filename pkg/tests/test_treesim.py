import json
import math

import numpy as np
import pytest

from latentstar import (
    Branch,
    ClusterSpec,
    Dominance,
    EdgeWeightVector,
    check_tree_feasibility,
    classify,
    density_sum_check,
    mc_prob_nondominant,
    prob_nondominant,
    solve,
)


class TestProbNondominant:
    @pytest.mark.parametrize(
        "n,expected",
        [(2, 0.5), (3, 1 - 1 / 6), (4, 1 - 1 / 24), (10, 1 - 1 / 3628800)],
    )
    def test_values(self, n, expected):
        assert prob_nondominant(n) == pytest.approx(expected, abs=1e-15)

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            prob_nondominant(1)

    def test_strictly_increasing(self):
        values = [prob_nondominant(n) for n in range(2, 18)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_huge_n_saturates(self):
        assert prob_nondominant(500) == 1.0


class TestMonteCarlo:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_factorial_law(self, n):
        estimate = mc_prob_nondominant(n, trials=100000, seed=123)
        assert abs(estimate.estimate - prob_nondominant(n)) < 0.01

    def test_reproducible(self):
        one = mc_prob_nondominant(3, trials=2000, seed=77)
        two = mc_prob_nondominant(3, trials=2000, seed=77)
        assert one == two

    def test_half_width_scales_like_inverse_sqrt(self):
        coarse = mc_prob_nondominant(3, trials=1000, seed=5)
        fine = mc_prob_nondominant(3, trials=100000, seed=5)
        ratio = coarse.half_width / fine.half_width
        assert ratio == pytest.approx(10.0, rel=0.25)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            mc_prob_nondominant(1, trials=10, seed=0)
        with pytest.raises(ValueError):
            mc_prob_nondominant(3, trials=0, seed=0)


class TestDensitySumCheck:
    @pytest.mark.parametrize("n", [3, 4])
    def test_power_law_fit(self, n):
        result = density_sum_check(n, trials=100000, seed=9)
        assert result.max_deviation < 0.01

    def test_restricted_mass(self):
        result = density_sum_check(3, trials=100000, seed=9)
        assert result.mass_below_one == pytest.approx(0.5, abs=0.01)
        result4 = density_sum_check(4, trials=100000, seed=9)
        assert result4.mass_below_one == pytest.approx(1 / 6, abs=0.01)

    def test_requires_n_at_least_three(self):
        with pytest.raises(ValueError):
            density_sum_check(2, trials=100, seed=0)


class TestClusterSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            ClusterSpec(sizes=(), delta=0.9)
        with pytest.raises(ValueError):
            ClusterSpec(sizes=(1, 3), delta=0.9)
        with pytest.raises(ValueError):
            ClusterSpec(sizes=(3, 3), delta=1.0)

    def test_json_round_trip(self):
        spec = ClusterSpec(sizes=(4, 3), delta=0.85)
        again = ClusterSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
        assert again == spec


class TestTreeFeasibility:
    def test_two_clusters_of_four(self):
        report = check_tree_feasibility(ClusterSpec(sizes=(4, 4), delta=0.9))
        assert report.threshold == pytest.approx(1 / (1 - math.sqrt(0.9)))
        assert report.sufficient_holds and report.necessary_holds
        assert report.exact_joint_probability == pytest.approx((23 / 24) ** 2)
        assert report.exact_joint_probability >= 0.9

    def test_two_clusters_of_three_fail(self):
        report = check_tree_feasibility(ClusterSpec(sizes=(3, 3), delta=0.9))
        assert not report.necessary_holds
        assert not report.sufficient_holds
        assert report.exact_joint_probability == pytest.approx((5 / 6) ** 2)

    def test_single_cluster(self):
        report = check_tree_feasibility(ClusterSpec(sizes=(3,), delta=0.8))
        assert report.threshold == pytest.approx(5.0)
        assert report.sufficient_holds
        assert report.exact_joint_probability == pytest.approx(5 / 6)

    def test_monte_carlo_estimate_agrees(self):
        report = check_tree_feasibility(
            ClusterSpec(sizes=(4, 4), delta=0.9), mc_trials=100000, seed=4
        )
        exact = report.exact_joint_probability
        assert abs(report.mc_estimate.estimate - exact) < 0.01

    def test_huge_factorials_compare_exactly(self):
        report = check_tree_feasibility(ClusterSpec(sizes=(200, 3), delta=0.9))
        assert report.necessary_holds
        assert not report.sufficient_holds  # 3! is far below the threshold

    def test_implication_chain_on_random_specs(self, rng):
        for _ in range(200):
            m = int(rng.integers(1, 6))
            sizes = tuple(int(v) for v in rng.integers(2, 9, m))
            delta = float(rng.uniform(0.5, 0.99))
            report = check_tree_feasibility(ClusterSpec(sizes=sizes, delta=delta))
            if report.sufficient_holds:
                assert report.exact_joint_probability >= delta * (1 - 1e-12)
            if report.exact_joint_probability >= delta:
                assert report.necessary_holds

    def test_report_serialization(self):
        payload = check_tree_feasibility(
            ClusterSpec(sizes=(4, 4), delta=0.9), mc_trials=1000, seed=0
        ).to_dict()
        assert set(payload) == {
            "necessary_holds",
            "sufficient_holds",
            "exact_joint_probability",
            "threshold",
            "mc_estimate",
        }
        assert set(payload["mc_estimate"]) == {"estimate", "half_width", "trials"}


def test_sampled_vectors_agree_with_solver(rng):
    """Vector-level dominance of sampled magnitudes matches the solve branch."""
    for _ in range(60):
        n = int(rng.integers(2, 7))
        alpha = EdgeWeightVector(
            rng.uniform(0.01, 1.0, n) * rng.choice([-1.0, 1.0], n)
        )
        verdict = classify(alpha, epsilon=0.0)
        branch = solve(alpha).branch
        if verdict.branch is Dominance.NON_DOMINANT:
            assert branch in (Branch.RANK1, Branch.BOUNDARY)
        elif verdict.branch is Dominance.DOMINANT:
            assert branch is Branch.RANK_N_MINUS_1
