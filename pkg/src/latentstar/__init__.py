"""Closed-form minimum-trace factor analysis of latent star covariances."""

from .certificate import (
    BetaDiagonal,
    OptimalityCertificate,
    VerificationReport,
    build_beta,
    build_certificate,
    build_certificate_dominant,
    build_certificate_nondominant,
    build_null_basis,
    verify_certificate,
)
from .dominance import Dominance, DominanceVerdict, classify
from .errors import BranchMismatchError, EdgeWeightDomainError
from .model import (
    Branch,
    EdgeWeightVector,
    FactorDecomposition,
    SampleBatch,
    SortProfile,
    StarCovariance,
    build_star_covariance,
    sample_star_model,
    sort_profile,
)
from .oracle import (
    FeasibilityResult,
    OracleResult,
    brute_force_cmtfa,
    feasibility_check,
    projected_descent_cmtfa,
)
from .solver import (
    numerical_rank,
    solve,
    solve_rank1,
    solve_rank_n_minus_1,
    trace_advantage,
)
from .treesim import (
    ClusterSpec,
    DensityCheckResult,
    MonteCarloEstimate,
    TreeFeasibilityReport,
    check_tree_feasibility,
    density_sum_check,
    mc_prob_nondominant,
    prob_nondominant,
)

__version__ = "0.1.0"
