"""LCS of two random words, one of them carrying an extra letter of probability p.

Exact and bit-parallel LCS kernels, canonical minimal matchings and
compartments, the random insertion chain, the constants ledger of the
linear-variance lower bound, an exact small-n oracle and a seeded Monte
Carlo harness.
"""
from .chain import (
    InsertionChain,
    LcsProfile,
    build_chain,
    exact_chain_law,
    lcs_profile,
    materialize,
    verify_distribution_identity,
)
from .constants import (
    ConstantsLedger,
    build_ledger,
    c1,
    c2,
    efron_stein_upper,
    expected_l22,
    interval_I,
    lower_bound_constant,
    on_probability_lower,
    partial_c10,
)
from .errors import BudgetExceeded, InvariantViolation
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    ExperimentSummary,
    estimate_conditional_variance_N,
    estimate_drift,
    estimate_event_E,
    estimate_lc_variance,
    estimate_nonempty_matches,
    estimate_slope_event,
    jackknife_variance,
)
from .lcs import (
    CompartmentDecomposition,
    Match,
    MatchingPair,
    count_nonempty_matches,
    decompose_compartments,
    enumerate_matches,
    extract_minimal_matching,
    lcs_length,
    lcs_length_bitparallel,
    minimal_matchings,
)
from .oracle import (
    ExactDistribution,
    exact_lc_distribution,
    exact_mixture_distribution,
    exact_profile_distribution,
    exact_uniform_lc_distribution,
    exact_variance_table,
)
from .words import ModelParams, SeedSpec, sample_x_word, sample_y_word, strip_extra_letter

__version__ = "0.1.0"
