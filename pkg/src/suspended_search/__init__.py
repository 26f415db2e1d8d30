"""Finding a suspended user's new account by querying the followers of former friends.

The package covers the search model and its policies, Monte Carlo
simulation, profile-similarity matching, the logistic classifiers that
supply reconnection probabilities, and a command-line front end.
"""
from ._backend import BACKEND
from .featurize import (
    REFOLLOW_FEATURES,
    AccountSnapshot,
    Interactions,
    RefollowRow,
    ZScoreStats,
    refollow_features,
    suspension_feature_names,
    suspension_features,
    zscore_fit_apply,
)
from .learn import (
    ConstantModel,
    Dataset,
    DegenerateDataError,
    KernelModel,
    LinearModel,
    RocCurve,
    pairwise_auc,
    predict,
    roc_auc,
    train_kernel_logistic,
    train_l1_logistic,
)
from .model import (
    FriendSpec,
    SearchDomainError,
    SearchInstance,
    SearchState,
    Termination,
    conditional_reconnection,
    existence_probability,
    failure_probability_given_A,
    query_count,
    queried_fraction,
    success_probability_given_A,
    unconditional_success_probability,
)
from .policy import (
    BruteForceRefused,
    GroundTruth,
    Policy,
    PolicyReport,
    actual_cost,
    block_violations,
    brute_force_optimal,
    expected_cost,
    gamma,
    greedy_policy,
    max_p_policy,
    min_n_policy,
    optimal_policy,
    random_policy,
)
from .sim import SimReport, simulate, simulate_given_truth
from .similarity import (
    ComparisonFeatures,
    MatchModel,
    PairLabel,
    ProfileRecord,
    SweepRow,
    auto_label,
    average_clustering,
    average_hash,
    build_cluster_graph,
    classify_pair,
    compare_profiles,
    image_match,
    levenshtein_ratio,
    match_probability,
    threshold_sweep,
)

__version__ = "0.1.0"
