"""Teacher-student binary perceptron learning laboratory.

Five online strategies are implemented over the same audited teacher oracle:
passive random training, exact version-space bisection (small systems),
deductive balance-point recovery, mean-field Bayesian active design, and the
orthogonality-augmented variant of the latter.
"""

from .belief import BeliefState, UpdateParams, belief_variance, infer, update, update_gain
from .deduction import BalancePoint, deduce_weight, find_balance_index, run_deductive
from .design import (
    AnnealSchedule,
    DesignContext,
    PatternMemory,
    anneal,
    balance_energy,
    metropolis_accept,
    orthogonal_energy,
    random_pattern,
)
from .harness import (
    ExperimentConfig,
    MetricsRow,
    StepRecord,
    emit_csv,
    emit_figures,
    run_ensemble,
    run_trajectory,
)
from .spins import SpinVector, TeacherOracle, classify, hamming_error, overlap, prefix_flip
from .version_space import (
    VersionSpace,
    bisect_design,
    conditional_correct_fractions,
    overlap_histogram,
    space_stats,
)

__all__ = [
    "AnnealSchedule",
    "BalancePoint",
    "BeliefState",
    "DesignContext",
    "ExperimentConfig",
    "MetricsRow",
    "PatternMemory",
    "SpinVector",
    "StepRecord",
    "TeacherOracle",
    "UpdateParams",
    "VersionSpace",
    "anneal",
    "balance_energy",
    "belief_variance",
    "bisect_design",
    "classify",
    "conditional_correct_fractions",
    "deduce_weight",
    "emit_csv",
    "emit_figures",
    "find_balance_index",
    "hamming_error",
    "infer",
    "metropolis_accept",
    "orthogonal_energy",
    "overlap",
    "overlap_histogram",
    "prefix_flip",
    "random_pattern",
    "run_deductive",
    "run_ensemble",
    "run_trajectory",
    "space_stats",
    "update",
    "update_gain",
]
