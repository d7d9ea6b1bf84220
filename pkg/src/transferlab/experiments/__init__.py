"""The four experiment suites: random sums, lattice fields, geometric
subsequences, and random allocations."""

from .allocations import (
    AllocationConfig,
    AllocationConfigError,
    AllocationPath,
    alloc_exact_mean,
    alloc_exact_var,
    allocation_target,
    central_path,
    dense_path,
    occupancy_mean,
    occupancy_variance,
    run_allocations,
    sparse_path,
)
from .na_field import (
    NAFieldConfig,
    field_lag_covariances,
    na_field_target,
    partial_sum_variance,
    run_na_field,
)
from .random_sum import (
    RandomSumConfig,
    powers_of_two,
    random_sum_target,
    run_random_sum,
    squares,
)
from .semistable import (
    LogIndexLaw,
    MantissaPushforward,
    SemistableConfig,
    SemistableResult,
    harmonic,
    mantissa,
    mantissa_jump_points,
    mantissa_psi,
    mantissa_pushforward_cdf,
    petersburg_normalized_sum,
    run_semistable_demo,
    sup_distance_to_log_law,
)

__all__ = [
    "AllocationConfig",
    "AllocationConfigError",
    "AllocationPath",
    "alloc_exact_mean",
    "alloc_exact_var",
    "allocation_target",
    "central_path",
    "dense_path",
    "occupancy_mean",
    "occupancy_variance",
    "run_allocations",
    "sparse_path",
    "NAFieldConfig",
    "field_lag_covariances",
    "na_field_target",
    "partial_sum_variance",
    "run_na_field",
    "RandomSumConfig",
    "powers_of_two",
    "random_sum_target",
    "run_random_sum",
    "squares",
    "LogIndexLaw",
    "MantissaPushforward",
    "SemistableConfig",
    "SemistableResult",
    "harmonic",
    "mantissa",
    "mantissa_jump_points",
    "mantissa_psi",
    "mantissa_pushforward_cdf",
    "petersburg_normalized_sum",
    "run_semistable_demo",
    "sup_distance_to_log_law",
]
