"""transferlab: a Monte Carlo laboratory for randomly indexed limit theorems.

Randomly indexed families of random variables converge to mixtures of their
deterministic-index limits; this package simulates the canonical example
suites (triangular-array random sums, negatively associated lattice fields,
geometric-subsequence heavy-tailed sums, random allocations), builds the
corresponding mixture targets exactly or by quadrature, and decides agreement
with distribution-free goodness-of-fit tests under a fully deterministic,
parallelizable replication engine.
"""

from .control_maps import (
    ControlMap,
    MultiIndex,
    RegimePoint,
    RegimeTag,
    allocation_map,
    classify_regime,
    phi_alloc,
    phi_triangular,
    probe_injectivity,
    triangular_array_map,
)
from .distributions import (
    ContinuousMixing,
    DiscreteMixing,
    Distribution,
    EmpiricalDistribution,
    LimitFamily,
    LogarithmicLaw,
    MixingLaw,
    MixtureLaw,
    Normal,
    PointMass,
    PoissonLattice,
    StandardizedPoisson,
    Uniform,
    UniformBoxMixing,
    gaussian_variance_family,
    gaussian_variance_mixture,
    log_law_cdf,
    mixture_cdf,
    mixture_sample,
    product_volume_mixing,
    std_poisson_cdf,
    uniform_box_mixing,
)
from .engine import (
    ReplicateError,
    ReplicationPlan,
    SeedSpec,
    run_replicated,
    run_replicated_array,
    worker_count,
)
from .gof import GofReport, ks_one_sample, ks_two_sample, wasserstein1
from .quadrature import QuadratureError, adaptive_simpson

__version__ = "0.1.0"
