"""Random allocations: exact occupancy moments and regime experiments.

For n balls thrown uniformly into N boxes, the number of boxes holding
exactly r balls has closed-form mean and variance obtained from the
indicator decomposition over boxes:

    p  = P(one box holds r)        = C(n,r) N^-r (1 - 1/N)^(n-r)
    q  = P(two boxes hold r each)  = n!/(r!^2 (n-2r)!) N^-2r (1 - 2/N)^(n-2r)
    mean = N p
    var  = N p (1 - p) + N (N - 1) (q - p^2)

Everything is evaluated in log space; the difference q - p^2 is computed as
p^2 * expm1(log q - 2 log p) with the log ratio assembled from cancellation-
free pieces, so the variance stays accurate even when q and p^2 agree to six
digits. An exhaustive-enumeration oracle in the test suite guards every
(n, N) up to 6.

Standardized counts converge to the standard normal along balanced index
paths and to standardized Poisson laws along sparse or dense paths. The
Poisson-regime targets returned here are expressed on the lattice of the
standardized integer count (same affine dressing as the statistic itself):
an idealized standardized-Poisson target on its own lattice is at sup
distance about max_k pmf(k) from ANY integer statistic whose standardization
is not exactly (lambda, sqrt(lambda)), no matter how large N is, so the
lattice-aligned target is the form of the limit law that a sup-CDF test can
meaningfully check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..control_maps import RegimePoint, RegimeTag, classify_regime, phi_alloc
from ..distributions import (
    DiscreteMixing,
    Distribution,
    EmpiricalDistribution,
    LimitFamily,
    MixtureLaw,
    Normal,
    PoissonLattice,
)
from ..engine import ReplicationPlan, run_replicated

PATH_KINDS = ("central", "sparse", "dense", "two-point")


class AllocationConfigError(ValueError):
    """Invalid allocation configuration (bad r/n/N or degenerate variance)."""


def _validate_rnn(r: int, n: int, big_n: int) -> None:
    if r < 0 or n < 0 or big_n < 1:
        raise AllocationConfigError(
            f"need r >= 0, n >= 0, N >= 1, got r={r}, n={n}, N={big_n}"
        )
    if r > n:
        raise AllocationConfigError(f"need r <= n, got r={r}, n={n}")


def _log_single_box_prob(r: int, n: int, big_n: int) -> float:
    """log P(a fixed box holds exactly r of the n balls); -inf when zero."""
    if big_n == 1:
        return 0.0 if r == n else -math.inf
    log_binom = math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)
    tail = (n - r) * math.log1p(-1.0 / big_n) if n > r else 0.0
    return log_binom - r * math.log(big_n) + tail


def occupancy_mean(r: int, n: int, big_n: int) -> float:
    """Exact mean of the number of boxes holding exactly r of n balls."""
    _validate_rnn(r, n, big_n)
    lp = _log_single_box_prob(r, n, big_n)
    if lp == -math.inf:
        return 0.0
    return big_n * math.exp(lp)


def occupancy_variance(r: int, n: int, big_n: int) -> float:
    """Exact variance of the number of boxes holding exactly r of n balls."""
    _validate_rnn(r, n, big_n)
    if big_n == 1:
        return 0.0
    lp = _log_single_box_prob(r, n, big_n)
    if lp == -math.inf:
        return 0.0
    p = math.exp(lp)
    diagonal = big_n * p * (1.0 - p)
    pair_weight = big_n * (big_n - 1.0)
    if 2 * r > n or (big_n == 2 and n > 2 * r):
        # two boxes cannot both hold r: q = 0
        return diagonal - pair_weight * p * p
    # log(q/p^2) assembled from cancellation-free factors:
    #   q/p^2 = [ (n-r)!^2 / (n! (n-2r)!) ] * (1-2/N)^(n-2r) / (1-1/N)^(2(n-2r)+2r... )
    log_ratio = 0.0
    for i in range(r):
        log_ratio += math.log((n - r - i) / (n - i))
    if n > 2 * r:
        log_ratio += (n - 2 * r) * math.log1p(-2.0 / big_n)
    if n > r:
        log_ratio -= 2.0 * (n - r) * math.log1p(-1.0 / big_n)
    return diagonal + pair_weight * p * p * math.expm1(log_ratio)


# Spec-level aliases: exact moments of the occupancy statistic.
alloc_exact_mean = occupancy_mean
alloc_exact_var = occupancy_variance


@dataclass(frozen=True)
class AllocationPath:
    """One deterministic (balls, boxes) choice together with its limit point."""

    name: str
    balls: int
    boxes: int
    regime_point: RegimePoint

    def control_value(self, r: int) -> tuple[float, float]:
        return phi_alloc(r, self.balls, self.boxes)


def _matched_ball_count(r: int, big_n: int, lo: int, hi: int) -> int:
    """Ball count in [lo, hi] whose expected r-count is closest to 1."""
    best_n, best_gap = lo, math.inf
    for n in range(max(lo, max(r, 1)), hi + 1):
        if r == 0:
            observable = occupancy_mean(0, n, big_n) - (big_n - n)
        else:
            observable = occupancy_mean(r, n, big_n)
        gap = abs(observable - 1.0)
        if gap < best_gap:
            best_n, best_gap = n, gap
    return best_n


def central_path(r: int, big_n: int) -> AllocationPath:
    """Balanced path n = N: control value tends to (0, 0), normal regime."""
    return AllocationPath("central", big_n, big_n, RegimePoint(0.0, 0.0))


def sparse_path(big_n: int) -> AllocationPath:
    """Few balls, n ~ sqrt(2N): the r = 0 g-regime with lambda = 1.

    Within the sqrt(2N) window the exact count is chosen so the expected
    number of collision boxes is closest to 1, which centers the finite-N law
    on the limiting Poisson parameter.
    """
    guess = int(round(math.sqrt(2.0 * big_n)))
    n = _matched_ball_count(0, big_n, max(2, guess - 4), guess + 4)
    return AllocationPath("sparse", n, big_n, RegimePoint(1.0, 0.0))


def dense_path(r: int, big_n: int) -> AllocationPath:
    """The d-regime path with lambda = 1 for the given r.

    r = 0: n ~ N log N leaves about one box empty. r >= 1: n solves
    E[count of r-boxes] = 1 on the diverging branch (r = 1: n ~ N log(N log N);
    r >= 2 admits a small-n branch n ~ N^(1-1/r) * (r! )^(1/r) ... the branch
    with 1/T -> 0 relative to d is selected by the matching itself).
    """
    if r == 0:
        guess = int(round(big_n * math.log(big_n)))
        n = _matched_ball_count(0, big_n, guess - 4, guess + 4)
        return AllocationPath("dense", n, big_n, RegimePoint(0.0, 1.0))
    if r == 1:
        x = big_n * math.log(big_n)
        for _ in range(60):
            x = big_n * math.log(x)
        guess = int(round(x))
    else:
        # E[mu_r] ~ n^r / (r! N^(r-1)) e^(-n/N) = 1 near n = (r! N^(r-1))^(1/r)
        guess = int(round((math.gamma(r + 1) * big_n ** (r - 1)) ** (1.0 / r)))
        for _ in range(40):
            guess = int(round((math.gamma(r + 1) * big_n ** (r - 1)) ** (1.0 / r)
                              * math.exp(guess / big_n / r)))
    n = _matched_ball_count(r, big_n, max(r, guess - 4), guess + 4)
    return AllocationPath("dense", n, big_n, RegimePoint(0.0, 1.0))


@dataclass(frozen=True)
class AllocationConfig:
    """One allocation experiment: count level, path kind, and box count.

    ``path`` is one of central / sparse / dense / two-point; sparse exists
    only for r = 0. two-point mixes the central path and the r-appropriate
    Poisson path with probability 1/2 each, exercising a genuinely random
    index law.
    """

    r: int
    path: str
    boxes: int

    def __post_init__(self):
        if self.r < 0:
            raise AllocationConfigError(f"count level must be >= 0, got {self.r}")
        if self.path not in PATH_KINDS:
            raise AllocationConfigError(
                f"unknown path {self.path!r}, expected one of {PATH_KINDS}"
            )
        if self.path == "sparse" and self.r != 0:
            raise AllocationConfigError("the sparse (g) regime exists only for r = 0")
        if self.boxes < 2:
            raise AllocationConfigError(f"need at least 2 boxes, got {self.boxes}")


@dataclass(frozen=True)
class _Branch:
    path: AllocationPath
    mean: float
    sd: float
    tag: RegimeTag
    target: Distribution


def _branch(r: int, path: AllocationPath) -> _Branch:
    mean = occupancy_mean(r, path.balls, path.boxes)
    var = occupancy_variance(r, path.balls, path.boxes)
    if not var > 0.0:
        raise AllocationConfigError(
            f"occupancy variance is 0 for (r={r}, n={path.balls}, N={path.boxes})"
        )
    sd = math.sqrt(var)
    tag = classify_regime(r, path.regime_point)
    if tag.is_normal:
        target: Distribution = Normal(0.0, 1.0)
    elif tag.is_poisson:
        # limit law on the lattice of the standardized count: atoms
        # (offset + k - mean)/sd, Poisson(lambda) masses
        offset = int(round(mean - tag.lam))
        target = PoissonLattice(tag.lam, loc=mean, scale=sd, offset=offset)
    else:
        raise AllocationConfigError(
            f"path {path.name} has no admissible limit at {path.regime_point}"
        )
    return _Branch(path=path, mean=mean, sd=sd, tag=tag, target=target)


def resolve_branches(cfg: AllocationConfig) -> list[tuple[_Branch, float]]:
    """Weighted branches for a config: one for deterministic paths, two mixed."""
    if cfg.path == "central":
        return [(_branch(cfg.r, central_path(cfg.r, cfg.boxes)), 1.0)]
    if cfg.path == "sparse":
        return [(_branch(cfg.r, sparse_path(cfg.boxes)), 1.0)]
    if cfg.path == "dense":
        return [(_branch(cfg.r, dense_path(cfg.r, cfg.boxes)), 1.0)]
    first = _branch(cfg.r, central_path(cfg.r, cfg.boxes))
    second = _branch(
        cfg.r,
        sparse_path(cfg.boxes) if cfg.r == 0 else dense_path(cfg.r, cfg.boxes),
    )
    return [(first, 0.5), (second, 0.5)]


def allocation_target(cfg: AllocationConfig) -> Distribution:
    """The limit law for a config: a single regime law or a finite mixture."""
    branches = resolve_branches(cfg)
    if len(branches) == 1:
        return branches[0][0].target
    by_point = {
        (b.path.regime_point.g, b.path.regime_point.d): b.target for b, _ in branches
    }
    family = LimitFamily(lambda point: by_point[point])
    mixing = DiscreteMixing(
        [((b.path.regime_point.g, b.path.regime_point.d), w) for b, w in branches]
    )
    return MixtureLaw(family, mixing)


def simulate_standardized_count(
    rng: np.random.Generator, r: int, branches: list[tuple[_Branch, float]]
) -> float:
    """Throw the balls, count boxes with exactly r, standardize exactly."""
    if len(branches) == 1:
        branch = branches[0][0]
    else:
        u = rng.random()
        acc = 0.0
        branch = branches[-1][0]
        for b, w in branches:
            acc += w
            if u < acc:
                branch = b
                break
    boxes = np.bincount(
        rng.integers(0, branch.path.boxes, size=branch.path.balls),
        minlength=branch.path.boxes,
    )
    count = int(np.count_nonzero(boxes == r))
    return (count - branch.mean) / branch.sd


def run_allocations(
    cfg: AllocationConfig, plan: ReplicationPlan
) -> tuple[EmpiricalDistribution, Distribution]:
    """Simulate the standardized occupancy count and return it with its target."""
    branches = resolve_branches(cfg)
    target = allocation_target(cfg)
    empirical = run_replicated(
        plan, lambda rng: simulate_standardized_count(rng, cfg.r, branches)
    )
    return empirical, target
