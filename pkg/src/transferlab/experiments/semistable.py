"""Geometric-subsequence suite: mantissa law and heavy-tailed random sums.

Along a sampling sequence k_p = 2^p (k_0 = 1) every index n has a block
position p and a mantissa t = n / k_p in [1, 2). A 1/k-weighted random index
pushes forward through the mantissa to (asymptotically) the logarithmic law
on [1, 2]; this module computes that pushforward exactly, blockwise, and
drives the self-consistency demo for normalized St. Petersburg sums, whose
distributional limits exist only along geometric subsequences.

Indices are handled as exact integers up to 2^53 and in a continuous
floating-point approximation above; at that size the lattice spacing of the
mantissa is below 2^-33 and the approximation error is far below any Monte
Carlo resolution used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import digamma

from ..distributions import (
    Distribution,
    EmpiricalDistribution,
    LogarithmicLaw,
)
from ..engine import ReplicationPlan, run_replicated_array

_EULER_GAMMA = float(np.euler_gamma)

# Exact integer arithmetic holds below this; beyond it indices live on the
# continuum approximation.
_EXACT_LIMIT = float(1 << 53)

# Inverse-CDF sampling uses an explicit cumulative table up to here.
_TABLE_LIMIT = 1 << 20


def harmonic(x: float) -> float:
    """Harmonic number H_x = digamma(x + 1) + gamma, valid for real x >= 0."""
    if x < 0:
        raise ValueError(f"harmonic number needs x >= 0, got {x}")
    return float(digamma(x + 1.0)) + _EULER_GAMMA


def mantissa(
    n: float | int, k_seq: Callable[[int], int] | None = None
) -> tuple[float, int]:
    """Block position of n along the sampling sequence: (t, p) with n = t * k_p.

    p is the unique block with k_p <= n < k_(p+1) and t = n / k_p lies in
    [1, c). The default sequence is k_p = 2^p, for which the division is
    exact in binary floating point; any strictly increasing integer sequence
    with k_0 = 1 may be passed instead.
    """
    if k_seq is not None:
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"index must be an integer >= 1, got {n}")
        if k_seq(0) != 1:
            raise ValueError("sampling sequence must start at k_0 = 1")
        p = 0
        while k_seq(p + 1) <= n:
            p += 1
        return n / k_seq(p), p
    if isinstance(n, int):
        if n < 1:
            raise ValueError(f"index must be >= 1, got {n}")
        p = n.bit_length() - 1
        if p <= 1022:
            return n / (1 << p), p
        return float(n >> (p - 52)) / (1 << 52), p
    if not n >= 1.0:
        raise ValueError(f"index must be >= 1, got {n}")
    p = int(math.floor(math.log2(n)))
    t = n / math.pow(2.0, p)
    # guard the edges of the float log
    if t < 1.0:
        p -= 1
        t = n / math.pow(2.0, p)
    elif t >= 2.0:
        p += 1
        t = n / math.pow(2.0, p)
    return t, p


def mantissa_psi(n: float | int, k_seq: Callable[[int], int] | None = None) -> float:
    """The mantissa alone: the position of n inside its block, in [1, c)."""
    return mantissa(n, k_seq)[0]


class LogIndexLaw:
    """Random index on {1, ..., horizon} with P(T = k) proportional to 1/k.

    The normalizer is the harmonic number of the horizon. Sampling inverts
    the CDF: an explicit cumulative table covers small indices; larger ones
    are recovered from H_k ~ log k + gamma by a Newton step. Horizons beyond
    2^53 are supported, in which case sampled indices above that point are
    floating-point approximations.
    """

    def __init__(self, horizon: float | int):
        if not horizon >= 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        self.horizon = float(horizon)
        self.normalizer = harmonic(self.horizon)
        table_size = int(min(self.horizon, _TABLE_LIMIT))
        self._cum = np.cumsum(1.0 / np.arange(1, table_size + 1))
        self._table_size = table_size

    def pmf(self, k: float) -> float:
        if k < 1 or k > self.horizon or (k <= _EXACT_LIMIT and k != int(k)):
            return 0.0
        return 1.0 / (k * self.normalizer)

    def weights(self) -> np.ndarray:
        """Explicit weight vector; only for horizons small enough to tabulate."""
        n = int(self.horizon)
        if n > 10_000_000:
            raise ValueError(f"horizon {n} too large for an explicit weight table")
        return (1.0 / np.arange(1, n + 1)) / self.normalizer

    def sample(self, rng: np.random.Generator) -> float:
        s = rng.random() * self.normalizer
        if s <= self._cum[-1]:
            return float(np.searchsorted(self._cum, s, side="left") + 1)
        # H_k = s  =>  k ~ exp(s - gamma), two Newton corrections in log space
        log_k = s - _EULER_GAMMA
        for _ in range(2):
            k = math.exp(log_k)
            log_k += s - harmonic(k)
        k = math.exp(log_k)
        if k <= _EXACT_LIMIT:
            k = float(min(max(round(k), self._table_size + 1), int(self.horizon)))
        return min(k, self.horizon)


def _block_bounds(
    horizon: float, k_seq: Callable[[int], int] | None = None
) -> list[tuple[float, float, int]]:
    """(k_p, block end, p) for every block with k_p <= horizon."""
    if k_seq is not None and k_seq(0) != 1:
        raise ValueError("sampling sequence must start at k_0 = 1")
    bounds = []
    p = 0
    while True:
        k_p = math.pow(2.0, p) if k_seq is None else float(k_seq(p))
        if k_p > horizon:
            break
        k_next = math.pow(2.0, p + 1) if k_seq is None else float(k_seq(p + 1))
        bounds.append((k_p, min(k_next - 1.0, horizon), p))
        p += 1
    return bounds


def mantissa_pushforward_cdf(
    horizon: float | int,
    t: float | np.ndarray,
    k_seq: Callable[[int], int] | None = None,
) -> float | np.ndarray:
    """Exact CDF of the mantissa of a 1/k-weighted index: P(psi(T) <= t).

    Computed blockwise: within block p the admissible indices are
    k_p <= k <= min(floor(k_p t), block end), and their total weight is a
    difference of harmonic numbers. Runs in O(log horizon) block iterations
    regardless of the horizon. The default sequence is k_p = 2^p.
    """
    law = LogIndexLaw(horizon)
    ts = np.asarray(t, dtype=float)
    scalar = ts.ndim == 0
    ts = np.atleast_1d(ts)
    mass = np.zeros_like(ts)
    for k_p, hi, _ in _block_bounds(law.horizon, k_seq):
        reach = np.minimum(np.floor(k_p * ts), hi)
        base = harmonic(k_p - 1.0)
        covered = reach >= k_p
        if np.any(covered):
            h_reach = digamma(reach[covered] + 1.0) + _EULER_GAMMA
            mass[covered] += h_reach - base
    out = mass / law.normalizer
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def mantissa_jump_points(horizon: float | int) -> np.ndarray:
    """All distinct mantissa values psi(k), k <= horizon, sorted.

    Only available for horizons small enough to enumerate; large-horizon
    laws are effectively continuous for test purposes.
    """
    n = int(horizon)
    if n > 4_000_000:
        raise ValueError(f"horizon {n} too large to enumerate mantissa atoms")
    pieces = []
    for k_p, hi, _ in _block_bounds(float(n)):
        ks = np.arange(int(k_p), int(hi) + 1, dtype=float)
        pieces.append(ks / k_p)
    return np.unique(np.concatenate(pieces))


class MantissaPushforward(Distribution):
    """The law of psi(T) for a 1/k-weighted index T on {1..horizon}."""

    def __init__(self, horizon: float | int):
        self.horizon = float(horizon)
        self._law = LogIndexLaw(horizon)

    def sample(self, rng):
        return mantissa_psi(self._law.sample(rng))

    def cdf(self, t):
        return float(mantissa_pushforward_cdf(self.horizon, t))

    def cdf_many(self, ts):
        return np.asarray(mantissa_pushforward_cdf(self.horizon, np.asarray(ts)))

    def jump_points(self):
        if self.horizon <= 4_000_000:
            return mantissa_jump_points(self.horizon)
        return None

    def cdf_left_many(self, ts):
        ts = np.asarray(ts, dtype=float)
        # left limit: the blockwise formula one ulp below the argument
        return np.asarray(mantissa_pushforward_cdf(self.horizon, np.nextafter(ts, -np.inf)))

    def cdf_left(self, t):
        return float(self.cdf_left_many(np.array([t]))[0])

    def point_mass(self, t):
        return self.cdf(t) - self.cdf_left(t)

    @property
    def support(self):  # type: ignore[override]
        return (1.0, 2.0)


def sup_distance_to_log_law(horizon: float | int) -> float:
    """sup_t |pushforward CDF - logarithmic CDF| over [1, 2], exact.

    The pushforward is a step function, so the supremum is attained at its
    jump points, approached from either side; the logarithmic CDF is
    continuous.
    """
    log_law = LogarithmicLaw(2.0)
    jumps = mantissa_jump_points(horizon)
    f_push = np.asarray(mantissa_pushforward_cdf(horizon, jumps))
    f_log = log_law.cdf_many(jumps)
    right = np.max(np.abs(f_push - f_log))
    f_push_left = np.concatenate(([0.0], f_push[:-1]))
    left = np.max(np.abs(f_push_left - f_log))
    return float(max(right, left))


def petersburg_normalized_sum(rng: np.random.Generator, index: float) -> float:
    """One draw of S_k / k - log2(k) for a St. Petersburg sum of k terms.

    Summands take value 2^j with probability 2^-j. The sum is sampled through
    its level counts: conditionally on the terms not yet classified, the
    count at each level is Binomial(remaining, 1/2), which reproduces the
    multinomial level occupancy exactly. Counts are drawn exactly below 2^53
    remaining terms and by the normal approximation above (distributional
    error below 2^-26 there), so sums over astronomically many terms cost
    O(log k) draws.
    """
    k = float(index)
    if not k >= 1.0:
        raise ValueError(f"index must be >= 1, got {index}")
    lg = math.log2(k)
    remaining = k
    acc = 0.0  # accumulates S/k
    j = 0
    while remaining > 0.0:
        j += 1
        if remaining > _EXACT_LIMIT:
            count = 0.5 * remaining + math.sqrt(0.25 * remaining) * rng.standard_normal()
        else:
            count = float(rng.binomial(int(remaining), 0.5))
        acc += math.pow(2.0, j - lg) * count
        remaining -= count
    return acc - lg


@dataclass(frozen=True)
class SemistableConfig:
    """Configuration of the self-consistency demo.

    ``horizon`` is the top of the 1/k-weighted index range; ``fixed_block``
    is the block exponent m of the comparison mixture, which samples the
    statistic at index floor(2^m t) with t drawn from the logarithmic law.
    """

    horizon: float = 1e60
    fixed_block: int = 40

    def __post_init__(self):
        if not self.horizon >= 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not 1 <= self.fixed_block <= 52:
            raise ValueError(f"fixed_block must be in [1, 52], got {self.fixed_block}")


@dataclass(frozen=True)
class SemistableResult:
    random_index: EmpiricalDistribution
    fixed_block_mixture: EmpiricalDistribution
    mantissa_marginal: EmpiricalDistribution
    mantissa_law: MantissaPushforward


def run_semistable_demo(cfg: SemistableConfig, plan: ReplicationPlan) -> SemistableResult:
    """Sample the randomly indexed statistic and its fixed-block mixture twin.

    Side A draws T from the 1/k law up to the horizon and evaluates the
    normalized St. Petersburg sum at T, recording the mantissa of T. Side B
    draws t from the logarithmic law and evaluates the statistic at the
    nearest index in the fixed block, floor(2^m t). The two replicate sets
    use disjoint stream ranges of the same plan.
    """
    index_law = LogIndexLaw(cfg.horizon)
    log_law = LogarithmicLaw(2.0)
    block_base = float(1 << cfg.fixed_block)

    def side_a(rng):
        t_index = index_law.sample(rng)
        return petersburg_normalized_sum(rng, t_index), mantissa_psi(t_index)

    def side_b(rng):
        t = log_law.sample(rng)
        return petersburg_normalized_sum(rng, math.floor(block_base * t))

    a_rows = run_replicated_array(plan, side_a)
    b_plan = ReplicationPlan(
        replicates=plan.replicates,
        seed=plan.seed.stream(plan.replicates),
        chunk_size=plan.chunk_size,
    )
    b_rows = run_replicated_array(b_plan, side_b)
    return SemistableResult(
        random_index=EmpiricalDistribution(a_rows[:, 0]),
        fixed_block_mixture=EmpiricalDistribution(b_rows[:, 0]),
        mantissa_marginal=EmpiricalDistribution(a_rows[:, 1]),
        mantissa_law=MantissaPushforward(cfg.horizon),
    )
