"""Randomly indexed row sums of a Gaussian triangular array.

Stage n of the array has entries xi_k / sqrt(|k_n|) over the d-dimensional
lattice, so the row sum over a rectangle N is exactly N(0, |N| / |k_n|).
Randomizing the rectangle through a mixing law rho on [0, inf)^d and letting
the stage grow produces the mixture of N(0, |t|) over rho; the experiment
simulates the actual random sums and hands back the quadrature mixture as
the comparison target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..distributions import (
    EmpiricalDistribution,
    MixingLaw,
    MixtureLaw,
    gaussian_variance_mixture,
)
from ..engine import ReplicationPlan, run_replicated

# Per-replicate scratch arrays are drawn in slices of this many normals.
_DRAW_SLICE = 1 << 20


def powers_of_two(j: int) -> int:
    return 1 << j

def squares(j: int) -> int:
    return j * j


@dataclass(frozen=True)
class RandomSumConfig:
    """Stage, per-axis sampling sequence, and mixing law of the index."""

    stage: int
    mixing: MixingLaw
    dimension: int = 1
    k_seq: Callable[[int], int] = powers_of_two

    def __post_init__(self):
        if self.stage < 1:
            raise ValueError(f"stage must be >= 1, got {self.stage}")
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.k_seq(self.stage) < 1:
            raise ValueError("sampling sequence must be positive at the stage")


def _as_tuple(t, d: int) -> tuple[float, ...]:
    if isinstance(t, (tuple, list, np.ndarray)):
        if len(t) != d:
            raise ValueError(f"mixing draw has {len(t)} coordinates, expected {d}")
        return tuple(float(v) for v in t)
    if d != 1:
        raise ValueError(f"scalar mixing draw for a {d}-dimensional index")
    return (float(t),)


def _normal_sum(rng: np.random.Generator, count: int) -> float:
    total = 0.0
    remaining = count
    while remaining > 0:
        block = min(remaining, _DRAW_SLICE)
        total += float(rng.standard_normal(block).sum())
        remaining -= block
    return total


def simulate_random_sum(rng: np.random.Generator, cfg: RandomSumConfig) -> float:
    """One replicate: draw the index from the mixing law, sum the row."""
    k = cfg.k_seq(cfg.stage)
    t = _as_tuple(cfg.mixing.sample(rng), cfg.dimension)
    sides = [max(1, math.floor(k * ti)) for ti in t]
    volume = math.prod(sides)
    return _normal_sum(rng, volume) / math.sqrt(float(k) ** cfg.dimension)


def random_sum_target(cfg: RandomSumConfig) -> MixtureLaw:
    """Mixture of N(0, |t|) over the mixing law."""
    return gaussian_variance_mixture(1.0, cfg.mixing)


def run_random_sum(
    cfg: RandomSumConfig, plan: ReplicationPlan
) -> tuple[EmpiricalDistribution, MixtureLaw]:
    empirical = run_replicated(plan, lambda rng: simulate_random_sum(rng, cfg))
    return empirical, random_sum_target(cfg)
