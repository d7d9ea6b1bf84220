"""Partial sums of a negatively associated Gaussian lattice field.

The field is the moving difference X_k = eps_k - a * eps_(k + e1) of an
i.i.d. standard normal field, with a in (0, 1). It is stationary, centered,
and Gaussian with nonpositive cross-correlations (lag e1 has covariance -a,
all other nonzero lags vanish), hence negatively associated. The covariance
series sums to sigma^2 = (1 - a)^2, so normalized rectangular partial sums
at a randomized corner converge to the mixture of N(0, (1-a)^2 |t|).

Because the construction is linear Gaussian, the finite-lattice law of the
partial sum is exactly normal with a closed-form variance; that closed form
is the oracle the unit tests lean on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..distributions import (
    ContinuousMixing,
    DiscreteMixing,
    EmpiricalDistribution,
    MixingLaw,
    MixtureLaw,
    gaussian_variance_mixture,
)
from ..engine import ReplicationPlan, SeedSpec, run_replicated

_MAX_LATTICE_CELLS = 50_000_000


@dataclass(frozen=True)
class NAFieldConfig:
    """Difference coefficient, lattice scale vector, and index mixing law."""

    a: float
    lattice: tuple[int, ...]
    mixing: MixingLaw

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise ValueError(f"difference coefficient must be in (0, 1), got {self.a}")
        if not self.lattice or any(n < 1 for n in self.lattice):
            raise ValueError(f"lattice sizes must be >= 1, got {self.lattice}")

    @property
    def dimension(self) -> int:
        return len(self.lattice)

    @property
    def sigma_sq(self) -> float:
        return (1.0 - self.a) ** 2


def mixing_upper_bounds(mixing: MixingLaw, d: int) -> tuple[float, ...]:
    """Componentwise top of the mixing support, used to size the field."""
    if isinstance(mixing, DiscreteMixing):
        tops = []
        for axis in range(d):
            tops.append(
                max(
                    (t[axis] if isinstance(t, (tuple, list)) else float(t))
                    for t, _ in mixing.atoms
                )
            )
        return tuple(tops)
    if isinstance(mixing, ContinuousMixing):
        if len(mixing.box) != d:
            raise ValueError(
                f"mixing box has {len(mixing.box)} axes, lattice has {d}"
            )
        return tuple(hi for _, hi in mixing.box)
    raise TypeError(f"cannot size the field for mixing of type {type(mixing)!r}")


def _field_shape(cfg: NAFieldConfig) -> tuple[int, ...]:
    tops = mixing_upper_bounds(cfg.mixing, cfg.dimension)
    shape = tuple(
        int(math.floor(n * top)) + (1 if axis == 0 else 0)
        for axis, (n, top) in enumerate(zip(cfg.lattice, tops))
    )
    if any(s < 1 for s in shape):
        raise ValueError(f"mixing support too small for the lattice, shape {shape}")
    cells = math.prod(shape)
    if cells > _MAX_LATTICE_CELLS:
        raise ValueError(
            f"field of {cells} cells exceeds the {_MAX_LATTICE_CELLS} cell bound"
        )
    return shape


def partial_sum_variance(a: float, corner: tuple[int, ...]) -> float:
    """Exact variance of the rectangle sum of the moving-difference field.

    Summing the differences telescopes along the first axis: each slice
    contributes 1 + a^2 + (M1 - 1)(1 - a)^2, and slices are independent.
    """
    m1 = corner[0]
    if any(m < 0 for m in corner):
        raise ValueError(f"corner must be nonnegative, got {corner}")
    if m1 == 0 or any(m == 0 for m in corner):
        return 0.0
    per_slice = 1.0 + a * a + (m1 - 1) * (1.0 - a) ** 2
    return per_slice * math.prod(corner[1:])


def simulate_field_sum(rng: np.random.Generator, cfg: NAFieldConfig) -> float:
    """One replicate: draw the field, draw the corner, return the scaled sum."""
    shape = _field_shape(cfg)
    eps = rng.standard_normal(shape)
    t = cfg.mixing.sample(rng)
    ts = (float(t),) if not isinstance(t, (tuple, list)) else tuple(float(v) for v in t)
    corner = tuple(
        min(int(math.floor(n * ti)), s - (1 if axis == 0 else 0))
        for axis, (n, ti, s) in enumerate(zip(cfg.lattice, ts, shape))
    )
    if any(m == 0 for m in corner):
        return 0.0
    m1 = corner[0]
    block = eps[tuple(slice(0, m) for m in corner)]
    shifted = eps[(slice(1, m1 + 1),) + tuple(slice(0, m) for m in corner[1:])]
    total = float(block.sum()) - cfg.a * float(shifted.sum())
    return total / math.sqrt(math.prod(cfg.lattice))


def na_field_target(cfg: NAFieldConfig) -> MixtureLaw:
    """Mixture of N(0, (1-a)^2 |t|) over the mixing law."""
    return gaussian_variance_mixture(cfg.sigma_sq, cfg.mixing)


def run_na_field(
    cfg: NAFieldConfig, plan: ReplicationPlan
) -> tuple[EmpiricalDistribution, MixtureLaw]:
    empirical = run_replicated(plan, lambda rng: simulate_field_sum(rng, cfg))
    return empirical, na_field_target(cfg)


def field_lag_covariances(
    cfg: NAFieldConfig, seed: SeedSpec, cells: int = 1_000_000
) -> dict[str, float]:
    """Empirical covariances of the field at a few diagnostic lags.

    Draws one large field realization (1-d layout of about ``cells`` sites
    shaped to the config dimension) and estimates Cov(X_0, X_lag) for lag 0,
    e1, 2 e1, and (in dimension >= 2) e2. Expected values: 1 + a^2, -a, 0, 0.
    """
    d = cfg.dimension
    if d == 1:
        shape = (cells,)
    else:
        side = max(2, int(round(cells ** (1.0 / d))))
        shape = (side,) * d
    rng = seed.generator()
    eps = rng.standard_normal(tuple(s + 1 for s in shape[:1]) + shape[1:])
    field = eps[tuple([slice(0, shape[0])])] - cfg.a * eps[tuple([slice(1, shape[0] + 1)])]
    out: dict[str, float] = {}
    flat_mean = float(field.mean())
    centered = field - flat_mean

    def cov_at(lag: tuple[int, ...]) -> float:
        lead = centered[tuple(slice(0, s - l) for s, l in zip(shape, lag))]
        lagged = centered[tuple(slice(l, s) for s, l in zip(shape, lag))]
        return float((lead * lagged).mean())

    out["lag0"] = cov_at((0,) * d)
    out["lag_e1"] = cov_at((1,) + (0,) * (d - 1))
    out["lag_2e1"] = cov_at((2,) + (0,) * (d - 1))
    if d >= 2:
        out["lag_e2"] = cov_at((0, 1) + (0,) * (d - 2))
    return out
