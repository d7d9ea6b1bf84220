"""Sampleable and evaluable probability laws on the real line.

Provides the component laws used by the experiment suites (Gaussian,
standardized Poisson, the logarithmic law on [1, c], uniform and point
mixings), empirical laws built from Monte Carlo output, and mixture laws
whose CDF is the mixing-average of a weakly continuous family of component
CDFs.

All CDFs are right-continuous. Lattice laws expose their jump points and
point masses so goodness-of-fit code can evaluate both one-sided limits at
every discontinuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr

from .quadrature import adaptive_simpson

__all__ = [
    "Distribution",
    "Normal",
    "PointMass",
    "Uniform",
    "LogarithmicLaw",
    "PoissonLattice",
    "StandardizedPoisson",
    "EmpiricalDistribution",
    "LimitFamily",
    "MixingLaw",
    "DiscreteMixing",
    "ContinuousMixing",
    "MixtureLaw",
    "mixture_cdf",
    "mixture_sample",
    "std_poisson_cdf",
    "log_law_cdf",
    "gaussian_variance_family",
]

# Poisson probability tables are truncated once the accumulated mass reaches
# 1 - _POISSON_TAIL; this keeps every moment error far below test tolerances.
_POISSON_TAIL = 1e-14

_CONTINUOUS_MIXING_TOL = 1e-8
_MIXING_NORMALIZATION_TOL = 1e-6


class Distribution:
    """A probability law on R: sampling plus a right-continuous CDF.

    Subclasses implement ``sample`` and ``cdf``; lattice laws additionally
    override ``jump_points`` and ``point_mass`` so that both one-sided CDF
    limits are available at discontinuities. Instances are immutable after
    construction and safe to share across concurrent replicates; sampling
    never touches hidden state, the caller's generator is the only source of
    randomness.
    """

    support: tuple[float, float] = (-math.inf, math.inf)

    def sample(self, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def sample_many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.array([self.sample(rng) for _ in range(size)], dtype=float)

    def cdf(self, x: float) -> float:
        raise NotImplementedError

    def cdf_many(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.cdf(float(x)) for x in np.asarray(xs, dtype=float)])

    def point_mass(self, x: float) -> float:
        """Mass of the atom at x (0 for continuous laws)."""
        return 0.0

    def cdf_left(self, x: float) -> float:
        """Left limit of the CDF at x."""
        return self.cdf(x) - self.point_mass(x)

    def cdf_left_many(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.cdf_left(float(x)) for x in np.asarray(xs, dtype=float)])

    def jump_points(self) -> np.ndarray | None:
        """Sorted atom locations, or None when the law is continuous."""
        return None


@dataclass(frozen=True)
class Normal(Distribution):
    """Gaussian law with the given mean and (strictly positive) variance."""

    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if not self.variance > 0.0:
            raise ValueError(f"variance must be > 0, got {self.variance}")

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def sample(self, rng):
        return self.mean + self.sd * rng.standard_normal()

    def sample_many(self, rng, size):
        return self.mean + self.sd * rng.standard_normal(size)

    def cdf(self, x):
        return float(ndtr((x - self.mean) / self.sd))

    def cdf_many(self, xs):
        return ndtr((np.asarray(xs, dtype=float) - self.mean) / self.sd)

    def cdf_left_many(self, xs):
        return self.cdf_many(xs)


@dataclass(frozen=True)
class PointMass(Distribution):
    """Degenerate law concentrated at a single point."""

    location: float = 0.0

    def sample(self, rng):
        return self.location

    def sample_many(self, rng, size):
        return np.full(size, self.location, dtype=float)

    def cdf(self, x):
        return 1.0 if x >= self.location else 0.0

    def cdf_many(self, xs):
        return (np.asarray(xs, dtype=float) >= self.location).astype(float)

    def point_mass(self, x):
        return 1.0 if x == self.location else 0.0

    def cdf_left_many(self, xs):
        return (np.asarray(xs, dtype=float) > self.location).astype(float)

    def jump_points(self):
        return np.array([self.location])

    @property
    def support(self):  # type: ignore[override]
        return (self.location, self.location)


@dataclass(frozen=True)
class Uniform(Distribution):
    """Uniform law on [a, b]."""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")

    def sample(self, rng):
        return rng.uniform(self.a, self.b)

    def sample_many(self, rng, size):
        return rng.uniform(self.a, self.b, size)

    def cdf(self, x):
        if x < self.a:
            return 0.0
        if x >= self.b:
            return 1.0
        return (x - self.a) / (self.b - self.a)

    def cdf_many(self, xs):
        return np.clip((np.asarray(xs, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)

    def cdf_left_many(self, xs):
        return self.cdf_many(xs)

    @property
    def support(self):  # type: ignore[override]
        return (self.a, self.b)


@dataclass(frozen=True)
class LogarithmicLaw(Distribution):
    """Law on [1, c] with density 1/(t log c); CDF(t) = log t / log c.

    This is the limit of the mantissa of a 1/k-weighted random index, and the
    canonical mixing law of the geometric-subsequence experiment.
    """

    c: float = 2.0

    def __post_init__(self):
        if not self.c > 1.0:
            raise ValueError(f"ratio must be > 1, got {self.c}")

    def sample(self, rng):
        # inverse CDF: t = c^U
        return math.exp(rng.random() * math.log(self.c))

    def sample_many(self, rng, size):
        return np.exp(rng.random(size) * math.log(self.c))

    def cdf(self, t):
        if t < 1.0:
            return 0.0
        if t >= self.c:
            return 1.0
        return math.log(t) / math.log(self.c)

    def cdf_many(self, ts):
        ts = np.asarray(ts, dtype=float)
        out = np.zeros_like(ts)
        inside = (ts >= 1.0) & (ts < self.c)
        out[inside] = np.log(ts[inside]) / math.log(self.c)
        out[ts >= self.c] = 1.0
        return out

    def cdf_left_many(self, ts):
        return self.cdf_many(ts)

    def density(self, t: float) -> float:
        if 1.0 <= t <= self.c:
            return 1.0 / (t * math.log(self.c))
        return 0.0

    @property
    def support(self):  # type: ignore[override]
        return (1.0, self.c)


def _poisson_pmf_table(lam: float) -> np.ndarray:
    """pmf(0..K) by upward recurrence, truncated at tail mass _POISSON_TAIL."""
    probs = [math.exp(-lam)]
    total = probs[0]
    k = 0
    while total < 1.0 - _POISSON_TAIL:
        k += 1
        probs.append(probs[-1] * lam / k)
        total += probs[-1]
        if k > 100_000:  # unreachable for the lambdas used here
            raise RuntimeError(f"poisson table for lambda={lam} did not close")
    return np.array(probs)


class PoissonLattice(Distribution):
    """Law of (offset + P - loc)/scale for a Poisson count P.

    The affine dressing lets one express both the idealized standardized
    Poisson (loc = lambda, scale = sqrt(lambda), offset = 0) and Poisson
    limit targets re-expressed on the lattice of a standardized integer
    statistic, which keeps one-sample comparisons between lattice laws
    meaningful.
    """

    def __init__(self, lam: float, loc: float, scale: float, offset: int = 0):
        if not lam > 0.0:
            raise ValueError(f"lambda must be > 0, got {lam}")
        if not scale > 0.0:
            raise ValueError(f"scale must be > 0, got {scale}")
        self.lam = float(lam)
        self.loc = float(loc)
        self.scale = float(scale)
        self.offset = int(offset)
        self._pmf = _poisson_pmf_table(self.lam)
        counts = np.arange(self._pmf.size, dtype=float)
        self._atoms = (self.offset + counts - self.loc) / self.scale
        self._cum = np.cumsum(self._pmf)

    def sample(self, rng):
        return (self.offset + rng.poisson(self.lam) - self.loc) / self.scale

    def sample_many(self, rng, size):
        return (self.offset + rng.poisson(self.lam, size) - self.loc) / self.scale

    def cdf(self, x):
        i = int(np.searchsorted(self._atoms, x, side="right"))
        return float(self._cum[i - 1]) if i > 0 else 0.0

    def cdf_many(self, xs):
        idx = np.searchsorted(self._atoms, np.asarray(xs, dtype=float), side="right")
        padded = np.concatenate(([0.0], self._cum))
        return padded[idx]

    def cdf_left_many(self, xs):
        idx = np.searchsorted(self._atoms, np.asarray(xs, dtype=float), side="left")
        padded = np.concatenate(([0.0], self._cum))
        return padded[idx]

    def point_mass(self, x):
        i = int(np.searchsorted(self._atoms, x))
        if i < self._atoms.size and self._atoms[i] == x:
            return float(self._pmf[i])
        return 0.0

    def cdf_left(self, x):
        i = int(np.searchsorted(self._atoms, x, side="left"))
        return float(self._cum[i - 1]) if i > 0 else 0.0

    def jump_points(self):
        return self._atoms

    def pmf_table(self) -> tuple[np.ndarray, np.ndarray]:
        """(atom positions, atom masses), truncated at negligible tail."""
        return self._atoms, self._pmf

    @property
    def support(self):  # type: ignore[override]
        return (float(self._atoms[0]), math.inf)


class StandardizedPoisson(PoissonLattice):
    """Law of (P - lambda)/sqrt(lambda), P Poisson(lambda): mean 0, variance 1."""

    def __init__(self, lam: float):
        super().__init__(lam, loc=lam, scale=math.sqrt(lam), offset=0)


class EmpiricalDistribution(Distribution):
    """The empirical law of a sample: step CDF, order-statistic quantiles."""

    def __init__(self, values: Sequence[float] | np.ndarray):
        arr = np.sort(np.asarray(values, dtype=float))
        if arr.size == 0:
            raise ValueError("empirical law needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ValueError("observations must be finite")
        self.values = arr
        self.n = int(arr.size)

    def sample(self, rng):
        return float(self.values[rng.integers(0, self.n)])

    def cdf(self, x):
        return float(np.searchsorted(self.values, x, side="right")) / self.n

    def cdf_many(self, xs):
        return np.searchsorted(self.values, np.asarray(xs, dtype=float), side="right") / self.n

    def cdf_left(self, x):
        return float(np.searchsorted(self.values, x, side="left")) / self.n

    def cdf_left_many(self, xs):
        return np.searchsorted(self.values, np.asarray(xs, dtype=float), side="left") / self.n

    def point_mass(self, x):
        return self.cdf(x) - self.cdf_left(x)

    def jump_points(self):
        return np.unique(self.values)

    def quantile(self, q: float) -> float:
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile level must be in [0, 1], got {q}")
        if q == 0.0:
            return float(self.values[0])
        return float(self.values[math.ceil(q * self.n) - 1])

    def mean(self) -> float:
        return float(self.values.mean())

    def variance(self) -> float:
        return float(self.values.var())

    @property
    def support(self):  # type: ignore[override]
        return (float(self.values[0]), float(self.values[-1]))


@dataclass(frozen=True)
class LimitFamily:
    """Assignment t -> distribution, weakly continuous on its parameter set.

    Continuity is a contract on the builder, not something the type can
    enforce; the built-in families (Gaussian variance families, occupancy
    regime families) satisfy it and are covered by grid tests.
    """

    eval: Callable[[float | tuple[float, ...]], Distribution]

    def __call__(self, t: float | tuple[float, ...]) -> Distribution:
        return self.eval(t)


def gaussian_variance_family(scale: float = 1.0) -> LimitFamily:
    """Family t -> N(0, scale * |t|) with |t| the product of the coordinates.

    At |t| = 0 the law degenerates to a point mass at 0, the weak limit of
    N(0, v) as v -> 0.
    """
    if not scale > 0.0:
        raise ValueError(f"scale must be > 0, got {scale}")

    def build(t):
        prod = math.prod(t) if isinstance(t, (tuple, list, np.ndarray)) else float(t)
        v = scale * abs(prod)
        return Normal(0.0, v) if v > 0.0 else PointMass(0.0)

    return LimitFamily(build)


class MixingLaw:
    """A probability law on the limit-point set, sampleable and integrable."""

    def sample(self, rng: np.random.Generator):
        raise NotImplementedError


class DiscreteMixing(MixingLaw):
    """Finitely supported mixing: atoms [(t_i, w_i)] with weights summing to 1."""

    def __init__(self, atoms: Sequence[tuple[float | tuple[float, ...], float]]):
        if not atoms:
            raise ValueError("discrete mixing needs at least one atom")
        weights = [w for _, w in atoms]
        if any(w < 0 for w in weights):
            raise ValueError("mixing weights must be nonnegative")
        total = math.fsum(weights)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixing weights sum to {total!r}, expected 1 within 1e-12")
        self.atoms = [(t, float(w)) for t, w in atoms]
        self._points = [t for t, _ in atoms]
        self._cum = np.cumsum(weights)

    def sample(self, rng):
        u = rng.random()
        i = int(np.searchsorted(self._cum, u, side="right"))
        return self._points[min(i, len(self._points) - 1)]


class ContinuousMixing(MixingLaw):
    """Mixing with a density on an axis-aligned box, plus its own sampler.

    The density must integrate to 1 over the box (checked by quadrature at
    construction, tolerance 1e-6).
    """

    def __init__(
        self,
        density: Callable[[tuple[float, ...]], float],
        box: Sequence[tuple[float, float]],
        sampler: Callable[[np.random.Generator], float | tuple[float, ...]],
    ):
        self.box = [(float(lo), float(hi)) for lo, hi in box]
        if not self.box or any(hi <= lo for lo, hi in self.box):
            raise ValueError(f"box must have positive extent per axis, got {box}")
        self.density = density
        self._sampler = sampler
        total = self.integrate(lambda t: 1.0, tol=1e-9)
        if abs(float(total) - 1.0) > _MIXING_NORMALIZATION_TOL:
            raise ValueError(
                f"mixing density integrates to {float(total)!r}, expected 1 within "
                f"{_MIXING_NORMALIZATION_TOL}"
            )

    def sample(self, rng):
        return self._sampler(rng)

    def integrate(self, f: Callable[[tuple[float, ...]], float | np.ndarray], tol: float):
        """Integral of density(t) * f(t) over the box, iterated by axis."""

        def over_axis(axis: int, prefix: tuple[float, ...], budget: float):
            lo, hi = self.box[axis]
            if axis == len(self.box) - 1:
                return adaptive_simpson(
                    lambda t: self.density(prefix + (t,)) * f(prefix + (t,)),
                    lo,
                    hi,
                    tol=budget,
                )
            inner_budget = 0.4 * budget / (hi - lo)
            return adaptive_simpson(
                lambda t: over_axis(axis + 1, prefix + (t,), inner_budget),
                lo,
                hi,
                tol=0.5 * budget,
            )

        return over_axis(0, (), tol)


class UniformBoxMixing(ContinuousMixing):
    """Uniform mixing on a product box, e.g. [0, 2]^d."""

    def __init__(self, box: Sequence[tuple[float, float]]):
        box = [(float(lo), float(hi)) for lo, hi in box]
        volume = math.prod(hi - lo for lo, hi in box)

        def density(t):
            return 1.0 / volume

        def sampler(rng):
            draw = tuple(rng.uniform(lo, hi) for lo, hi in box)
            return draw[0] if len(draw) == 1 else draw

        super().__init__(density, box, sampler)


def uniform_box_mixing(box: Sequence[tuple[float, float]]) -> UniformBoxMixing:
    return UniformBoxMixing(box)


def product_volume_mixing(c: float, d: int) -> ContinuousMixing:
    """Law of the product of d independent uniforms on [0, c].

    The density on (0, c^d) is (log(c^d / v))^(d-1) / ((d-1)! c^d). A mixture
    of a family that depends on t in [0, c]^d only through the coordinate
    product equals the 1-d mixture over this law, which turns d-fold
    quadrature into a single integral. The density blows up logarithmically
    at 0, so the integration box starts at a cutoff carrying ~1e-11 mass.
    """
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    if not c > 0.0:
        raise ValueError(f"need c > 0, got {c}")
    top = c**d
    norm = math.factorial(d - 1) * top

    def density(t):
        v = t[0] if isinstance(t, tuple) else float(t)
        if not 0.0 < v < top:
            return 0.0
        return math.log(top / v) ** (d - 1) / norm

    def sampler(rng):
        return float(np.prod(rng.uniform(0.0, c, d)))

    return ContinuousMixing(density, [(1e-12 * top, top)], sampler)


class MixtureLaw(Distribution):
    """The mixing-average of a family of component laws.

    CDF(x) integrates the component CDFs against the mixing law: an exact
    weighted sum for discrete mixing, adaptive quadrature (absolute tolerance
    1e-8) for continuous mixing. Sampling is the two-stage draw: t from the
    mixing law, then x from the component at t.
    """

    def __init__(self, family: LimitFamily, mixing: MixingLaw):
        self.family = family
        self.mixing = mixing
        if isinstance(mixing, DiscreteMixing):
            self._components = [(family(t), w) for t, w in mixing.atoms]
        else:
            self._components = None

    def sample(self, rng):
        t = self.mixing.sample(rng)
        return self.family(t).sample(rng)

    def cdf(self, x):
        if not math.isfinite(x):
            raise ValueError(f"mixture CDF requires finite x, got {x}")
        return float(self.cdf_many(np.array([x]))[0])

    def cdf_many(self, xs):
        xs = np.asarray(xs, dtype=float)
        if self._components is not None:
            out = np.zeros_like(xs)
            for comp, w in self._components:
                out += w * comp.cdf_many(xs)
            return out
        assert isinstance(self.mixing, ContinuousMixing)
        return np.asarray(
            self.mixing.integrate(
                lambda t: self.family(t).cdf_many(xs), tol=_CONTINUOUS_MIXING_TOL
            )
        )

    def cdf_left_many(self, xs):
        xs = np.asarray(xs, dtype=float)
        if self._components is not None:
            out = np.zeros_like(xs)
            for comp, w in self._components:
                out += w * comp.cdf_left_many(xs)
            return out
        return self.cdf_many(xs)

    def point_mass(self, x):
        if self._components is None:
            return 0.0
        return math.fsum(w * comp.point_mass(x) for comp, w in self._components)

    def cdf_left(self, x):
        return self.cdf(x) - self.point_mass(x)

    def jump_points(self):
        if self._components is None:
            return None
        jumps = [
            comp.jump_points() for comp, _ in self._components if comp.jump_points() is not None
        ]
        if not jumps:
            return None
        return np.unique(np.concatenate(jumps))


def gaussian_variance_mixture(scale: float, mixing: MixingLaw) -> MixtureLaw:
    """Mixture of N(0, scale * |t|) over a mixing law on [0, inf)^d.

    The component family depends on t only through the coordinate product, so
    for a uniform mixing on [0, c]^d the d-fold quadrature is replaced by the
    exact 1-d mixture over the law of the product (same distribution, one
    integral).
    """
    family = gaussian_variance_family(scale)
    if isinstance(mixing, UniformBoxMixing) and len(mixing.box) >= 2:
        lows = [lo for lo, _ in mixing.box]
        tops = [hi for _, hi in mixing.box]
        if all(lo == 0.0 for lo in lows) and len(set(tops)) == 1:
            return MixtureLaw(family, product_volume_mixing(tops[0], len(tops)))
    return MixtureLaw(family, mixing)


def mixture_cdf(law: MixtureLaw, x: float) -> float:
    """CDF of a mixture law at x; exact sums for discrete mixing, quadrature else."""
    return law.cdf(x)


def mixture_sample(law: MixtureLaw, rng: np.random.Generator) -> float:
    """Two-stage draw from a mixture law."""
    return law.sample(rng)


def std_poisson_cdf(lam: float, x: float) -> float:
    """CDF of the standardized Poisson (P - lambda)/sqrt(lambda) at x."""
    if not lam > 0.0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    return StandardizedPoisson(lam).cdf(x)


def log_law_cdf(c: float, t: float) -> float:
    """CDF of the logarithmic law on [1, c] at t."""
    if not c > 1.0:
        raise ValueError(f"ratio must be > 1, got {c}")
    return LogarithmicLaw(c).cdf(t)
