"""Multiparameter indices, control maps, and limit-regime classification.

A control map embeds the discrete index lattice into Euclidean space; the
limit points of its image parameterize which limit distribution a randomly
indexed quantity can converge to. Two concrete families are provided: the
stage-and-fraction map for triangular-array random sums, and the
balls-into-boxes maps whose limit points select Gaussian versus standardized
Poisson occupancy regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

# T/U beyond this makes exp overflow a double; the value is tagged +inf.
_EXP_OVERFLOW = 709.0


@dataclass(frozen=True)
class MultiIndex:
    """A point of the d-dimensional positive integer lattice."""

    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) == 0:
            raise ValueError("MultiIndex needs at least one coordinate")
        if any((not isinstance(c, int)) or c < 1 for c in self.coords):
            raise ValueError(f"coordinates must be integers >= 1, got {self.coords}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def product(self) -> int:
        return math.prod(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)


def as_multi_index(value: MultiIndex | int | Sequence[int]) -> MultiIndex:
    if isinstance(value, MultiIndex):
        return value
    if isinstance(value, int):
        return MultiIndex((value,))
    return MultiIndex(tuple(int(v) for v in value))


@dataclass(frozen=True)
class LimitSet:
    """Limit points of a control map's image, as a membership predicate."""

    contains: Callable[[tuple[float, ...]], bool]
    description: str


@dataclass(frozen=True)
class ControlMap:
    """Injective map from the index lattice into R^ell with discrete image.

    ``evaluate`` must be injective with isolated image points; that cannot be
    certified at runtime, so :func:`probe_injectivity` spot-checks finite
    probe sets and each built-in constructor documents why the full property
    holds for it.
    """

    dimension_in: int
    dimension_out: int
    evaluate: Callable[[MultiIndex], tuple[float, ...]]
    delta: LimitSet

    def __call__(self, index: MultiIndex | int | Sequence[int]) -> tuple[float, ...]:
        idx = as_multi_index(index)
        if idx.dim != self.dimension_in:
            raise ValueError(
                f"index has {idx.dim} coordinates, map expects {self.dimension_in}"
            )
        return self.evaluate(idx)


@dataclass(frozen=True)
class RegimePoint:
    """Candidate limit point (g, d) for the occupancy maps.

    Coordinates are nonnegative reals, possibly +inf (the tag used when
    exp(T/U) overflows). Points with an infinite coordinate lie outside every
    admissible limit set.
    """

    g: float
    d: float

    def __post_init__(self):
        if (self.g < 0 and not math.isnan(self.g)) or (self.d < 0 and not math.isnan(self.d)):
            raise ValueError(f"regime coordinates must be nonnegative, got {self}")


@dataclass(frozen=True)
class RegimeTag:
    """Classified limit law: standard normal, standardized Poisson, or neither."""

    kind: str  # "normal" | "poisson" | "undefined"
    lam: float | None = None

    @property
    def is_normal(self) -> bool:
        return self.kind == "normal"

    @property
    def is_poisson(self) -> bool:
        return self.kind == "poisson"


NORMAL_REGIME = RegimeTag("normal")
UNDEFINED_REGIME = RegimeTag("undefined")


def poisson_regime(lam: float) -> RegimeTag:
    if not lam > 0 or math.isinf(lam):
        raise ValueError(f"standardized Poisson needs 0 < lambda < inf, got {lam}")
    return RegimeTag("poisson", lam=lam)


def phi_triangular(
    n: int, index: MultiIndex | int | Sequence[int], k_seq: Callable[[int], int]
) -> tuple[float, ...]:
    """Stage-and-fraction coordinates (1/n, N_1/k_n, ..., N_d/k_n).

    ``k_seq(j)`` is the strictly increasing sampling sequence applied to every
    axis. The first coordinate separates stages, so the map is injective as
    long as ``k_seq`` is deterministic.
    """
    if n < 1:
        raise ValueError(f"stage must be >= 1, got {n}")
    idx = as_multi_index(index)
    kn = k_seq(n)
    if kn < 1:
        raise ValueError(f"sampling sequence must be positive, k({n}) = {kn}")
    return (1.0 / n,) + tuple(c / kn for c in idx.coords)


def phi_alloc(r: int, t: int, u: int) -> tuple[float, float]:
    """Occupancy control coordinates for counting boxes with exactly r balls.

    r = 0: (2U/T^2, exp(T/U)/U)
    r = 1: (U/T^2, exp(T/U)/T)
    r >= 2: (1/T, r! U^(r-1) / T^r * exp(T/U))

    exp(T/U) saturates to +inf instead of overflowing; the +inf is a valid
    tagged value, not an error.
    """
    if r < 0:
        raise ValueError(f"count level must be >= 0, got {r}")
    if t < 1 or u < 1:
        raise ValueError(f"need T >= 1 and U >= 1, got T={t}, U={u}")
    ratio = t / u
    if r == 0:
        return (2.0 * u / (t * t), _exp_over(ratio, math.log(u)))
    if r == 1:
        return (u / (t * t), _exp_over(ratio, math.log(t)))
    log_prefactor = math.lgamma(r + 1) + (r - 1) * math.log(u) - r * math.log(t)
    return (1.0 / t, _exp_over(ratio + log_prefactor, 0.0))


def _exp_over(log_num: float, log_den: float) -> float:
    """exp(log_num - log_den), saturating to +inf past double range."""
    e = log_num - log_den
    if e > _EXP_OVERFLOW:
        return math.inf
    return math.exp(e)


def classify_regime(r: int, point: RegimePoint) -> RegimeTag:
    """Map a limit point (g, d) to its occupancy limit law.

    For r = 0 the admissible set is the union of the two half-axes:
    0 < g < inf with d = 0 gives a standardized Poisson with lambda = 1/g,
    g = d = 0 the standard normal, and g = 0 with 0 < d < inf a standardized
    Poisson with lambda = 1/d. For r >= 1 the admissible set is the d
    half-axis (g must be exactly 0): d = 0 gives the normal and 0 < d < inf
    the standardized Poisson with lambda = 1/d. Everything else, including
    any +inf coordinate, is `undefined`. Zero tests are exact: callers that
    target a regime supply exact zeros.
    """
    if r < 0:
        raise ValueError(f"count level must be >= 0, got {r}")
    g, d = point.g, point.d
    if math.isnan(g) or math.isnan(d) or math.isinf(g) or math.isinf(d):
        return UNDEFINED_REGIME
    if r == 0:
        if g > 0.0 and d == 0.0:
            return poisson_regime(1.0 / g)
        if g == 0.0 and d == 0.0:
            return NORMAL_REGIME
        if g == 0.0 and d > 0.0:
            return poisson_regime(1.0 / d)
        return UNDEFINED_REGIME
    if g != 0.0:
        return UNDEFINED_REGIME
    if d == 0.0:
        return NORMAL_REGIME
    return poisson_regime(1.0 / d)


def probe_injectivity(
    control_map: ControlMap, probe: Iterable[MultiIndex | Sequence[int] | int]
) -> tuple[bool, tuple[MultiIndex, MultiIndex] | None]:
    """Check injectivity of a control map on a finite probe set.

    Returns ``(True, None)`` when all images are distinct, otherwise
    ``(False, (a, b))`` with a colliding pair of indices.
    """
    seen: dict[tuple[float, ...], MultiIndex] = {}
    count = 0
    for raw in probe:
        idx = as_multi_index(raw)
        count += 1
        image = control_map(idx)
        if image in seen and seen[image] != idx:
            return False, (seen[image], idx)
        seen[image] = idx
    if count == 0:
        raise ValueError("probe set must be nonempty")
    return True, None


def triangular_array_map(k_seq: Callable[[int], int], d: int = 1) -> ControlMap:
    """Control map (n, N) -> (1/n, N/k_n) on the (1+d)-dimensional lattice.

    Injective because 1/n pins the stage and N -> N/k_n is injective within a
    stage; image points are isolated because stages live on distinct 1/n
    levels and within a stage the N/k_n values are spaced at least 1/k_n
    apart.
    """

    def evaluate(idx: MultiIndex) -> tuple[float, ...]:
        return phi_triangular(idx.coords[0], idx.coords[1:], k_seq)

    return ControlMap(
        dimension_in=1 + d,
        dimension_out=1 + d,
        evaluate=evaluate,
        delta=LimitSet(
            contains=lambda p: p[0] == 0.0 and all(c >= 0.0 for c in p[1:]),
            description="{0} x [0, inf)^d",
        ),
    )


def allocation_map(r: int) -> ControlMap:
    """Occupancy control map (T, U) -> phi_r(T, U) on the 2-d lattice.

    Injectivity holds because the two coordinates jointly determine (T, U):
    for fixed T/U the second coordinate is strictly monotone in U, and the
    first coordinate then separates T. Probe checks guard the floating-point
    realization.
    """
    if r == 0:
        delta = LimitSet(
            contains=lambda p: (p[0] >= 0.0 and p[1] == 0.0)
            or (p[0] == 0.0 and p[1] >= 0.0),
            description="(R+ x {0}) u ({0} x R+)",
        )
    else:
        delta = LimitSet(
            contains=lambda p: p[0] == 0.0 and p[1] >= 0.0,
            description="{0} x R+",
        )

    def evaluate(idx: MultiIndex) -> tuple[float, ...]:
        return phi_alloc(r, idx.coords[0], idx.coords[1])

    return ControlMap(dimension_in=2, dimension_out=2, evaluate=evaluate, delta=delta)
