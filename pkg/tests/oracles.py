"""Independent oracles shared by the unit and acceptance tests.

These deliberately avoid the code paths they validate: occupancy moments come
from literal enumeration of all box assignments, and harmonic/mixture
references come from scipy routines that share no code with the package.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def enumerate_occupancy_moments(r: int, n: int, big_n: int) -> tuple[float, float]:
    """Exact mean and variance of the r-box count by listing all N^n outcomes.

    Every assignment of the n distinguishable balls to the N boxes is
    equally likely; the count of boxes holding exactly r balls is tallied
    per outcome and the moments accumulated in exact rational arithmetic.
    """
    total = Fraction(0)
    total_sq = Fraction(0)
    outcomes = 0
    for assignment in itertools.product(range(big_n), repeat=n):
        counts = [0] * big_n
        for box in assignment:
            counts[box] += 1
        hits = sum(1 for c in counts if c == r)
        total += hits
        total_sq += hits * hits
        outcomes += 1
    mean = Fraction(total, outcomes)
    var = Fraction(total_sq, outcomes) - mean * mean
    return float(mean), float(var)
