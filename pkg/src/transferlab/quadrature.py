"""Adaptive Simpson quadrature, scalar or vector valued.

The mixture-law CDF evaluations integrate a smooth component CDF against a
mixing density, often at many query points at once; the integrand may
therefore return a 1-d array, and the refinement criterion is the max norm
over components.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


class QuadratureError(RuntimeError):
    """Refinement hit the depth limit before reaching the requested tolerance."""

    def __init__(self, requested: float, achieved: float):
        super().__init__(
            f"quadrature did not converge: achieved tolerance {achieved:.3e}, "
            f"requested {requested:.3e}"
        )
        self.requested = requested
        self.achieved = achieved


def adaptive_simpson(
    f: Callable[[float], float | np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-8,
    max_depth: int = 40,
) -> float | np.ndarray:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    ``f`` may return a scalar or a 1-d array; arrays are integrated
    componentwise. Each interval is split until the standard Simpson error
    estimate ``|S_fine - S_coarse|/15`` falls below the locally allotted
    tolerance. Raises :class:`QuadratureError` if intervals capped at
    ``max_depth`` leave more than ``tol`` of estimated error on the table.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0 * np.asarray(f(a), dtype=float)
    if a > b:
        return -adaptive_simpson(f, b, a, tol=tol, max_depth=max_depth)

    def ev(x: float) -> np.ndarray:
        return np.asarray(f(x), dtype=float)

    leftover = 0.0  # error estimate stranded by the depth cap

    def recurse(lo, hi, flo, fmid, fhi, coarse, budget, depth):
        nonlocal leftover
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flmid = ev(lmid)
        frmid = ev(rmid)
        h6 = (hi - lo) / 12.0
        left = h6 * (flo + 4.0 * flmid + fmid)
        right = h6 * (fmid + 4.0 * frmid + fhi)
        fine = left + right
        err = float(np.max(np.abs(fine - coarse))) / 15.0
        if err <= budget or depth >= max_depth:
            if err > budget:
                leftover += err
            return fine + (fine - coarse) / 15.0
        half = 0.5 * budget
        return recurse(lo, mid, flo, flmid, fmid, left, half, depth + 1) + recurse(
            mid, hi, fmid, frmid, fhi, right, half, depth + 1
        )

    fa = ev(a)
    fb = ev(b)
    fm = ev(0.5 * (a + b))
    coarse = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    result = recurse(a, b, fa, fm, fb, coarse, tol, 0)
    if leftover > tol:
        raise QuadratureError(requested=tol, achieved=leftover)
    if result.ndim == 0:
        return float(result)
    return result
