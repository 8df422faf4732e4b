"""One-dimensional search primitives used by the bound optimizers.

The capacity objectives are smooth but not certified unimodal, so every
search is a coarse grid scan followed by golden-section refinement of the
bracket around the best grid point.
"""

import math
from typing import Callable, NamedTuple

from .exceptions import BracketError, ConvergenceError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Extremum(NamedTuple):
    x: float
    value: float
    iterations: int
    grid_index: int
    local_extrema: int = 1


def log_grid(lo, hi, count):
    """``count`` logarithmically spaced points from ``lo`` to ``hi`` inclusive."""
    if count == 1:
        return [lo]
    ratio = hi / lo
    return [lo * ratio ** (i / (count - 1)) for i in range(count)]


def golden_section(f, lo, hi, xtol=1e-10, maximize=False, max_iter=500):
    """Golden-section search for an extremum of ``f`` on ``[lo, hi]``.

    ``xtol`` is relative to ``max(1, |x|)``.  Returns ``(x, f(x), iterations)``
    where the endpoints are also considered, so a monotone ``f`` yields the
    boundary value.
    """
    sign = -1.0 if maximize else 1.0

    def g(t):
        return sign * f(t)

    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = g(x1), g(x2)
    it = 0
    while b - a > xtol * max(1.0, abs(a)):
        if it >= max_iter:
            raise ConvergenceError(f"golden section did not converge on [{lo}, {hi}]")
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = g(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = g(x2)
        it += 1
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    return x, sign * fx, it


def grid_then_golden(
    f: Callable[[float], float],
    grid,
    xtol=1e-10,
    maximize=False,
):
    """Scan ``f`` on ``grid`` and refine the best point by golden section.

    The refinement bracket is the pair of grid neighbours of the best point
    (the best point itself at the grid edges).  The number of strict local
    extrema seen on the grid is reported so callers can flag multimodality.
    """
    values = [f(x) for x in grid]
    best = max if maximize else min
    i = values.index(best(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    x, fx, it = golden_section(f, lo, hi, xtol=xtol, maximize=maximize)
    if (fx < values[i]) if maximize else (fx > values[i]):
        x, fx = grid[i], values[i]
    return Extremum(x, fx, it, i, _count_local_extrema(values, maximize))


def _count_local_extrema(values, maximize):
    sign = 1.0 if maximize else -1.0
    v = [sign * t for t in values]
    count = 0
    for k in range(len(v)):
        left = v[k - 1] if k > 0 else -math.inf
        right = v[k + 1] if k + 1 < len(v) else -math.inf
        if v[k] > left and v[k] > right:
            count += 1
    return count


def bisect_root(f, lo, hi, xtol=1e-12, rtol=0.0, max_iter=400):
    """Bisection for a sign change of ``f`` on ``[lo, hi]``.

    Returns ``(x, iterations)``.  Raises :class:`BracketError` when ``f(lo)``
    and ``f(hi)`` have the same strict sign.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, 0
    if fhi == 0.0:
        return hi, 0
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo!r}, {fhi!r}")
    it = 0
    while hi - lo > xtol + rtol * abs(lo):
        if it >= max_iter:
            raise ConvergenceError(f"bisection did not converge on [{lo}, {hi}]")
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid, it + 1
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), it
