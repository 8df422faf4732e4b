"""Error-free spherical perceptron capacity.

``alpha_c`` is the classic capacity 1/f_gar(kappa), exact for kappa >= 0 and
an upper bound below zero.  For kappa < 0 the lifted condition built from
``i_sph`` and ``i_per_1`` gives a bound that can sit strictly below it.
"""

import math
from dataclasses import dataclass

from .exceptions import DomainError
from .optimize import bisect_root, grid_then_golden, log_grid
from .specfun import gauss_second_moment, norm_sf
from .types import CapacityResult

__all__ = [
    "NegLiftPoint",
    "f_gar",
    "alpha_c",
    "i_sph",
    "gamma_sph_hat",
    "neg_lift_aux",
    "i_per_1",
    "i_per",
    "neg_lift_condition",
    "min_neg_lift_condition",
    "neg_lift_capacity",
    "C3_GRID",
]

C3_GRID = log_grid(1e-4, 50.0, 64)
GAMMA_PER_GRID = log_grid(1e-6, 20.0, 48)

# below this kappa, f_gar underflows relative to its own rounding error
KAPPA_OVERFLOW = -8.0


@dataclass(frozen=True)
class NegLiftPoint:
    c3_s: float
    gamma_per_s: float
    p: float = 1.0
    q: float = 0.0
    r: float = 0.0
    s: float = 0.0
    C: float = 1.0


def f_gar(kappa):
    """E[(g + kappa)_+^2] for standard normal g."""
    return gauss_second_moment(-kappa, math.inf, kappa)


def alpha_c(kappa):
    """Classic capacity ``1 / f_gar(kappa)``; ``inf`` once f_gar underflows."""
    if kappa <= KAPPA_OVERFLOW:
        return math.inf
    f = f_gar(kappa)
    return math.inf if f <= 0.0 else 1.0 / f


def gamma_sph_hat(c3_s):
    return (2.0 * c3_s + math.sqrt(4.0 * c3_s * c3_s + 16.0)) / 8.0


def i_sph(c3_s):
    """Spherical term of the lifted bound; tends to 1 as ``c3_s -> 0``."""
    if not c3_s > 0.0:
        raise DomainError(f"i_sph requires c3_s > 0, got {c3_s!r}")
    g = gamma_sph_hat(c3_s)
    return g - math.log1p(-c3_s / (2.0 * g)) / (2.0 * c3_s)


def neg_lift_aux(c3_s, gamma_per_s, kappa):
    """Auxiliary constants (p, q, r, s, C) exactly as defined for the lifted bound."""
    p = 1.0 + c3_s / (2.0 * gamma_per_s)
    q = c3_s * kappa / (2.0 * gamma_per_s)
    r = c3_s * kappa * kappa / (4.0 * gamma_per_s)
    sp = math.sqrt(p)
    s = -kappa * sp + q / sp
    C = math.exp(q * q / (2.0 * p) - r) / sp
    return NegLiftPoint(c3_s, gamma_per_s, p, q, r, s, C)


def i_per_1(c3_s, gamma_per_s, kappa):
    """E exp(-c3 (g+kappa)_+^2 / (4 gamma)) in closed form.

    Uses the simplifications q^2/(2p) - r = -r/p and s = -kappa/sqrt(p), which
    avoid cancelling large terms when gamma is tiny.
    """
    p = 1.0 + c3_s / (2.0 * gamma_per_s)
    r = c3_s * kappa * kappa / (4.0 * gamma_per_s)
    sp = math.sqrt(p)
    C = math.exp(-r / p) / sp
    return norm_sf(kappa) + C * norm_sf(-kappa / sp)


def _per_term(c3_s, gamma, alpha, kappa):
    return -gamma + alpha / c3_s * math.log(i_per_1(c3_s, gamma, kappa))


def i_per(c3_s, alpha, kappa):
    """max over gamma of ``-gamma + (alpha/c3) log i_per_1``; returns (value, gamma)."""
    ext = grid_then_golden(
        lambda g: _per_term(c3_s, g, alpha, kappa), GAMMA_PER_GRID, maximize=True
    )
    return ext.value, ext.x


def neg_lift_condition(kappa, alpha, c3_s):
    """Lifted infeasibility condition at fixed ``c3_s``; negative certifies infeasibility.

    ``c3_s == 0`` evaluates the analytic limit ``1 - sqrt(alpha f_gar)``.
    """
    if kappa > 0.0:
        raise DomainError(f"neg_lift_condition is for kappa <= 0, got {kappa!r}")
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if c3_s < 0.0:
        raise DomainError(f"c3_s must be nonnegative, got {c3_s!r}")
    if c3_s == 0.0:
        return 1.0 - math.sqrt(alpha * f_gar(kappa))
    value, _ = i_per(c3_s, alpha, kappa)
    return -0.5 * c3_s + i_sph(c3_s) + value


def min_neg_lift_condition(kappa, alpha):
    """Minimum of the condition over c3 >= 0, as ``(value, NegLiftPoint)``."""
    ext = grid_then_golden(lambda c: neg_lift_condition(kappa, alpha, c), C3_GRID)
    limit = neg_lift_condition(kappa, alpha, 0.0)
    if limit <= ext.value:
        return limit, NegLiftPoint(0.0, 0.5 * math.sqrt(alpha * f_gar(kappa)))
    _, gamma = i_per(ext.x, alpha, kappa)
    return ext.value, neg_lift_aux(ext.x, gamma, kappa)


def neg_lift_capacity(kappa, rtol=1e-9):
    """Smallest alpha at which the minimized lifted condition turns negative."""
    if not kappa < 0.0:
        raise DomainError(f"neg_lift_capacity requires kappa < 0, got {kappa!r}")
    upper = alpha_c(kappa)
    if math.isinf(upper):
        raise DomainError(f"alpha_c({kappa}) overflows; no finite bracket")
    alpha, iterations = bisect_root(
        lambda a: min_neg_lift_condition(kappa, a)[0], 1e-3, 10.0 * upper, xtol=0.0, rtol=rtol
    )
    residual, point = min_neg_lift_condition(kappa, alpha)
    return CapacityResult(alpha, point, residual, iterations)
