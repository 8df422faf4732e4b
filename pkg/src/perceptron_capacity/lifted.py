"""Lifted upper bound on the capacity with a fraction of erroneous patterns.

For fixed ``c3 > 0`` the bound involves

    G(gamma, nu) = -gamma - alpha nu (1 - f_wb) / (4 gamma)
                   + (alpha / c3) log E exp(c3 (nu - v)_+ / (4 gamma)),

with ``v = max(g + kappa, 0)^2``.  G is convex in ``nu`` and its stationary
point solves ``P_tilted(v > nu) = f_wb``, so the inner problem is a scalar
root find.  The outer problem is ``max`` over gamma (the order under which
the c3 -> 0 limit reproduces ``alpha_upper``; see ``i_wb_hat``).

Writing ``min_nu G = -gamma + alpha m(gamma)`` with ``m`` independent of
alpha turns the capacity threshold at fixed c3 into
``max_gamma (gamma + c3/2 - I_sph) / m(gamma)``, which ``critical_alpha``
evaluates without bisecting on alpha.
"""

import logging
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .classic import C3_GRID, i_sph
from .error_capacity import alpha_upper, f_err_hat, max_error_fraction, nu_hat, sqrt_nu_hat
from .exceptions import ConvergenceError, DomainError
from .optimize import grid_then_golden, log_grid
from .specfun import norm_mass, norm_sf
from .types import CapacityResult, LiftPoint, PerceptronParams

__all__ = [
    "LiftPoint",
    "LiftAux",
    "lift_aux",
    "i_wb_1",
    "log_i_wb_1",
    "nu_star",
    "lift_objective",
    "i_wb_hat",
    "xi_lift",
    "critical_alpha",
    "alpha_lower_lifted",
    "GAMMA_GRID",
]

logger = logging.getLogger(__name__)

GAMMA_GRID = log_grid(1e-4, 20.0, 48)


@dataclass(frozen=True)
class LiftAux:
    p: float
    q: float
    r: float
    s1: float
    s2: float
    C: float


def _check_point(point):
    if not (point.c3_s > 0.0 and point.gamma_wb_s > 0.0 and point.nu_wb >= 0.0):
        raise DomainError(f"invalid lift point {point!r}")


def lift_aux(point, kappa):
    """The auxiliary constants p, q, r, s1, s2, C in their defining form."""
    _check_point(point)
    c3, gamma, nu = point.c3_s, point.gamma_wb_s, point.nu_wb
    p = 1.0 + c3 / (2.0 * gamma)
    q = c3 * kappa / (2.0 * gamma)
    r = c3 * kappa * kappa / (4.0 * gamma)
    sp = math.sqrt(p)
    s1 = -kappa * sp + q / sp
    s2 = (math.sqrt(nu) - kappa) * sp + q / sp
    C = math.exp(q * q / (2.0 * p) - r) * math.exp(c3 * nu / (4.0 * gamma)) / sp
    return LiftAux(p, q, r, s1, s2, C)


def _pieces(c3, gamma, nu, kappa):
    # I1 = exp(a nu) * inner, with every term of inner bounded by 1
    a = c3 / (4.0 * gamma)
    p = 1.0 + 2.0 * a
    sp = math.sqrt(p)
    r = a * kappa * kappa
    root = math.sqrt(nu)
    middle = math.exp(-r / p) / sp * norm_mass(-kappa / sp, root * sp - kappa / sp)
    tail = norm_sf(root - kappa)
    inner = norm_sf(kappa) + middle + math.exp(-a * nu) * tail
    return a, inner, tail


def log_i_wb_1(point, kappa):
    _check_point(point)
    a, inner, _ = _pieces(point.c3_s, point.gamma_wb_s, point.nu_wb, kappa)
    return a * point.nu_wb + math.log(inner)


def i_wb_1(point, kappa):
    """E exp(-c3 min(0, max(g+kappa, 0)^2 - nu) / (4 gamma)) in closed form.

    Sum of the three regions g + kappa < 0, 0 <= g + kappa <= sqrt(nu) and
    g + kappa > sqrt(nu).  May overflow to ``inf`` for extreme c3 nu / gamma;
    use :func:`log_i_wb_1` there.
    """
    try:
        return math.exp(log_i_wb_1(point, kappa))
    except OverflowError:
        return math.inf


def _nu_slope_sign(nu, c3, gamma, kappa, log_f):
    # log P_tilted(v > nu) - log f_wb; decreasing in nu, zero at the minimizer
    a, inner, tail = _pieces(c3, gamma, nu, kappa)
    if tail == 0.0:
        return -math.inf
    return math.log(tail) - a * nu - math.log(inner) - log_f


def _nu_upper(params):
    return (sqrt_nu_hat(params) + 6.0) ** 2


def nu_star(c3_s, gamma_wb_s, params, nu_hi=None):
    """Minimizer over nu >= 0 of G at fixed (c3, gamma); ``nu_hat`` when ``c3_s == 0``."""
    if c3_s == 0.0:
        return nu_hat(params)
    f = params.f_wb
    if not 0.0 < f <= max_error_fraction(params.kappa):
        raise DomainError(f"f_wb={f} outside (0, Phi(kappa)]")
    log_f = math.log(f)
    lo_val = _nu_slope_sign(0.0, c3_s, gamma_wb_s, params.kappa, log_f)
    if lo_val <= 0.0:
        return 0.0
    hi = _nu_upper(params) if nu_hi is None else nu_hi
    return brentq(
        _nu_slope_sign, 0.0, hi, args=(c3_s, gamma_wb_s, params.kappa, log_f), xtol=1e-13, rtol=1e-15
    )


def _inner_value(c3, gamma, nu, params):
    # G = -gamma + alpha * (this); independent of alpha
    _, inner, _ = _pieces(c3, gamma, nu, params.kappa)
    return nu * params.f_wb / (4.0 * gamma) + math.log(inner) / c3


def _m(c3, gamma, params, nu_hi):
    nu = nu_star(c3, gamma, params, nu_hi)
    return _inner_value(c3, gamma, nu, params), nu


def lift_objective(point, params):
    """``-c3/2 + I_sph(c3) + G(gamma, nu)`` at an explicit point (no optimization)."""
    _check_point(point)
    if params.alpha is None:
        raise DomainError("lift_objective needs params.alpha")
    c3, gamma, nu = point.c3_s, point.gamma_wb_s, point.nu_wb
    g = -gamma + params.alpha * _inner_value(c3, gamma, nu, params)
    return -0.5 * c3 + i_sph(c3) + g


def _limit_point(params):
    root = math.sqrt(params.alpha * f_err_hat(params))
    return -root, LiftPoint(0.0, 0.5 * root, nu_hat(params))


def i_wb_hat(c3_s, params):
    """Optimized error term at fixed c3: ``max_gamma min_nu G``, with its optimizer.

    The order is max over gamma of min over nu.  G is unbounded above in nu,
    and with this order c3 -> 0 recovers ``-sqrt(alpha f_err_hat)`` at
    gamma = sqrt(alpha f_err_hat) / 2 and nu = nu_hat.
    """
    if params.alpha is None:
        raise DomainError("i_wb_hat needs params.alpha")
    if c3_s < 0.0:
        raise DomainError(f"c3_s must be nonnegative, got {c3_s!r}")
    if c3_s == 0.0:
        return _limit_point(params)
    nu_hi = _nu_upper(params)
    alpha = params.alpha
    ext = grid_then_golden(
        lambda g: -g + alpha * _m(c3_s, g, params, nu_hi)[0], GAMMA_GRID, maximize=True
    )
    if ext.local_extrema > 1:
        logger.info("gamma objective multimodal on grid at c3=%g, %r", c3_s, params)
    nu = nu_star(c3_s, ext.x, params, nu_hi)
    return ext.value, LiftPoint(c3_s, ext.x, nu)


def _condition(c3_s, params):
    value, point = i_wb_hat(c3_s, params)
    if c3_s == 0.0:
        return 1.0 + value, point
    return -0.5 * c3_s + i_sph(c3_s) + value, point


def xi_lift(params):
    """``-min_{c3 >= 0} (-c3/2 + I_sph + I_wb_hat)`` and its optimizing point.

    A positive value certifies infeasibility at ``params.alpha``.
    """
    if params.alpha is None:
        raise DomainError("xi_lift needs params.alpha")
    ext = grid_then_golden(lambda c: _condition(c, params)[0], C3_GRID)
    if ext.local_extrema > 1:
        logger.info("c3 objective multimodal on grid for %r", params)
    limit, limit_point = _condition(0.0, params)
    if limit <= ext.value:
        return -limit, limit_point
    value, point = _condition(ext.x, params)
    return -value, point


def critical_alpha(c3_s, params):
    """Smallest alpha whose condition at this fixed ``c3_s`` is negative.

    Returns ``(alpha, gamma)`` maximizing ``(gamma + c3/2 - I_sph) / m(gamma)``.
    """
    if not c3_s > 0.0:
        raise DomainError(f"critical_alpha requires c3_s > 0, got {c3_s!r}")
    offset = 0.5 * c3_s - i_sph(c3_s)
    nu_hi = _nu_upper(params)

    def ratio(gamma):
        m, _ = _m(c3_s, gamma, params, nu_hi)
        if m >= 0.0:
            # only when f_wb sits on Phi(kappa); condition cannot turn negative
            return math.inf
        return (gamma + offset) / m

    ext = grid_then_golden(ratio, GAMMA_GRID, maximize=True)
    return ext.value, ext.x


def alpha_lower_lifted(kappa, f_wb):
    """Lifted capacity bound: the smallest alpha at which ``xi_lift`` turns positive.

    Minimizes :func:`critical_alpha` over c3 (log grid plus golden section)
    and compares with the c3 -> 0 value ``alpha_upper``, so the result never
    exceeds it.  ``residual`` is the minimized condition at the returned
    alpha and optimal c3.
    """
    params = PerceptronParams(kappa, f_wb)
    if not 0.0 < f_wb < max_error_fraction(kappa):
        raise DomainError(f"f_wb={f_wb} outside (0, Phi(kappa)={max_error_fraction(kappa):.6g})")
    upper = alpha_upper(params)
    ext = grid_then_golden(lambda c: critical_alpha(c, params)[0], C3_GRID)
    if ext.local_extrema > 1:
        logger.info("critical alpha multimodal over c3 grid at kappa=%g f_wb=%g", kappa, f_wb)
    if not math.isfinite(ext.value):
        raise ConvergenceError(f"critical alpha not finite at kappa={kappa}, f_wb={f_wb}")
    if ext.value >= upper.alpha_bound:
        return CapacityResult(upper.alpha_bound, upper.optimizer_point, upper.residual, ext.iterations)
    alpha, c3 = ext.value, ext.x
    at_alpha = params.with_alpha(alpha)
    value, point = _condition(c3, at_alpha)
    return CapacityResult(alpha, point, value, ext.iterations)
