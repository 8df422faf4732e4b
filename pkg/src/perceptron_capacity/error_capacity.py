"""Replica-symmetric capacity bound when a fraction ``f_wb`` of patterns may be wrong.

The bound is ``1 / f_err_hat(kappa)`` where f_err_hat is the truncated second
moment E[(g+kappa)^2; -kappa <= g <= sqrt(nu_hat) - kappa] and nu_hat is the
optimal multiplier of the error-budget constraint.  It coincides with the
quantile-threshold form that ``gardner_x`` and ``alpha_from_threshold``
evaluate along a separate route.
"""

import math

from .classic import alpha_c, f_gar
from .exceptions import BracketError, DomainError
from .optimize import bisect_root
from .specfun import SQRT2, erfcinv, erfinv, gauss_second_moment, norm_cdf
from .types import CapacityResult, LiftPoint, PerceptronParams

__all__ = [
    "PerceptronParams",
    "CapacityResult",
    "max_error_fraction",
    "sqrt_nu_hat",
    "nu_hat",
    "f_err_hat",
    "alpha_upper",
    "gardner_x",
    "alpha_from_threshold",
    "f_wb_from_alpha",
]


def _params(params_or_kappa, f_wb=None):
    if isinstance(params_or_kappa, PerceptronParams):
        return params_or_kappa
    return PerceptronParams(params_or_kappa, f_wb)


def max_error_fraction(kappa):
    """Largest admissible ``f_wb`` at margin ``kappa``: Phi(kappa)."""
    return norm_cdf(kappa)


def sqrt_nu_hat(params):
    """``sqrt(2) erfinv(1 - 2 f_wb) + kappa``, the (signed) root of nu_hat.

    ``inf`` at ``f_wb == 0``.  Computed as ``sqrt(2) erfcinv(2 f_wb)`` so small
    error fractions keep full relative precision.
    """
    params = _params(params)
    f = params.f_wb
    if f > max_error_fraction(params.kappa):
        raise DomainError(
            f"f_wb={f} exceeds Phi(kappa)={max_error_fraction(params.kappa):.6g}; nu_hat undefined"
        )
    if f == 0.0:
        return math.inf
    root = SQRT2 * erfcinv(2.0 * f) + params.kappa
    # f == Phi(kappa) up to rounding
    return max(root, 0.0)


def nu_hat(params):
    """Optimal dual scalar of the error budget, ``(sqrt(2) erfinv(1 - 2 f_wb) + kappa)^2``."""
    root = sqrt_nu_hat(params)
    return root * root


def f_err_hat(params):
    params = _params(params)
    if params.f_wb == 0.0:
        return f_gar(params.kappa)
    return gauss_second_moment(-params.kappa, sqrt_nu_hat(params) - params.kappa, params.kappa)


def alpha_upper(params):
    """Capacity upper bound ``1 / f_err_hat``.

    Returns ``alpha_bound = inf`` when f_err_hat vanishes (f_wb = Phi(kappa)).
    The optimizer point is the c3 -> 0 limit (c3 = 0, gamma = 1/2, nu = nu_hat)
    and the residual is ``1 - sqrt(alpha f_err_hat)``.
    """
    params = _params(params)
    if params.f_wb == 0.0:
        alpha = alpha_c(params.kappa)
        return CapacityResult(alpha, LiftPoint(0.0, 0.5, math.inf), 0.0, 0)
    f = f_err_hat(params)
    point = LiftPoint(0.0, 0.5, nu_hat(params))
    if f <= 0.0:
        return CapacityResult(math.inf, point, 0.0, 0)
    alpha = 1.0 / f
    return CapacityResult(alpha, point, 1.0 - math.sqrt(alpha * f), 0)


def gardner_x(params):
    """Solution x of f_wb = Phi(kappa - x), in closed form."""
    params = _params(params)
    f = params.f_wb
    if not 0.0 < f < 1.0:
        raise DomainError(f"gardner_x requires 0 < f_wb < 1, got {f!r}")
    if f < 0.5:
        # erfinv(2f - 1) = -erfcinv(2f), accurate for small f
        return params.kappa + SQRT2 * erfcinv(2.0 * f)
    return params.kappa - SQRT2 * erfinv(2.0 * f - 1.0)


def alpha_from_threshold(params):
    """Capacity prediction written over (kappa - x, kappa) with the (z - kappa)^2 weight."""
    params = _params(params)
    x = gardner_x(params)
    k = params.kappa
    # int_{k-x}^{k} (z-k)^2 phi(z) dz == gauss_second_moment(k - x, k, -k)
    return 1.0 / gauss_second_moment(k - x, k, -k)


def f_wb_from_alpha(kappa, alpha, tol=1e-10):
    """Inverse of ``alpha_upper`` in ``f_wb`` at fixed ``kappa``.

    Raises :class:`BracketError` when ``alpha`` is below the error-free
    capacity ``alpha_c(kappa)`` (no error fraction reaches it).
    """
    base = alpha_c(kappa)
    if alpha < base * (1.0 - 1e-12):
        raise BracketError(f"alpha={alpha} is below alpha_c({kappa})={base:.6g}")
    if alpha <= base:
        return 0.0
    fmax = max_error_fraction(kappa)

    def gap(f):
        if f <= 0.0:
            return base - alpha
        return alpha_upper(PerceptronParams(kappa, f)).alpha_bound - alpha

    f, _ = bisect_root(gap, 0.0, fmax, xtol=tol)
    return f
