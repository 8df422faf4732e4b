"""Scalar special functions and closed-form Gaussian moments.

Everything here is a pure function of its arguments.  ``erf``/``erfc`` are the
C library implementations exposed by :mod:`math`; the inverse functions are
refined from a rational seed so they hit full double precision.
"""

import math

from .exceptions import ConvergenceError, DomainError

__all__ = [
    "erf",
    "erfc",
    "erfinv",
    "erfcinv",
    "norm_pdf",
    "norm_cdf",
    "norm_sf",
    "norm_mass",
    "gauss_second_moment",
    "integrate_adaptive",
    "TAIL_CUTOFF",
]

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
_TWO_OVER_SQRTPI = 2.0 / math.sqrt(math.pi)

# |z| beyond which the standard normal tail is below 1e-32 (quadrature only)
TAIL_CUTOFF = 12.0

erf = math.erf
erfc = math.erfc


def _erfinv_seed(y, w=None):
    # Giles (2010) single-precision rational approximation, |rel err| < 4e-7;
    # w = -log(1 - y^2) may be passed in when 1 - y is known more accurately
    if w is None:
        w = -math.log((1.0 - y) * (1.0 + y))
    if w < 5.0:
        w -= 2.5
        p = 2.81022636e-08
        p = 3.43273939e-07 + p * w
        p = -3.5233877e-06 + p * w
        p = -4.39150654e-06 + p * w
        p = 0.00021858087 + p * w
        p = -0.00125372503 + p * w
        p = -0.00417768164 + p * w
        p = 0.246640727 + p * w
        p = 1.50140941 + p * w
    else:
        w = math.sqrt(w) - 3.0
        p = -0.000200214257
        p = 0.000100950558 + p * w
        p = 0.00134934322 + p * w
        p = -0.00367342844 + p * w
        p = 0.00573950773 + p * w
        p = -0.0076224613 + p * w
        p = 0.00943887047 + p * w
        p = 1.00167406 + p * w
        p = 2.83297682 + p * w
    return p * y


def _refine(x, residual):
    # two Halley steps; erf'' = -2x erf'
    for _ in range(2):
        e = residual(x)
        d = _TWO_OVER_SQRTPI * math.exp(-x * x)
        if d == 0.0:
            break
        x -= e / (d + x * e)
    return x


def erfcinv(z):
    """Inverse of the complementary error function on (0, 2)."""
    if not 0.0 < z < 2.0:
        raise DomainError(f"erfcinv requires 0 < z < 2, got {z!r}")
    if z > 1.0:
        return -erfcinv(2.0 - z)
    if z == 1.0:
        return 0.0
    if z > 0.5:
        # moderate arguments: residual through erf keeps absolute accuracy
        y = 1.0 - z
        x = _erfinv_seed(y)
        return _refine(x, lambda t: math.erf(t) - y)
    if z > 1e-8:
        # 1 - z is not exact here, so seed from the tail variable directly;
        # residual in erfc keeps relative accuracy (erfc' = -erf' flips the sign)
        x = _erfinv_seed(1.0 - z, -math.log(z * (2.0 - z)))
        return _refine(x, lambda t: z - math.erfc(t))
    # deep tail: erfc(x) ~ exp(-x^2) / (x sqrt(pi)), then Newton on log erfc
    log_z = math.log(z)
    x = math.sqrt(-log_z)
    for _ in range(3):
        x = math.sqrt(-log_z - math.log(x * math.sqrt(math.pi)))
    for _ in range(4):
        tail = math.erfc(x)
        if tail == 0.0:
            break
        x += (math.log(tail) - log_z) * tail / (_TWO_OVER_SQRTPI * math.exp(-x * x))
    return x


def erfinv(y):
    """Inverse error function, ``erf(erfinv(y)) == y`` on (-1, 1).

    Raises :class:`DomainError` for ``|y| >= 1``.
    """
    if not -1.0 < y < 1.0:
        raise DomainError(f"erfinv requires -1 < y < 1, got {y!r}")
    if y < 0.0:
        return -erfinv(-y)
    if y == 0.0:
        return 0.0
    if y >= 0.5:
        # 1 - y is exact for y in [0.5, 1)
        return erfcinv(1.0 - y)
    x = _erfinv_seed(y)
    return _refine(x, lambda t: math.erf(t) - y)


def norm_pdf(x):
    if math.isinf(x):
        return 0.0
    return math.exp(-0.5 * x * x) / SQRT2PI


def norm_cdf(x):
    """Standard normal CDF, accurate in the lower tail."""
    return 0.5 * math.erfc(-x / SQRT2)


def norm_sf(x):
    """Standard normal survival function ``1 - norm_cdf(x)``, accurate in the upper tail."""
    return 0.5 * math.erfc(x / SQRT2)


def norm_mass(a, b):
    """P(a <= Z <= b) for standard normal Z, without cancellation in either tail."""
    if a >= 0.0:
        return norm_sf(a) - norm_sf(b)
    if b <= 0.0:
        return norm_cdf(b) - norm_cdf(a)
    return 1.0 - norm_sf(b) - norm_cdf(a)


def _z_pdf(z):
    # z * phi(z), with the limit 0 at +-inf
    if math.isinf(z):
        return 0.0
    return z * norm_pdf(z)


def gauss_second_moment(a, b, kappa):
    r"""Closed form of :math:`\frac{1}{\sqrt{2\pi}}\int_a^b (z+\kappa)^2 e^{-z^2/2}\,dz`.

    ``a`` and ``b`` may be ``-inf``/``inf``.
    """
    if a > b:
        raise DomainError(f"gauss_second_moment requires a <= b, got a={a!r}, b={b!r}")
    if a == b:
        return 0.0
    mass = norm_mass(a, b)
    value = (
        (1.0 + kappa * kappa) * mass
        + 2.0 * kappa * (norm_pdf(a) - norm_pdf(b))
        + _z_pdf(a)
        - _z_pdf(b)
    )
    # cancellation can leave a tiny negative remainder deep in a tail
    return max(value, 0.0)


def integrate_adaptive(f, a, b, tol=1e-10, max_depth=60):
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]``.

    Infinite endpoints are truncated at ``TAIL_CUTOFF``; only meant for
    integrands with Gaussian decay.  Raises :class:`ConvergenceError` when the
    recursion needs more than ``max_depth`` levels.
    """
    if a > b:
        return -integrate_adaptive(f, b, a, tol, max_depth)
    a = max(a, -TAIL_CUTOFF)
    b = min(b, TAIL_CUTOFF)
    if a >= b:
        return 0.0

    def simpson(lo, flo, hi, fhi):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        return mid, fmid, (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, flo, hi, fhi, mid, fmid, whole, eps, depth):
        lmid, flmid, left = simpson(lo, flo, mid, fmid)
        rmid, frmid, right = simpson(mid, fmid, hi, fhi)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise ConvergenceError(
                f"adaptive Simpson exceeded depth {max_depth} on [{lo}, {hi}]"
            )
        return recurse(lo, flo, mid, fmid, lmid, flmid, left, 0.5 * eps, depth + 1) + recurse(
            mid, fmid, hi, fhi, rmid, frmid, right, 0.5 * eps, depth + 1
        )

    # split up front so narrow peaks are not missed by the first Simpson panel
    pieces = 16
    h = (b - a) / pieces
    total = 0.0
    for k in range(pieces):
        lo, hi = a + k * h, a + (k + 1) * h if k < pieces - 1 else b
        flo, fhi = f(lo), f(hi)
        mid, fmid, whole = simpson(lo, flo, hi, fhi)
        total += recurse(lo, flo, hi, fhi, mid, fmid, whole, tol / pieces, 1)
    return total
