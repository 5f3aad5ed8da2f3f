"""Special-function kernels for the Coulomb-type guiding-wave modes.

Kummer's confluent hypergeometric function is summed from its Taylor
series in double precision. When the terms are much larger than the
result (large |c|, oscillating series) the double sum has lost digits and
the value is recomputed with mpmath, which raises its working precision
to cover the cancellation.
"""
from __future__ import annotations

import math
import threading

import mpmath

from .errors import ConvergenceError, DomainError

__all__ = [
    "kummer_m",
    "assoc_legendre",
    "legendre_ratio",
    "log_abs_legendre_at_zero",
    "lambda_tilde",
    "KUMMER_MAX_TERMS",
]

KUMMER_MAX_TERMS = 10_000
_STOP_RATIO = 1e-16
_STOP_RUN = 3
# accept the double-precision sum only when the largest term is at most this
# multiple of the result (roughly 1e-13 relative rounding error)
_DOUBLE_CANCELLATION_LIMIT = 16.0
_POLE_TOL = 1e-12
# one private mpmath context per thread: hyp1f1 changes the working
# precision while it runs, and callers' settings must not leak in
_LOCAL = threading.local()


def _context():
    ctx = getattr(_LOCAL, "ctx", None)
    if ctx is None:
        ctx = _LOCAL.ctx = mpmath.MPContext()
    ctx.prec = 53
    return ctx


def _check_finite(z, name):
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z!r}")


def _series_double(a, b, c):
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    biggest = 1.0
    run = 0
    for k in range(KUMMER_MAX_TERMS):
        term *= (a + k) * c / ((b + k) * (k + 1))
        total += term
        size = abs(term)
        if size > biggest:
            biggest = size
        if not math.isfinite(size):
            return total, math.inf, k + 1
        if size <= _STOP_RATIO * abs(total):
            run += 1
            if run >= _STOP_RUN:
                return total, biggest, k + 1
        else:
            run = 0
    raise ConvergenceError(
        f"Kummer series not converged after {KUMMER_MAX_TERMS} terms; last increment {abs(term):.3e}"
    )


def kummer_m(a: complex, b: complex, c: complex) -> complex:
    """Confluent hypergeometric function M(a, b, c) = 1F1(a; b; c).

    Parameters
    ----------
    a, b, c : complex
        Series parameters and argument. ``b`` must not be zero or a
        negative integer.

    Returns
    -------
    complex
        Sum of (a)_k / (b)_k * c**k / k!, stopped once three consecutive
        terms fall below 1e-16 of the partial sum. If the largest term
        exceeds 16 times the result the value comes from mpmath instead.
        Accurate to about 1e-13 relative.

    Raises
    ------
    DomainError
        ``b`` within 1e-12 of a pole, or non-finite input.
    ConvergenceError
        Series not converged within ``KUMMER_MAX_TERMS`` terms.
    """
    a, b, c = complex(a), complex(b), complex(c)
    for z, name in ((a, "a"), (b, "b"), (c, "c")):
        _check_finite(z, name)
    nearest = round(b.real)
    if nearest <= 0 and abs(b - nearest) < _POLE_TOL:
        raise DomainError(f"b = {b!r} is at a pole of M(a, b, c)")
    if c == 0:
        return 1.0 + 0.0j

    total, biggest, _ = _series_double(a, b, c)
    size = abs(total)
    if size > 0 and biggest <= _DOUBLE_CANCELLATION_LIMIT * size:
        return total

    # cancellation: mpmath's hypergeometric summation tracks the lost
    # digits and raises its working precision until the result is exact
    # to double precision
    try:
        return complex(_context().hyp1f1(a, b, c))
    except mpmath.libmp.NoConvergence as exc:
        raise ConvergenceError(f"Kummer series not converged for a={a}, b={b}, c={c}: {exc}") from exc


def _legendre_upward(l, m, x, seed):
    # P_m^m = seed, P_{m+1}^m = x (2m+1) P_m^m, then the three-term recurrence
    if l == m:
        return seed
    p_prev = seed
    p = x * (2 * m + 1) * seed
    for k in range(m + 2, l + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k + m - 1) * p_prev) / (k - m)
    return p


def _check_lm(l, m, x):
    if int(l) != l or int(m) != m or m < 0 or l < 0:
        raise DomainError(f"l and m must be non-negative integers, got l={l!r}, m={m!r}")
    if m > l:
        raise DomainError(f"order m={m} exceeds degree l={l}")
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"x={x!r} outside [-1, 1]")


def assoc_legendre(l: int, m: int, x: float) -> float:
    """Associated Legendre function P_l^m(x) without the Condon-Shortley phase.

    Computed by upward recurrence in the degree from
    P_m^m(x) = (2m-1)!! (1 - x**2)**(m/2). Overflows for m beyond ~150;
    use :func:`legendre_ratio` for normalized values at high order.
    """
    _check_lm(l, m, x)
    seed = math.prod(range(1, 2 * m, 2)) * (1.0 - x * x) ** (m / 2.0)
    return _legendre_upward(int(l), int(m), x, float(seed))


def legendre_ratio(l: int, m: int, x: float) -> float:
    """P_l^m(x) / P_l^m(0), free of the (2m-1)!! overflow.

    The recurrence is linear in its seed, so the double factorial cancels
    and both numerator and denominator are run from a unit-scale seed.
    """
    _check_lm(l, m, x)
    if (l + m) % 2:
        raise DomainError(f"P_{l}^{m}(0) = 0 (l + m odd); ratio undefined")
    num = _legendre_upward(int(l), int(m), x, (1.0 - x * x) ** (m / 2.0))
    den = _legendre_upward(int(l), int(m), 0.0, 1.0)
    return num / den


def log_abs_legendre_at_zero(l: int, m: int) -> float:
    """log |P_l^m(0)| for l + m even: (l+m-1)!! / (l-m)!!."""
    if (l + m) % 2:
        return -math.inf
    # (2k-1)!! = (2k)! / (2^k k!), (2k)!! = 2^k k!
    p = (l + m) // 2
    q = (l - m) // 2
    log_odd = math.lgamma(2 * p + 1) - p * math.log(2.0) - math.lgamma(p + 1)
    log_even = q * math.log(2.0) + math.lgamma(q + 1)
    return log_odd - log_even


def lambda_tilde(l: int, alpha: float) -> float:
    """Effective degree -1/2 + sqrt((l + 1/2)**2 - alpha**2).

    Written as ``l - alpha**2 / (s + l + 1/2)`` so small alpha loses no
    digits.
    """
    if int(l) != l or l < 0:
        raise DomainError(f"l must be a non-negative integer, got {l!r}")
    half = l + 0.5
    radicand = half * half - alpha * alpha
    if not radicand > 0.0:
        raise DomainError(f"(l + 1/2)^2 - alpha^2 = {radicand!r} is not positive")
    s = math.sqrt(radicand)
    return l - alpha * alpha / (s + half)

