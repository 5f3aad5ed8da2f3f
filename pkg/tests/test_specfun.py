import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_kummer_samples, series_oracle
from zeeman_analog.errors import DomainError
from zeeman_analog.specfun import (
    assoc_legendre,
    kummer_m,
    lambda_tilde,
    legendre_ratio,
    log_abs_legendre_at_zero,
)


KUMMER_SAMPLES = random_kummer_samples(200, seed=7)


def test_kummer_matches_series_oracle_on_random_samples():
    worst = 0.0
    for a, b, c in KUMMER_SAMPLES:
        ref = series_oracle(a, b, c)
        got = kummer_m(a, b, c)
        worst = max(worst, abs(got - ref) / abs(ref))
    assert worst <= 1e-10


@settings(max_examples=50, deadline=None)
@given(
    st.floats(-20, 20).filter(lambda a: abs(a - round(a)) > 1e-3 or round(a) > 0),
    st.floats(-30, 30),
)
def test_kummer_equal_parameters_gives_exponential(a, z):
    assert kummer_m(a, a, z).real == pytest.approx(math.exp(z), rel=1e-12)


def test_kummer_closed_forms():
    assert kummer_m(1, 2, 1).real == pytest.approx(math.e - 1, rel=1e-15)
    assert kummer_m(0, 3.5, 17.0) == 1.0
    assert kummer_m(2.0, 1.0, 0.0) == 1.0
    # Kummer transformation M(a, b, z) = e^z M(b - a, b, -z)
    for a, b, z in [(0.3, 2.5, 12.0), (-4.5, 1.5, 30.0), (2.2, 7.0, -25.0)]:
        lhs = kummer_m(a, b, z)
        rhs = math.exp(z) * kummer_m(b - a, b, -z)
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


@pytest.mark.parametrize("a, b, z", [(0.7, 1.3, 2.0), (-2.5, 3.0, -4.0), (1.5 + 0.5j, 2.0, 1.0j)])
def test_kummer_derivative_identity(a, b, z):
    h = 1e-4
    deriv = (kummer_m(a, b, z + h) - kummer_m(a, b, z - h)) / (2 * h)
    assert abs(deriv - a / b * kummer_m(a + 1, b + 1, z)) < 1e-7 * abs(deriv)


def test_kummer_terminating_polynomial():
    # M(-2, b, z) = 1 - 2z/b + z^2 / (b (b + 1))
    b, z = 1.5, -40.0
    assert kummer_m(-2, b, z).real == pytest.approx(1 - 2 * z / b + z * z / (b * (b + 1)), rel=1e-14)


@pytest.mark.parametrize("b", [0.0, -1.0, -3.0 + 1e-13])
def test_kummer_rejects_poles(b):
    with pytest.raises(DomainError):
        kummer_m(1.0, b, 1.0)


def test_kummer_rejects_nonfinite():
    with pytest.raises(DomainError):
        kummer_m(math.nan, 1.0, 1.0)


@pytest.mark.parametrize("l, m", [(l, m) for l in range(8) for m in range(min(l, 3) + 1)])
def test_legendre_orthogonality(l, m):
    x, w = np.polynomial.legendre.leggauss(40)
    p_l = np.array([assoc_legendre(l, m, xi) for xi in x])
    for k in range(m, 8):
        p_k = np.array([assoc_legendre(k, m, xi) for xi in x])
        inner = float(np.sum(w * p_l * p_k))
        expected = 2 / (2 * l + 1) * math.factorial(l + m) / math.factorial(l - m) if k == l else 0.0
        assert inner == pytest.approx(expected, rel=1e-12, abs=1e-10)


def test_legendre_sign_convention_has_no_phase():
    x = 0.3
    assert assoc_legendre(1, 1, x) == pytest.approx(math.sqrt(1 - x * x))
    assert assoc_legendre(2, 1, x) == pytest.approx(3 * x * math.sqrt(1 - x * x))
    assert assoc_legendre(2, 2, x) == pytest.approx(3 * (1 - x * x))


@given(st.integers(0, 60), st.integers(0, 60), st.floats(-1, 1))
def test_legendre_ratio_matches_direct_value(l, m, x):
    if m > l or (l + m) % 2:
        return
    direct = assoc_legendre(l, m, x) / assoc_legendre(l, m, 0.0)
    assert legendre_ratio(l, m, x) == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_legendre_ratio_survives_high_order():
    # (2m-1)!! overflows double for m = 200
    assert legendre_ratio(200, 200, 0.0) == 1.0
    assert math.isfinite(legendre_ratio(202, 200, 0.1))


@pytest.mark.parametrize("l, m", [(0, 0), (2, 0), (3, 1), (4, 2), (6, 6), (10, 4)])
def test_log_abs_legendre_at_zero(l, m):
    assert log_abs_legendre_at_zero(l, m) == pytest.approx(math.log(abs(assoc_legendre(l, m, 0.0))), abs=1e-12)


def test_log_abs_legendre_at_zero_odd_parity():
    assert log_abs_legendre_at_zero(3, 0) == -math.inf
    with pytest.raises(DomainError):
        legendre_ratio(3, 0, 0.2)


@pytest.mark.parametrize("l, m, x", [(-1, 0, 0.0), (1, 2, 0.0), (2, 0, 1.5), (1.5, 0, 0.0)])
def test_legendre_domain_errors(l, m, x):
    with pytest.raises(DomainError):
        assoc_legendre(l, m, x)


def test_lambda_tilde_values():
    with mpmath.workdps(40):
        ref = -mpmath.mpf(1) / 2 + mpmath.sqrt(mpmath.mpf(3) ** 2 / 4 - mpmath.mpf(1) / 137**2)
    assert lambda_tilde(1, 1 / 137) == pytest.approx(float(ref), rel=1e-15)
    assert lambda_tilde(1, 1 / 137) == pytest.approx(0.9999822401, abs=1e-10)


@given(st.integers(0, 500), st.floats(0, 0.49))
def test_lambda_tilde_solves_quadratic(l, alpha):
    lt = lambda_tilde(l, alpha)
    assert lt * (lt + 1) == pytest.approx(l * (l + 1) - alpha**2, rel=1e-12, abs=1e-14)
    assert lt <= l


def test_lambda_tilde_domain():
    with pytest.raises(DomainError):
        lambda_tilde(0, 0.6)
    with pytest.raises(DomainError):
        lambda_tilde(-1, 0.1)
