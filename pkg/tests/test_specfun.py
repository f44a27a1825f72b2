import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import hermite as npherm
from scipy import special

from iqho.errors import DegreeTooLarge, DomainError
from iqho.specfun import (MAX_DEGREE, hermite_cache, hermite_coeffs, hermite_eval,
                          hermite_norm_sq, hermite_values, legendre_asymptotic, legendre_eval,
                          legendre_growth_ratio)


def test_hermite_base_cases():
    y = 0.3 - 1.7j
    assert hermite_eval(0, y) == 1
    assert hermite_eval(1, y) == 2 * y


def test_hermite_cubic_closed_form():
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(hermite_eval(3, x), 8 * x**3 - 12 * x, rtol=1e-14, atol=1e-13)


def test_hermite_complex_hand_value():
    # H_2(y) = 4y^2 - 2 at y = 1+i
    assert hermite_eval(2, 1 + 1j) == pytest.approx(-2 + 8j, abs=1e-14)


@given(st.integers(0, 30), st.floats(-5, 5), st.floats(-5, 5))
def test_hermite_matches_numpy_series(n, a, b):
    y = complex(a, b)
    ref = npherm.hermval(y, [0] * n + [1])
    assert abs(hermite_eval(n, y) - ref) <= 1e-10 * max(1.0, abs(ref))


@given(st.integers(0, 30), st.floats(-5, 5), st.floats(-5, 5))
def test_hermite_matches_exact_table(n, a, b):
    y = complex(a, b)
    ref = hermite_cache().evaluate(n, y)
    assert abs(hermite_eval(n, y) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_hermite_table_recurrence_and_parity():
    for n in range(2, 60):
        h, h1, h2 = hermite_coeffs(n), hermite_coeffs(n - 1), hermite_coeffs(n - 2)
        rhs = [0] * (n + 1)
        for k, c in enumerate(h1):
            rhs[k + 1] += 2 * c
        for k, c in enumerate(h2):
            rhs[k] -= 2 * (n - 1) * c
        assert list(h) == rhs
        assert all(c == 0 for k, c in enumerate(h) if (k - n) % 2)


def test_hermite_values_stack_agrees():
    y = np.array([0.5 + 0.2j, -1.1j, 2.0])
    vals = hermite_values(8, y)
    for n in range(9):
        np.testing.assert_allclose(vals[n], hermite_eval(n, y), rtol=1e-14)


def test_hermite_degree_limit():
    hermite_eval(MAX_DEGREE, 0.1)
    with pytest.raises(DegreeTooLarge):
        hermite_eval(MAX_DEGREE + 1, 0.1)


def test_hermite_orthogonality_by_quadrature():
    from iqho.numquad import ContourPath, hermite_products, integrate_line

    pairs = [(n, m) for n in range(21) for m in range(n, 21)]
    tol = np.array([1e-10 * hermite_norm_sq(max(p)) for p in pairs])
    res = integrate_line(hermite_products(pairs), ContourPath.real_line(), tol=tol)
    for (n, m), v in zip(pairs, res.value):
        expect = hermite_norm_sq(n) if n == m else 0.0
        assert abs(v - expect) <= 1e-8 * hermite_norm_sq(max(n, m))


def test_legendre_base_cases_and_hand_value():
    assert legendre_eval(0, 3.7) == 1
    assert legendre_eval(1, 3.7) == 3.7
    assert legendre_eval(2, 3.0) == pytest.approx(13.0, rel=1e-15)


def test_legendre_endpoint():
    for n in range(51):
        assert legendre_eval(n, 1.0) == pytest.approx(1.0, abs=1e-13)


@given(st.integers(0, 60), st.floats(-1, 6))
def test_legendre_matches_scipy(n, x):
    ref = special.eval_legendre(n, x)
    assert legendre_eval(n, x) == pytest.approx(ref, rel=1e-11, abs=1e-12)


def test_legendre_asymptotic_ratio():
    assert legendre_eval(60, 2.0) / legendre_asymptotic(60, 2.0) == pytest.approx(1, rel=0.02)


@pytest.mark.parametrize("x", [1.0, 0.5, -3.0])
def test_legendre_asymptotic_domain(x):
    with pytest.raises(DomainError):
        legendre_asymptotic(5, x)


def test_legendre_diverges_at_inverse_cosine():
    x = 1 / math.cos(1.0)
    vals = [legendre_eval(n, x) for n in range(5, 41)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_legendre_growth_ratio_limit():
    x = 1 / math.cos(1.0)
    assert legendre_growth_ratio(x) == pytest.approx(x + math.sqrt(x * x - 1), rel=1e-15)


def test_hermite_norm_sq():
    for n in range(10):
        assert hermite_norm_sq(n) == pytest.approx(2**n * math.factorial(n) * math.sqrt(math.pi))
