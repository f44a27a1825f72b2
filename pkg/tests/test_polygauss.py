import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate

from conftest import cplx, polygauss, random_compatible_pair
from iqho.errors import IncompatiblePair
from iqho.numquad import ContourPath, integrate_line
from iqho.pbops import Kind, ThetaParams, build_operators, eigenfamily
from iqho.polygauss import (DiffOp, PolyGaussFn, apply_op, evaluate, gram, moment_integrand,
                            norm_sq, pairing, rotate, weighted_pairing)


def scipy_pairing(f, g, weight_alpha=0.0):
    """Independent oracle: real and imaginary parts by scipy.integrate.quad.

    The window is centred on the Gaussian envelope and extends until it has
    dropped by exp(-50) relative to its peak.
    """
    a = f.alpha.real + g.alpha.real + weight_alpha
    b = f.beta.real + g.beta.real
    centre = b / a
    half = math.sqrt(2 * 50 / a) + 3.0

    def h(x):
        return np.conj(evaluate(f, x)) * evaluate(g, x) * np.exp(-0.5 * weight_alpha * x * x)

    lo, hi = centre - half, centre + half
    opts = dict(epsabs=1e-14, epsrel=1e-12, limit=2000)
    re = integrate.quad(lambda x: h(x).real, lo, hi, **opts)[0]
    im = integrate.quad(lambda x: h(x).imag, lo, hi, **opts)[0]
    return complex(re, im)


# -- representation -------------------------------------------------------------


def test_trailing_zeros_stripped_and_zero_function():
    f = PolyGaussFn([1, 2, 0, 0], 1.0)
    assert f.degree == 1
    z = PolyGaussFn([0, 0], 1.0)
    assert z.is_zero and z.degree == -1


def test_negative_real_alpha_rejected():
    with pytest.raises(ValueError):
        PolyGaussFn([1.0], -0.1)


def test_coefficients_read_only():
    f = PolyGaussFn([1.0, 2.0], 1.0)
    with pytest.raises(ValueError):
        f.coeffs[0] = 5


def test_sum_with_different_exponents_refused():
    with pytest.raises(ValueError):
        PolyGaussFn([1.0], 1.0) + PolyGaussFn([1.0], 2.0)


def test_gamma_absorbed_in_sums():
    f = PolyGaussFn([1.0], 1.0, 0j, 0.3)
    g = PolyGaussFn([1.0], 1.0, 0j, -0.2j)
    x = np.linspace(-2, 2, 7)
    np.testing.assert_allclose(evaluate(f + g, x), evaluate(f, x) + evaluate(g, x), rtol=1e-14)


# -- evaluation -------------------------------------------------------------------


def test_eval_gaussian_at_origin():
    assert evaluate(PolyGaussFn([1.0], 1.0), 0.0) == 1


def test_eval_e3_at_one():
    e3 = eigenfamily(ThetaParams(0.0), Kind.E, 3).member(3)
    expect = math.pi ** -0.25 * (-4) / math.sqrt(8 * 6) * math.exp(-0.5)
    assert evaluate(e3, 1.0) == pytest.approx(expect, rel=1e-14)


@given(polygauss(), cplx)
def test_eval_matches_monomial_sum(f, x):
    naive = sum(c * x**k for k, c in enumerate(f.coeffs)) * cmath.exp(f.gamma) \
        * cmath.exp(f.beta * x) * cmath.exp(-0.5 * f.alpha * x * x)
    assert abs(evaluate(f, x) - naive) <= 1e-12 * max(1.0, abs(naive))


# -- differential operators ------------------------------------------------------


def test_derivative_of_gaussian():
    out = apply_op(DiffOp.d(), PolyGaussFn([1.0], 1.0))
    assert out.isclose(PolyGaussFn([0.0, -1.0], 1.0), 1e-15)


def test_x_d_on_linear_times_gaussian():
    # x d/dx [(1+x) e^{-x^2}] = (x - 2x^2 - 2x^3) e^{-x^2}, by the product rule
    f = PolyGaussFn([1.0, 1.0], 2.0)
    out = apply_op(DiffOp.x() @ DiffOp.d(), f)
    assert out.isclose(PolyGaussFn([0.0, 1.0, -2.0, -2.0], 2.0), 1e-15)


@pytest.mark.parametrize("theta", [0.0, 0.8, -1.3, "crit+", "crit-"])
def test_lowering_annihilates_vacuum(theta):
    params = ThetaParams.critical(1 if theta == "crit+" else -1) if isinstance(theta, str) \
        else ThetaParams(theta, 1.3)
    ops = build_operators(params)
    assert apply_op(ops.a, eigenfamily(params, Kind.PHI, 0).member(0)).is_zero


@given(polygauss(max_degree=3), st.integers(0, 2), st.integers(0, 2), cplx)
def test_apply_op_matches_finite_differences(f, j, k, c):
    op = DiffOp({(j, k): c})
    out = apply_op(op, f)
    x, h = 0.37, 1e-3
    # fourth-order central differences as the independent derivative oracle
    stencils = {0: ([0], [1.0]), 1: ([-2, -1, 1, 2], [1 / 12, -2 / 3, 2 / 3, -1 / 12]),
                2: ([-2, -1, 0, 1, 2], [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12])}
    offs, w = stencils[k]
    deriv = sum(wi * evaluate(f, x + o * h) for o, wi in zip(offs, w)) / h**k
    expect = c * x**j * deriv
    assert abs(evaluate(out, x) - expect) <= 1e-5 * max(1.0, abs(expect), abs(evaluate(f, x)))


@given(polygauss(max_degree=3), cplx, cplx)
def test_apply_op_linear(f, a, b):
    A, B = DiffOp.x(2) @ DiffOp.d(), DiffOp.d(2) + DiffOp.x()
    lhs = apply_op(A * a + B * b, f)
    rhs = a * apply_op(A, f) + b * apply_op(B, f)
    assert lhs.discrepancy(rhs) <= 1e-12 or (lhs.is_zero and rhs.is_zero)


def test_p_adjoint_and_canonical_commutator():
    p, x = DiffOp.p(), DiffOp.x()
    assert p.adjoint().isclose(p)
    assert x.commutator(p).isclose(DiffOp.identity() * 1j)


# -- pairings --------------------------------------------------------------------


def test_unit_gaussian_norm():
    f = PolyGaussFn([math.pi ** -0.25], 1.0)
    assert pairing(f, f) == pytest.approx(1.0, abs=1e-15)


def test_critical_vacua_incompatible():
    phi0 = eigenfamily(ThetaParams.critical(1), Kind.PHI, 0).member(0)
    with pytest.raises(IncompatiblePair):
        pairing(phi0, phi0)


def test_x_gaussian_against_quadrature():
    f = PolyGaussFn([0.0, 1.0], 2.0)
    res = integrate_line(moment_integrand(f, f), ContourPath.real_line(), tol=1e-14)
    assert pairing(f, f) == pytest.approx(res.value, abs=1e-13)
    assert pairing(f, f) == pytest.approx(math.sqrt(2 * math.pi) / 8, rel=1e-14)


def test_weighted_pairing_examples():
    om = 1.7
    f = PolyGaussFn([1.0], 2 * om)
    # inserting rho^2 = exp(Omega x^2) turns exp(-2 Omega x^2) into exp(-Omega x^2)
    assert weighted_pairing(f, f, -2 * om) == pytest.approx(math.sqrt(math.pi / om), rel=1e-14)
    g = PolyGaussFn([1.0, 0.5j], 0.8 + 0.3j, 0.2)
    assert weighted_pairing(f, g, 0.0) == pairing(f, g)


@given(polygauss(), polygauss(), st.floats(-0.3, 2.0))
def test_weighted_pairing_against_scipy(f, g, w):
    val = weighted_pairing(f, g, w)
    ref = scipy_pairing(f, g, w)
    assert abs(val - ref) <= 1e-8 * max(1.0, abs(ref))


@given(polygauss(), polygauss(), polygauss(), cplx, cplx)
def test_pairing_bilinear(f, g1, g2, c1, c2):
    g2 = g2.replace(alpha=g1.alpha, beta=g1.beta)
    lhs = pairing(f, c1 * g1 + c2 * g2)
    rhs = c1 * pairing(f, g1) + c2 * pairing(f, g2)
    scale = abs(c1 * pairing(f, g1)) + abs(c2 * pairing(f, g2)) + 1e-300
    assert abs(lhs - rhs) <= 1e-12 * max(scale, abs(lhs))


@given(polygauss(), polygauss())
def test_pairing_conjugate_symmetric(f, g):
    a, b = pairing(f, g), pairing(g, f)
    assert abs(a - b.conjugate()) <= 1e-13 * max(1.0, abs(a))


@given(polygauss())
def test_norm_non_negative(f):
    assert norm_sq(f) > 0


def test_pairing_against_adaptive_quadrature(rng):
    for _ in range(30):
        f, g = random_compatible_pair(rng)
        res = integrate_line(moment_integrand(f, g), ContourPath.real_line(), tol=1e-12)
        val = pairing(f, g)
        assert abs(val - res.value) <= max(1e-9, 1e-9 * abs(val))


def test_gram_matches_individual_pairings():
    params = ThetaParams(0.9, 1.4)
    phi = eigenfamily(params, Kind.PHI, 8).members()
    psi = eigenfamily(params, Kind.PSI, 8).members()
    G = gram(phi, psi)
    for n in (0, 3, 8):
        for m in (0, 5, 8):
            assert G[n, m] == pytest.approx(pairing(phi[n], psi[m]), abs=1e-14)


# -- rotation --------------------------------------------------------------------


@given(polygauss(), st.floats(-1.5, 1.5))
def test_rotate_roundtrip(f, th):
    assume((f.alpha * cmath.exp(1j * th)).real >= 0)
    assert rotate(rotate(f, th), -th).isclose(f, 1e-13)
    assert rotate(f, 0.0).isclose(f, 0.0)


@given(polygauss(), st.floats(-0.7, 0.7), st.floats(-1, 1))
def test_rotate_pointwise(f, th, x):
    assume((f.alpha * cmath.exp(1j * th)).real >= 0)
    expect = cmath.exp(0.25j * th) * evaluate(f, cmath.exp(0.5j * th) * x)
    assert abs(evaluate(rotate(f, th), x) - expect) <= 1e-12 * max(1.0, abs(expect))


def test_rotate_out_of_class_refused():
    with pytest.raises(ValueError):
        rotate(PolyGaussFn([1.0], 1 + 1j), 1.0)


def test_rotate_e_n_gives_phi_n():
    th = 0.8
    e = eigenfamily(ThetaParams(th), Kind.E, 10)
    phi = eigenfamily(ThetaParams(th), Kind.PHI, 10)
    for n in range(11):
        assert rotate(e.member(n), th).isclose(phi.member(n), 1e-12)


def test_rotation_symmetric_on_hermite_span(rng):
    th = 0.7
    e = eigenfamily(ThetaParams(th), Kind.E, 6)
    for _ in range(5):
        a, b = rng.normal(size=7), rng.normal(size=7)
        f = sum((c * e.member(n) for n, c in enumerate(a)), PolyGaussFn.zero())
        g = sum((c * e.member(n) for n, c in enumerate(b)), PolyGaussFn.zero())
        assert pairing(rotate(f, th), g) == pytest.approx(pairing(f, rotate(g, th)), abs=1e-12)
