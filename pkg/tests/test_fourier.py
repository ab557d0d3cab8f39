import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunkl_sobolev.coherence import build_pair
from dunkl_sobolev.errors import QuadratureAccuracyError
from dunkl_sobolev.expr import ExprFn
from dunkl_sobolev.fourier import (
    expand, initial_coeffs, partial_sum, partial_sum_poly, recurrence_residuals, sobolev_error, w_coeff,
)
from dunkl_sobolev.oracle import basis_for, direct_fourier
from dunkl_sobolev.sobolev import build_context

GEG_F = "x*exp(-(x-0.2)^2)"


def poly_source(coeffs) -> str:
    return "+".join(f"({c!r})*x^{k}" for k, c in enumerate(coeffs))


@pytest.fixture(scope="module")
def hctx(hermite_pair):
    return build_context(hermite_pair, 0.1, 14)


@pytest.fixture(scope="module")
def gctx(gegenbauer_pair):
    return build_context(gegenbauer_pair, 0.5, 14)


@pytest.fixture(scope="module")
def gjob(gctx):
    return expand(gctx, ExprFn.from_source(GEG_F, 1.0), 12)


@pytest.fixture(scope="module")
def gbasis(gegenbauer):
    ext = build_pair(gegenbauer, 0.1, 0.15, 16, precision="extended")
    return basis_for(ext, 0.5, 14), ext


def test_constant_function(hctx):
    job = expand(hctx, ExprFn.from_source("1", 5.0), 8)
    assert initial_coeffs(job) == (1, 0)
    for n in range(1, 7):
        assert abs(w_coeff(job, n)) <= 1e-12
    assert job.F[0] == 1


def test_hermite_initial_values(hctx):
    job = expand(hctx, ExprFn.from_source("10*x-x^2", 5.0), 12)
    f0, f1 = initial_coeffs(job)
    assert f0 == pytest.approx(-5.5, rel=1e-14)
    assert f1 == pytest.approx(176.0, rel=1e-14)
    # w_0 = <u, P_2 f> + lambda <v, 2x (10 mu_1 - 2x)> from moments
    m2u, m4u = 5.5, 35.75
    m2v = hctx.pair.tilde_gamma[1]
    w0 = -(m4u - 5.5 * m2u) + 0.1 * (-4 * m2v)
    assert job.w[0] == pytest.approx(w0, rel=1e-13)
    x = ExprFn.from_source("x", 5.0)
    assert initial_coeffs(expand(hctx, x, 4))[1] == pytest.approx(5.5 + 0.1 * 121, rel=1e-14)


def test_hermite_matches_oracle(hermite_pair, hctx):
    f = ExprFn.from_source("10*x-x^2", 5.0)
    job = expand(hctx, f, 12)
    ref = direct_fourier(basis_for(hermite_pair, 0.1, 13), f, 12)
    for n in range(13):
        assert abs(job.F[n] - float(ref[n])) <= 1e-8 * max(1, abs(float(ref[n])))
    assert [float(v) for v in job.F[:3]] == pytest.approx([-5.5, 10.0, -1.0], rel=1e-13)


def test_basis_element_expansions(hctx):
    for k in (2, 3, 5):
        f = ExprFn.from_source(poly_source(hctx.S[k].coeffs), 5.0)
        job = expand(hctx, f, 10)
        for n in range(11):
            assert job.F[n] == pytest.approx(1.0 if n == k else 0.0, abs=1e-9)
        assert abs(sobolev_error(job, 10)) <= 1e-9 * job.norm_sq


@pytest.mark.parametrize("coeffs, degree", [((1.0, 0, -2.0, 0, 0.5), 4), ((0, 1.0, 0, 3.0, 0, -0.25), 5)])
def test_finite_expansion(hctx, coeffs, degree):
    f = ExprFn.from_source(poly_source(coeffs), 5.0)
    job = expand(hctx, f, 10)
    for n in range(degree + 1, 11):
        assert abs(job.F[n]) <= 1e-9
    recon = partial_sum_poly(job, degree)
    for k, c in enumerate(coeffs):
        assert recon[k] == pytest.approx(c, abs=1e-9)


def test_partial_sum_examples(hctx):
    f = ExprFn.from_source("x*(10-x)", 5.0)
    job = expand(hctx, f, 6)
    x = np.linspace(-3, 3, 7)
    assert np.allclose(partial_sum(job, 2, x), f.f(x), rtol=1e-12, atol=1e-12)
    assert partial_sum(job, 0, 0.7) == job.F[0]


def test_quadrature_path_reproduces_exact(hctx):
    f = ExprFn.from_source("x*(10-x)", 5.0)
    exact = expand(hctx, f, 8)
    quad = expand(hctx, f, 8, exact=False)
    assert quad.brackets.v_realization == "geronimus"
    for n in range(9):
        assert quad.F[n] == pytest.approx(exact.F[n], rel=1e-9, abs=1e-9)


def test_gegenbauer_odd_chain_matches_oracle(gctx, gbasis):
    basis, ext = gbasis
    f = ExprFn.from_source(GEG_F, 1.0)
    job = expand(gctx, f, 11)
    ref = direct_fourier(basis, f, 11, ext)
    scale = max(abs(float(v)) for v in ref)
    for n in range(1, 12, 2):
        assert abs(job.F[n] - float(ref[n])) <= 1e-6 * scale


def test_gegenbauer_partial_sum_near_f(gjob, gbasis):
    basis, ext = gbasis
    ref = direct_fourier(basis, gjob.f, 11, ext)
    ref_sum = sum(float(ref[n]) * float(basis.S[n](0.5)) for n in range(12))
    assert partial_sum(gjob, 11, 0.5) == pytest.approx(ref_sum, rel=1e-6)
    assert abs(partial_sum(gjob, 11, 0.5) - gjob.f.f(0.5)) < 1e-3


def test_gegenbauer_error_decreases(gjob):
    assert sobolev_error(gjob, 11) < sobolev_error(gjob, 5)


def test_recurrence_holds(gjob):
    scale = max(abs(v) for v in gjob.fcoef)
    assert max(recurrence_residuals(gjob)) <= 1e-12 * scale


def test_membership(gjob):
    assert gjob.membership()
    assert gjob.brackets.doubling_error <= 1e-9


def test_doubling_failure_raises(gctx):
    f = ExprFn.from_source("exp(25*x)*sin(40*x)", 1.0)
    with pytest.raises(QuadratureAccuracyError):
        expand(gctx, f, 6, quad_nodes=6)


def test_parity_filtering(gctx):
    job = expand(gctx, ExprFn.from_source("cos(3*x)", 1.0), 10)
    assert all(abs(job.F[n]) <= 1e-10 for n in range(1, 11, 2))
    job = expand(gctx, ExprFn.from_source("sin(2*x)", 1.0), 10)
    assert all(abs(job.F[n]) <= 1e-10 for n in range(0, 11, 2))


@pytest.fixture(scope="module")
def hctx_ext(hermite):
    # S_10 has coefficients near 1e5 for mu = 5, so double rounding alone reaches 1e-9
    return build_context(build_pair(hermite, 1.2, 1.3, 14, precision="extended"), 0.1, 12)


@settings(max_examples=30)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=11))
def test_polynomial_exactness_property(hctx_ext, coeffs):
    f = ExprFn.from_source(poly_source(coeffs), 5.0)
    poly = f.polynomial()
    d = max(poly.degree, 0)
    job = expand(hctx_ext, f, 12)
    scale = max(1.0, poly.max_abs())
    for n in range(d + 1, 13):
        assert abs(job.F[n]) <= 1e-9 * scale
    recon = partial_sum_poly(job, d)
    for k in range(d + 1):
        assert abs(recon[k] - poly[k]) <= 1e-9 * scale


@settings(max_examples=30)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=11))
def test_polynomial_exactness_property_double(gctx, coeffs):
    f = ExprFn.from_source(poly_source(coeffs), 1.0)
    poly = f.polynomial()
    d = max(poly.degree, 0)
    job = expand(gctx, f, 12)
    scale = max(1.0, poly.max_abs())
    for n in range(d + 1, 13):
        assert abs(job.F[n]) <= 1e-9 * scale
    recon = partial_sum_poly(job, d)
    for k in range(d + 1):
        assert abs(recon[k] - poly[k]) <= 1e-9 * scale
