from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dunkl_sobolev.errors import ParityError, RegimeError
from dunkl_sobolev.polycore import (
    Polynomial, X, dunkl, from_quadratic, h_minus1, mu_index, quadratic_split, validate_mu,
)

H2 = Polynomial((-5.5, 0.0, 1.0))
H3 = Polynomial((0.0, -6.5, 0.0, 1.0))  # x H_2 - gamma_2 x with gamma_2 = 1 for mu = 5

coeff = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
polys = st.lists(coeff, min_size=0, max_size=21).map(lambda c: Polynomial(tuple(c)))
mus = st.sampled_from([0.0, 0.5, 1.0, 2.5, 5.0])


def test_evaluation_examples():
    assert H2(0) == -5.5
    assert H2(1) == -4.5
    assert Polynomial()(3) == 0


def test_zero_polynomial_uses_sentinel():
    assert Polynomial().degree == -1
    assert Polynomial((0.0, 0.0)).is_zero()
    assert Polynomial((1.0, 2.0, 0.0)).coeffs == (1.0, 2.0)


def test_parity_flags():
    assert H2.parity == "even"
    assert H3.parity == "odd"
    assert Polynomial((1.0, 1.0)).parity is None


def test_h_minus1_examples():
    x = X()
    assert h_minus1(x).coeffs == (1.0,)
    assert h_minus1(x * x).is_zero()
    assert h_minus1(x * x * x + x).coeffs == (1.0, 0.0, 1.0)


def test_dunkl_examples():
    x = X()
    assert dunkl(x, 5).coeffs == (11.0,)
    assert dunkl(x * x, 3.0).coeffs == (0.0, 2.0)
    assert dunkl(H3, 5).coeffs == (13 * -5.5, 0.0, 13.0)


def test_mu_index_examples():
    assert mu_index(0, 5) == 0
    assert mu_index(3, 5) == 13
    assert mu_index(4, 1) == 4


def test_validate_mu_regime():
    validate_mu(0.0)
    with pytest.raises(RegimeError):
        validate_mu(-0.5)


def test_quadratic_split_examples():
    assert quadratic_split(H2) == (Polynomial((-5.5, 1.0)), None)
    assert quadratic_split(H3) == (None, Polynomial((-6.5, 1.0)))
    assert quadratic_split(Polynomial((1.0,))) == (Polynomial((1.0,)), None)
    with pytest.raises(ParityError):
        quadratic_split(Polynomial((1.0, 1.0)))


@given(polys, polys, coeff, coeff, mus)
def test_dunkl_linearity(p, q, a, b, mu):
    lhs = dunkl(p * a + q * b, mu)
    rhs = dunkl(p, mu) * a + dunkl(q, mu) * b
    scale = max(1.0, lhs.max_abs(), rhs.max_abs())
    for k in range(max(lhs.degree, rhs.degree) + 1):
        assert abs(lhs[k] - rhs[k]) <= 1e-13 * scale


@pytest.mark.parametrize("n", range(31))
def test_dunkl_monomials(n):
    mono = Polynomial.monomial(n, Fraction(1))
    mu = Fraction(5, 2)
    target = Polynomial.monomial(n - 1, mu_index(n, mu)) if n else Polynomial()
    assert dunkl(mono, mu) == target
    assert dunkl(mono, 0) == (Polynomial.monomial(n - 1, n) if n else Polynomial())


@given(st.lists(coeff, min_size=1, max_size=10), st.booleans())
def test_quadratic_split_round_trip(cs, odd):
    q = Polynomial(tuple(cs))
    assume(not q.is_zero())  # zero has both parities
    p = from_quadratic(q, odd)
    A, B = quadratic_split(p)
    back = from_quadratic(B if odd else A, odd)
    assert back.coeffs == p.coeffs
