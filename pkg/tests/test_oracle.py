import math

import pytest

from dunkl_sobolev.coherence import PAPER_COMPAT, build_pair
from dunkl_sobolev.expr import ExprFn
from dunkl_sobolev.oracle import (
    basis_for, closed_form_moments, direct_fourier, divergence_index, fitted_phi, gram_from_pair, hankel_basis,
    oracle_eta, orthogonalize,
)
from dunkl_sobolev.coherence import geronimus_parameters
from dunkl_sobolev.sobolev import build_context


@pytest.fixture(scope="module")
def hbasis(hermite_pair):
    return basis_for(hermite_pair, 0.1, 16)


def test_gram_entries(hermite_pair):
    g = gram_from_pair(hermite_pair, 0.1, 4)
    assert g.G[0][0] == 1
    assert float(g.G[1][1]) == pytest.approx(17.6, rel=1e-15)
    assert float(g.G[0][2]) == pytest.approx(5.5, rel=1e-15)
    assert all(g.G[i][j] == g.G[j][i] for i in range(5) for j in range(5))


def test_low_degree_basis(hbasis):
    assert [float(c) for c in hbasis.S[0].coeffs] == [1.0]
    assert [float(c) for c in hbasis.S[1].coeffs] == [0.0, 1.0]
    assert [float(c) for c in hbasis.S[2].coeffs] == pytest.approx([-5.5, 0.0, 1.0], rel=1e-15)
    assert float(hbasis.s[2]) == pytest.approx(7.22, abs=1e-6)


def test_gram_consistency(hbasis):
    G = hbasis.gram
    for m in range(16):
        for n in range(m + 1, 16):
            val = G.inner(hbasis.S[m], hbasis.S[n])
            assert abs(val) <= 1e-11 * math.sqrt(abs(float(hbasis.s[m] * hbasis.s[n])))


def test_first_nonpositive_pivot(hbasis):
    assert hbasis.first_nonpositive == 9
    assert hbasis.s[9] < 0


@pytest.mark.parametrize("name, lam", [("hermite_pair", 0.1), ("gegenbauer_pair", 0.5)])
def test_recursion_matches_oracle(name, lam, request):
    pair = request.getfixturevalue(name)
    ext = build_pair(pair.u, pair.eps0, pair.eps1, 18, precision="extended")
    ctx = build_context(ext, lam, 16)
    basis = basis_for(ext, lam, 16)
    eta = oracle_eta(basis, ext, 15)
    for n in range(16):
        assert abs(ctx.s[n] - basis.s[n]) <= 1e-9 * abs(basis.s[n])
        scale = basis.S[n].max_abs()
        assert all(abs(a - b) <= 1e-9 * scale for a, b in zip(ctx.S[n].coeffs, basis.S[n].coeffs))
    for k in range(14):
        assert abs(ctx.eta[k] - eta[k]) <= 1e-9 * abs(eta[k])


def test_v_moments_reproduce_r(hermite_pair):
    ext = build_pair(hermite_pair.u, 1.2, 1.3, 18, precision="extended")
    from dunkl_sobolev.classical import moments_from_recurrence
    R = hankel_basis(moments_from_recurrence(ext.tilde_gamma, 32), 15)
    for n in range(16):
        assert abs(R.s[n] - ext.r[n]) <= 1e-9 * abs(ext.r[n])


def test_closed_form_moments(hermite, gegenbauer):
    m = closed_form_moments(hermite, 4)
    assert float(m[2]) == pytest.approx(5.5, rel=1e-30)
    assert float(m[4]) == pytest.approx(35.75, rel=1e-30)
    assert float(closed_form_moments(gegenbauer, 2)[2]) == pytest.approx(0.2, rel=1e-30)


def test_direct_fourier_indicator(hermite_pair, hbasis):
    src = "+".join(f"({float(c)!r})*x^{k}" for k, c in enumerate(hbasis.S[5].coeffs))
    F = direct_fourier(hbasis, ExprFn.from_source(src, 5.0), 8)
    for n in range(9):
        assert float(F[n]) == pytest.approx(1.0 if n == 5 else 0.0, abs=1e-9)


def test_fitted_phi_matches_geronimus(gegenbauer_pair):
    kappa, t0 = fitted_phi(gegenbauer_pair)
    k2, t2 = geronimus_parameters(gegenbauer_pair)
    assert kappa == pytest.approx(float(k2), rel=1e-10)
    assert t0 == pytest.approx(float(t2), rel=1e-10)


@pytest.mark.parametrize("name, lam", [("hermite_pair", 0.1), ("gegenbauer_pair", 0.5)])
def test_compat_divergence_index(name, lam, request):
    pair = request.getfixturevalue(name)
    compat = build_pair(pair.u, pair.eps0, pair.eps1, 10, PAPER_COMPAT)
    ctx = build_context(compat, lam, 8)
    basis = orthogonalize(gram_from_pair(build_pair(pair.u, pair.eps0, pair.eps1, 10), lam, 8))
    assert divergence_index(ctx.S, ctx.s, basis) == 1
