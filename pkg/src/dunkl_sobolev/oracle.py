"""Brute-force reference: Sobolev Gram matrix in the monomial basis.

G_ij = m^u_{i+j} + lambda mu_i mu_j m^v_{i+j-2}. The u moments come from
Gamma-function closed forms and v moments from the gamma~ recurrence; the
recursion outputs eps_n, eta_n and s_n are never consumed. Orthogonalization
is a root-free LDL^T (monic Gram-Schmidt) in extended precision, which
tolerates the indefinite products that the example parameters produce.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import GEGENBAUER, HERMITE, ClassicalMeasure, moments_from_recurrence
from .coherence import CoherencePair, build_pair
from .errors import DefinitenessError, QuadratureAccuracyError
from .expr import ExprFn
from .polycore import Polynomial, dunkl, mu_index
from .precision import EXT, EXTENDED, Precision, get_precision

PIVOT_RTOL = 1e-40


def closed_form_moments(measure: ClassicalMeasure, N: int, precision: Precision = EXTENDED) -> list:
    """Moments m_0..m_N from Gamma-function integrals of the normalized weight."""
    prec = get_precision(precision)
    mu, h = prec.num(measure.mu), prec.num(0.5)
    out = []
    for k in range(N + 1):
        if k % 2:
            out.append(0 * mu)
            continue
        j = k // 2
        if measure.family == HERMITE:
            out.append(prec.gammafn(mu + j + h) / prec.gammafn(mu + h))
        else:
            a = prec.num(measure.alpha)
            out.append(prec.gammafn(mu + j + h) * prec.gammafn(a + mu + 3 * h)
                       / (prec.gammafn(mu + h) * prec.gammafn(a + mu + j + 3 * h)))
    return out


@dataclass(frozen=True)
class SobolevGram:
    G: tuple  # rows of the (N+1) x (N+1) matrix
    lam: object
    mu: object
    u_moments: tuple
    v_moments: tuple
    precision: Precision

    @property
    def size(self) -> int:
        return len(self.G)

    def inner(self, p: Polynomial, q: Polynomial):
        acc = 0 * self.lam
        for i, a in enumerate(p.coeffs):
            row = self.G[i]
            for j, b in enumerate(q.coeffs):
                acc = acc + a * row[j] * b
        return acc


def build_gram(u_moments, v_moments, lam, mu, N: int, precision: Precision = EXTENDED) -> SobolevGram:
    prec = get_precision(precision)
    lam, mu = prec.num(lam), prec.num(mu)
    mu_i = [mu_index(i, mu) for i in range(N + 1)]
    rows = []
    for i in range(N + 1):
        row = []
        for j in range(N + 1):
            g = u_moments[i + j]
            if i > 0 and j > 0:
                g = g + lam * mu_i[i] * mu_i[j] * v_moments[i + j - 2]
            row.append(g)
        rows.append(tuple(row))
    return SobolevGram(tuple(rows), lam, mu, tuple(u_moments), tuple(v_moments), prec)


def oracle_pair(u: ClassicalMeasure, eps0, eps1, N: int, mode: str = "default") -> CoherencePair:
    """An extended-precision regeneration of the pair, used only for its v moments."""
    return build_pair(u, eps0, eps1, N + 2, mode, precision=EXTENDED)


def gram_from_pair(pair: CoherencePair, lam, N: int) -> SobolevGram:
    """Gram matrix for (u, v, lambda) with u moments in closed form."""
    if not pair.precision.extended:
        pair = oracle_pair(pair.u, pair.eps0, pair.eps1, max(N, pair.N), pair.mode)
    mu_u = closed_form_moments(pair.u, 2 * N, EXTENDED)
    mu_v = moments_from_recurrence(pair.tilde_gamma, 2 * N)
    return build_gram(mu_u, mu_v, lam, pair.u.mu, N, EXTENDED)


@dataclass(frozen=True)
class OracleBasis:
    gram: SobolevGram
    S: tuple
    s: tuple
    first_nonpositive: int | None


def orthogonalize(gram: SobolevGram) -> OracleBasis:
    """Monic S_n and s_n = <S_n, S_n>_s by monic Gram-Schmidt on the Gram matrix.

    Pivots s_n may be negative (indefinite product); the first such index is
    recorded. A vanishing pivot raises :class:`DefinitenessError`.
    """
    n_tot = gram.size
    one = gram.lam * 0 + 1
    S, s = [], []
    GS = []  # G S_k as coefficient vectors (Gram applied to S_k)
    first_bad = None
    for n in range(n_tot):
        coeffs = [0 * one] * n + [one]
        # subtract projections; c_k = <x^n, S_k> / s_k = (G S_k)[n] / s_k
        for k in range(n):
            c = GS[k][n] / s[k]
            Sk = S[k].coeffs
            for i in range(len(Sk)):
                coeffs[i] = coeffs[i] - c * Sk[i]
        Sn = Polynomial(tuple(coeffs))
        gsn = [sum(gram.G[i][j] * coeffs[j] for j in range(n + 1)) for i in range(n_tot)]
        sn = sum(coeffs[i] * gsn[i] for i in range(n + 1))
        if abs(sn) < PIVOT_RTOL * max(1, abs(gram.G[n][n])):
            raise DefinitenessError(f"Gram pivot {n} vanishes", index=n)
        if not sn > 0 and first_bad is None:
            first_bad = n
        S.append(Sn)
        s.append(sn)
        GS.append(gsn)
    return OracleBasis(gram, tuple(S), tuple(s), first_bad)


def basis_for(pair: CoherencePair, lam, N: int) -> OracleBasis:
    return orthogonalize(gram_from_pair(pair, lam, N))


# ---------------------------------------------------------- direct Fourier

def _golub_welsch(moments_measure: ClassicalMeasure, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Plain Golub-Welsch rule from the full symmetric Jacobi matrix."""
    gam = np.array([float(g) for g in moments_measure.gammas(n)[1:n]])
    J = np.diag(np.sqrt(gam), 1) + np.diag(np.sqrt(gam), -1)
    vals, vecs = np.linalg.eigh(J)
    return vals, vecs[0, :] ** 2


def _ext_eval(poly: Polynomial, xs: list) -> np.ndarray:
    return np.array([float(poly(x)) for x in xs])


def direct_fourier(basis: OracleBasis, f: ExprFn, N: int, pair: CoherencePair | None = None,
                   n_nodes: int = 200, check_doubling: bool = True) -> list:
    """F_n = <f, S_n>_s / s_n for n = 0..N by direct inner products.

    Polynomial f uses the Gram matrix; otherwise u is integrated by a plain
    Golub-Welsch rule and v through phi = kappa (x^2 - t0), with kappa and t0
    fitted from the raw moments of v and of the lowered measure w.
    """
    poly = f.polynomial(EXTENDED)
    if poly is not None:
        if poly.degree >= basis.gram.size:
            raise ValueError("Gram matrix too small for this polynomial")
        return [basis.gram.inner(poly, basis.S[n]) / basis.s[n] for n in range(N + 1)]
    if pair is None:
        raise ValueError("a transcendental f needs the pair for its measures")
    coarse = _quad_brackets(basis, f, N, pair, n_nodes)
    if check_doubling:
        fine = _quad_brackets(basis, f, N, pair, 2 * n_nodes)
        for (c, sc), (fv, _) in zip(coarse, fine):
            if abs(c - fv) > 1e-9 * max(sc, 1e-300):
                raise QuadratureAccuracyError("oracle quadrature failed the doubling check")
        coarse = fine
    return [val / float(basis.s[n]) for n, (val, _) in enumerate(coarse)]


def fitted_phi(pair: CoherencePair) -> tuple[float, float]:
    """(kappa, t0) from m^w_0 = kappa (m^v_2 - t0) and m^w_2 = kappa (m^v_4 - t0 m^v_2)."""
    mv = moments_from_recurrence(pair.tilde_gamma, 4)
    mw = closed_form_moments(pair.w, 2, EXTENDED)
    # eliminate kappa: mw2 (mv2 - t0) = mw0 (mv4 - t0 mv2)
    t0 = (mw[2] * mv[2] - mw[0] * mv[4]) / (mw[2] - mw[0] * mv[2])
    kappa = mw[0] / (mv[2] - t0)
    return float(kappa), float(t0)


def _quad_brackets(basis: OracleBasis, f: ExprFn, N: int, pair: CoherencePair, n_nodes: int):
    mu = basis.gram.mu
    xu, wu = _golub_welsch(pair.u, n_nodes)
    xw, ww = _golub_welsch(pair.w, n_nodes)
    kappa, t0 = fitted_phi(pair)
    xs_u = [EXT.mpf(float(x)) for x in xu]
    fu = np.asarray(f.f(xu), dtype=float)
    # v part: <v, g> = <w, (E(x^2) - E(t0)) / phi> + E(t0), E the even part of g
    root = np.sqrt(complex(t0))
    pts = np.concatenate([xw, -xw])
    tf_w = np.asarray(f.dunkl_eval(pts), dtype=float)
    tf_root = np.asarray(f.dunkl_eval(np.array([root, -root])), dtype=complex)
    xs_w = [EXT.mpf(float(x)) for x in pts]
    out = []
    lam = float(basis.gram.lam)
    for n in range(N + 1):
        Sn = basis.S[n]
        su = _ext_eval(Sn, xs_u)
        termu = wu * su * fu
        dS = dunkl(Sn, mu)
        if dS.is_zero():
            val_v, sc_v = 0.0, 0.0
        else:
            g = _ext_eval(dS, xs_w) * tf_w
            even = (g[:n_nodes] + g[n_nodes:]) / 2
            g_root = np.array([complex(dS(EXT.mpc(root))), complex(dS(EXT.mpc(-root)))]) * tf_root
            e0 = float(((g_root[0] + g_root[1]) / 2).real)
            termv = ww * (even - e0) / (kappa * (xw * xw - t0))
            val_v, sc_v = float(np.sum(termv)) + e0, float(np.sum(np.abs(termv))) + abs(e0)
        val = float(np.sum(termu)) + lam * val_v
        out.append((val, float(np.sum(np.abs(termu))) + lam * sc_v))
    return out


def divergence_index(compat_S, compat_s, basis: OracleBasis, rtol: float = 1e-9) -> int | None:
    """First n where a recursion result departs from the true orthogonal basis."""
    for n in range(min(len(compat_s), len(basis.s))):
        ref = basis.s[n]
        if abs(compat_s[n] - ref) > rtol * abs(ref):
            return n
        P, Q = compat_S[n], basis.S[n]
        scale = max(1, float(Q.max_abs()))
        if any(abs(P[k] - Q[k]) > rtol * scale for k in range(n + 1)):
            return n
    return None


def hankel_basis(moments, N: int, lam=0) -> OracleBasis:
    """Monic orthogonal polynomials of a symmetric moment functional."""
    rows = tuple(tuple(moments[i + j] for j in range(N + 1)) for i in range(N + 1))
    gram = SobolevGram(rows, moments[0] * 0 + lam, 0, tuple(moments), (), EXTENDED)
    return orthogonalize(gram)


def oracle_eta(basis: OracleBasis, pair: CoherencePair, N: int) -> list:
    """eta_0..eta_{N-2} identified from the oracle S_n alone.

    P_n and R_n are rebuilt from raw u and v moments; a_{n-2} follows from
    T(P_{n+1} + a_{n-2} P_{n-1}) = mu_{n+1} R_n and eta_{n-2} from the
    x^{n-1} coefficient of S_{n+1} = P_{n+1} + a_{n-2} P_{n-1} - eta_{n-2} S_{n-1}.
    """
    mu = basis.gram.mu
    P = hankel_basis(closed_form_moments(pair.u, 2 * N + 2, EXTENDED), N + 1).S
    if not pair.precision.extended:
        pair = oracle_pair(pair.u, pair.eps0, pair.eps1, max(N, pair.N), pair.mode)
    R = hankel_basis(moments_from_recurrence(pair.tilde_gamma, 2 * N + 2), N + 1).S
    out = []
    for n in range(2, N + 1):
        if n + 1 >= len(basis.S):
            break
        TP = dunkl(P[n + 1], mu)
        a = (mu_index(n + 1, mu) * R[n][n - 2] - TP[n - 2]) / mu_index(n - 1, mu)
        out.append(P[n + 1][n - 1] + a - basis.S[n + 1][n - 1])
    return out
