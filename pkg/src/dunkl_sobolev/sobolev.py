"""Dunkl-Sobolev inner product <p,q>_s = <u,pq> + lambda <v, T_mu p T_mu q>.

Index bookkeeping follows the recurrences literally: ``a[k]`` and ``eta[k]``
hold a_k and eta_k, so the coefficient written eta_{n-2} in
S_{n+1} = P_{n+1} + a_{n-2} P_{n-1} - eta_{n-2} S_{n-1} is ``eta[n - 2]``;
``eta_at(-1)`` returns 0.
"""
from __future__ import annotations

from dataclasses import dataclass

from .classical import moment_integral, moments_from_recurrence
from .coherence import PAPER_COMPAT, CoherencePair, r_polys
from .errors import DefinitenessError, DegeneracyError, ParameterError
from .polycore import Polynomial, dunkl, max_coeff_diff, mu_index

S_VANISH_RTOL = 1e-14


@dataclass(frozen=True)
class SobolevContext:
    lam: object
    pair: CoherencePair
    N: int
    p: tuple
    P: tuple
    a: tuple
    eta: tuple
    s: tuple
    S: tuple
    definite_through: int

    @property
    def compat(self) -> bool:
        return self.pair.mode == PAPER_COMPAT

    @property
    def precision(self):
        return self.pair.precision

    @property
    def mu(self):
        return self.pair.mu

    def mu_n(self, n: int):
        return mu_index(n, self.mu)

    def eta_at(self, k: int):
        return 0 * self.lam if k == -1 else self.eta[k]

    def a_at(self, k: int):
        return 0 * self.lam if k == -1 else self.a[k]

    def u_moments(self, degree: int) -> list:
        return moments_from_recurrence(self.pair.u_gamma, degree)

    def v_moments(self, degree: int) -> list:
        return moments_from_recurrence(self.pair.tilde_gamma, degree)


def a_coeff(pair: CoherencePair, k: int):
    """a_k = (mu_{k+3} / mu_{k+1}) eps_k, the coefficient written a_{n-2} for k = n - 2."""
    mu = pair.mu
    return mu_index(k + 3, mu) / mu_index(k + 1, mu) * pair.eps[k]


def norms_and_eta(pair: CoherencePair, lam, N: int, strict: bool = False) -> tuple[list, list, list, int]:
    """s_0..s_N, eta_0..eta_{N-2}, a_0..a_{N-2} and the last index with s_n > 0.

    s_1 = p_1 + lambda mu_1^2 by direct evaluation; ``paper-compat`` uses
    s_1 = lambda + p_1 instead. For n >= 2,
    s_{n+1} = p_{n+1} + a_{n-2}^2 p_{n-1} + lambda mu_{n+1}^2 r_n - eta_{n-2}^2 s_{n-1}
    with eta_{n-2} = a_{n-2} p_{n-1} / s_{n-1}.
    """
    if not lam > 0:
        raise ParameterError(f"lambda={float(lam)} must be positive")
    if pair.N < N:
        raise ValueError(f"pair generated through {pair.N}, need {N}")
    mu = pair.mu
    p = _u_norms(pair, N)
    r = pair.r
    a = [a_coeff(pair, k) for k in range(max(N - 1, 0))]
    s = [p[0]]
    if N >= 1:
        s.append(lam + p[1] if pair.mode == PAPER_COMPAT else p[1] + lam * mu_index(1, mu) ** 2)
    if N >= 2:
        s.append(p[2] + 4 * lam * r[1])
    eta = []
    for m in range(3, N + 1):
        k = m - 3
        eta_k = a[k] * p[k + 1] / s[k + 1]
        eta.append(eta_k)
        s.append(p[m] + a[k] ** 2 * p[m - 2] + lam * mu_index(m, mu) ** 2 * r[m - 1] - eta_k ** 2 * s[m - 2])
    # the last eta values only need s up to N
    for k in range(len(eta), N - 1):
        eta.append(a[k] * p[k + 1] / s[k + 1])
    definite_through = N
    for n, val in enumerate(s):
        if abs(val) < S_VANISH_RTOL * max(1, abs(p[n])):
            raise DegeneracyError(f"s_{n} vanishes: the Sobolev product is singular", index=n)
        if not val > 0 and definite_through == N:
            definite_through = n - 1
    if strict and definite_through < N:
        n = definite_through + 1
        raise DefinitenessError(f"s_{n} = {float(s[n]):.6g} is not positive", index=n)
    return s, eta, a, definite_through


def _u_norms(pair: CoherencePair, N: int) -> list:
    out = [pair.u_gamma[0] * 0 + 1]
    for k in range(1, N + 1):
        out.append(out[-1] * pair.u_gamma[k])
    return out


def sobolev_polys(pair: CoherencePair, a, eta, N: int) -> list[Polynomial]:
    """S_0..S_N with S_k = P_k (k <= 2) and S_{n+1} = P_{n+1} + a_{n-2} P_{n-1} - eta_{n-2} S_{n-1}."""
    P = pair.u.monic_polys(N, pair.precision)
    S = list(P[: min(N, 2) + 1])
    for n in range(2, N):
        S.append(P[n + 1] + P[n - 1] * a[n - 2] - S[n - 1] * eta[n - 2])
    return S


def build_context(pair: CoherencePair, lam, N: int, strict: bool = False) -> SobolevContext:
    lam = pair.precision.num(lam)
    s, eta, a, definite = norms_and_eta(pair, lam, N, strict)
    S = sobolev_polys(pair, a, eta, N)
    P = pair.u.monic_polys(N, pair.precision)
    return SobolevContext(lam, pair, N, tuple(_u_norms(pair, N)), tuple(P), tuple(a), tuple(eta),
                          tuple(s), tuple(S), definite)


def sobolev_inner(ctx: SobolevContext, p: Polynomial, q: Polynomial):
    """<p, q>_s from exact moments of u and v."""
    pq = p * q
    mu = ctx.mu
    dp, dq = dunkl(p, mu), dunkl(q, mu)
    deg = max(pq.degree, 0)
    base = moment_integral(pq, ctx.u_moments(deg))
    dd = dp * dq
    if dd.is_zero():
        return base
    return base + ctx.lam * moment_integral(dd, ctx.v_moments(dd.degree))


def coherence_diagnostic(ctx: SobolevContext, n: int, perturb: dict | None = None):
    """e_n = (eta_{n-2} s_{n-1} - a_{n-2} p_{n-1}) / (lambda mu_{n-1} r_{n-2}).

    ``perturb`` maps an eta index to an additive offset, for testing that
    the diagnostic detects inconsistent coefficients.
    """
    if n < 2:
        raise ValueError("coherence_diagnostic needs n >= 2")
    eta = ctx.eta[n - 2] + (perturb or {}).get(n - 2, 0)
    num = eta * ctx.s[n - 1] - ctx.a[n - 2] * ctx.p[n - 1]
    return num / (ctx.lam * ctx.mu_n(n - 1) * ctx.pair.r[n - 2])


def coherence_diagnostic_scale(ctx: SobolevContext, n: int):
    return ctx.p[n - 1] / ctx.pair.r[n - 2]


def eta_via_Q(ctx: SobolevContext, n: int):
    """Alternative formula for eta_{n-2}, n >= 4, whose denominator equals s_{n-1}."""
    if n < 4:
        raise ValueError("eta_via_Q needs n >= 4")
    a2, a4 = ctx.a[n - 2], ctx.a[n - 4]
    p = ctx.p
    den = (p[n - 1] + a4 ** 2 * p[n - 3] + ctx.lam * ctx.mu_n(n - 1) ** 2 * ctx.pair.r[n - 2]
           - ctx.eta_at(n - 4) * a4 * p[n - 3])
    if den == 0:
        raise DefinitenessError(f"eta_via_Q denominator vanishes at n={n}", index=n)
    return a2 * p[n - 1] / den


def dunkl_image_residual(ctx: SobolevContext, n: int):
    """max coefficient of T S_{n+1} + eta_{n-2} T S_{n-1} - mu_{n+1} R_n, relative to mu_{n+1}."""
    if n < 2:
        raise ValueError("dunkl_image_residual needs n >= 2")
    mu = ctx.mu
    R = r_polys(ctx.pair, n)[n]
    lhs = dunkl(ctx.S[n + 1], mu) + dunkl(ctx.S[n - 1], mu) * ctx.eta[n - 2]
    return max_coeff_diff(lhs, R * ctx.mu_n(n + 1)) / ctx.mu_n(n + 1)
