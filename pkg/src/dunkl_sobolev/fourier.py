"""Fourier Dunkl-Sobolev coefficients F_n = <f, S_n>_s / s_n by recurrence.

With w_n = <f, P_{n+2} + a_{n-1} P_n>_s the coefficients f_n = <f, S_n>_s
satisfy f_{n+2} = w_n - eta_{n-1} f_n, started from f_0 = <u, f> and
f_1 = <u, x f> + lambda mu_1 <v, T_mu f>. The even and odd chains are run
separately. For polynomial f every bracket is an exact moment sum;
otherwise u and v are realized by Gauss rules checked by doubling.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classical import Quadrature, gauss_quadrature, moment_integral
from .coherence import PAPER_COMPAT, companion, declared_template, geronimus_integral
from .errors import QuadratureAccuracyError
from .expr import ExprFn
from .polycore import Polynomial, dunkl, mu_index
from .sobolev import SobolevContext, sobolev_inner

DEFAULT_NODES = 200
DOUBLING_RTOL = 1e-9
PARSEVAL_RTOL = 1e-9


@dataclass
class Brackets:
    """U[k] = <u, P_k f> and V[k] = <v, T_mu P_k T_mu f> for k = 0..N, plus norms."""

    U: list
    V: list
    norm_u: object  # <u, f^2>
    norm_v: object  # <v, (T_mu f)^2>
    exact: bool
    nodes: int | None = None
    doubling_error: float = 0.0
    v_realization: str = "moments"
    scales: list = field(default_factory=list)


@dataclass
class FourierJob:
    ctx: SobolevContext
    f: ExprFn
    N: int
    brackets: Brackets
    w: list = field(default_factory=list)
    fcoef: list = field(default_factory=list)
    F: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.brackets.exact

    @property
    def norm_sq(self):
        """||f||_s^2 = <u, f^2> + lambda <v, (T_mu f)^2>."""
        return self.brackets.norm_u + self.ctx.lam * self.brackets.norm_v

    def membership(self) -> bool:
        """Numeric W-space membership: both norm pieces are finite."""
        return bool(np.isfinite(float(self.brackets.norm_u)) and np.isfinite(float(self.brackets.norm_v)))


def w_coeff(job: FourierJob, n: int):
    """w_n = U_{n+2} + a_{n-1} U_n + lambda (V_{n+2} + a_{n-1} V_n), a_{-1} = 0."""
    U, V = job.brackets.U, job.brackets.V
    a = job.ctx.a_at(n - 1)
    return U[n + 2] + a * U[n] + job.ctx.lam * (V[n + 2] + a * V[n])


def initial_coeffs(job: FourierJob) -> tuple:
    """(f_0, f_1) = (<u, f>, <u, x f> + lambda mu_1 <v, T_mu f>)."""
    U, V = job.brackets.U, job.brackets.V
    return U[0], U[1] + job.ctx.lam * V[1]


def _run_chain(job: FourierJob, start: int) -> list[tuple[int, object, object]]:
    ctx = job.ctx
    f0, f1 = initial_coeffs(job)
    f_prev = f0 if start == 0 else f1
    rows = [(start, None, f_prev)]
    n = start
    while n + 2 <= job.N:
        w = w_coeff(job, n)
        f_next = w - ctx.eta_at(n - 1) * f_prev
        rows.append((n + 2, w, f_next))
        f_prev = f_next
        n += 2
    return rows


def run_even(job: FourierJob) -> list:
    """Even chain: F_{2k} = f_{2k} / s_{2k} for 2k <= N."""
    rows = _run_chain(job, 0)
    for n, w, fn in rows:
        _store(job, n, w, fn)
    return [job.F[n] for n, _, _ in rows]


def run_odd(job: FourierJob) -> list:
    """Odd chain: F_{2k+1} = f_{2k+1} / s_{2k+1} for 2k + 1 <= N."""
    if job.N < 1:
        return []
    rows = _run_chain(job, 1)
    for n, w, fn in rows:
        _store(job, n, w, fn)
    return [job.F[n] for n, _, _ in rows]


def _store(job: FourierJob, n: int, w, fn):
    size = job.N + 1
    for lst in (job.w, job.fcoef, job.F):
        if len(lst) < size:
            lst.extend([None] * (size - len(lst)))
    if w is not None:
        job.w[n - 2] = w
    job.fcoef[n] = fn
    job.F[n] = fn / job.ctx.s[n]


def expand(ctx: SobolevContext, f: ExprFn, N: int, quad_nodes: int = DEFAULT_NODES,
           exact: bool | None = None, check_doubling: bool = True) -> FourierJob:
    """Build the brackets and run both chains through degree N."""
    if N > ctx.N:
        raise ValueError(f"context built through {ctx.N}, need {N}")
    poly = f.polynomial(ctx.precision)
    if exact is None:
        exact = poly is not None
    if exact:
        if poly is None:
            raise ValueError("exact brackets need a polynomial f")
        brackets = exact_brackets(ctx, poly, N)
    else:
        brackets = quadrature_brackets(ctx, f, N, quad_nodes)
        if check_doubling:
            fine = quadrature_brackets(ctx, f, N, 2 * quad_nodes)
            err = _doubling_error(brackets, fine)
            brackets.doubling_error = err
            if err > DOUBLING_RTOL:
                raise QuadratureAccuracyError(
                    f"doubling {quad_nodes} -> {2 * quad_nodes} nodes changed a bracket by {err:.3g} (relative)"
                )
    job = FourierJob(ctx, f, N, brackets)
    run_even(job)
    run_odd(job)
    return job


def exact_brackets(ctx: SobolevContext, poly: Polynomial, N: int) -> Brackets:
    mu = ctx.mu
    dpoly = dunkl(poly, mu)
    deg = N + max(poly.degree, 0)
    mu_u = ctx.u_moments(deg)
    mu_v = ctx.v_moments(max(deg, 0))
    U, V = [], []
    for k in range(N + 1):
        Pk = ctx.P[k]
        U.append(moment_integral(Pk * poly, mu_u))
        V.append(moment_integral(dunkl(Pk, mu) * dpoly, mu_v))
    norm_u = moment_integral(poly * poly, ctx.u_moments(2 * max(poly.degree, 0)))
    dd = dpoly * dpoly
    norm_v = moment_integral(dd, ctx.v_moments(max(dd.degree, 0))) if not dd.is_zero() else 0 * norm_u
    return Brackets(U, V, norm_u, norm_v, True)


def _recurrence_values(gammas, x, n: int) -> list:
    """Monic P_0..P_n at the points x via the three-term recurrence."""
    vals = [np.ones_like(x), x.copy()]
    for k in range(1, n):
        vals.append(x * vals[k] - float(gammas[k]) * vals[k - 1])
    return vals[: n + 1]


def _v_integrator(ctx: SobolevContext, n_nodes: int):
    """Return (callable g -> (<v, g>, absolute scale), description)."""
    pair = ctx.pair
    comp = companion(pair)
    template = comp.template
    label = "template" if template is not None else "geronimus"
    if pair.mode == PAPER_COMPAT:
        decl = declared_template(pair)
        if decl is not None:
            template, label = decl, "declared-template"
    if template is not None:
        dq = gauss_quadrature(template.density_measure, n_nodes, "double")

        def integrate(g):
            terms = template.density_coeff * dq.weights * np.asarray(g(dq.nodes), dtype=float)
            acc, scale = float(np.sum(terms)), float(np.sum(np.abs(terms)))
            for loc, mass in template.point_masses:
                term = mass * complex(g(np.array([loc], dtype=float))[0]).real
                acc += term
                scale += abs(term)
            return acc, scale

        return integrate, label
    wq = gauss_quadrature(pair.w, n_nodes, "double")
    kappa, t0 = float(comp.kappa), float(comp.t0)
    return (lambda g: geronimus_integral(g, wq, kappa, t0, with_scale=True)), label


def quadrature_brackets(ctx: SobolevContext, f: ExprFn, N: int, n_nodes: int) -> Brackets:
    u = ctx.pair.u
    mu = float(ctx.mu)
    uq = gauss_quadrature(u, n_nodes, "double")
    x = np.asarray(uq.nodes, dtype=float)
    fx = np.asarray(f.f(x), dtype=float)
    Pvals = _recurrence_values(ctx.pair.u_gamma, x, N)
    U = [_dot(uq.weights, P * fx) for P in Pvals]
    norm_u = _dot(uq.weights, fx * fx)
    lowered = u.derived().gammas(N + 1)
    integrate_v, label = _v_integrator(ctx, n_nodes)

    def tf(z):
        return f.dunkl_eval(np.asarray(z))

    def dunkl_p(k):
        # T_mu P_k = mu_k Ptilde_{k-1}, Ptilde the lowered family
        def g(z):
            z = np.asarray(z)
            vals = _recurrence_values(lowered, z, max(k - 1, 1))
            return mu_index(k, mu) * vals[k - 1] * tf(z)
        return g

    V = [(0.0, 0.0)] + [integrate_v(dunkl_p(k)) for k in range(1, N + 1)]
    norm_v = integrate_v(lambda z: tf(z) ** 2)
    pieces = U + V + [norm_u, norm_v]
    b = Brackets([v for v, _ in U], [v for v, _ in V], norm_u[0], norm_v[0], False, n_nodes, 0.0, label)
    b.scales = [sc for _, sc in pieces]
    return b


def _dot(weights, values) -> tuple[float, float]:
    terms = weights * values
    return float(np.sum(terms)), float(np.sum(np.abs(terms)))


def _doubling_error(coarse: Brackets, fine: Brackets) -> float:
    """Largest change of a bracket relative to its absolute-sum magnitude."""
    vals_c = list(coarse.U) + list(coarse.V) + [coarse.norm_u, coarse.norm_v]
    vals_f = list(fine.U) + list(fine.V) + [fine.norm_u, fine.norm_v]
    worst = 0.0
    for c, f, sc in zip(vals_c, vals_f, fine.scales):
        worst = max(worst, abs(c - f) / max(sc, 1e-300))
    return worst


def partial_sum_poly(job: FourierJob, N: int) -> Polynomial:
    """sum_{n <= N} F_n S_n as a polynomial."""
    acc = Polynomial()
    for n in range(N + 1):
        acc = acc + job.ctx.S[n] * job.F[n]
    return acc


def partial_sum(job: FourierJob, N: int, x):
    return partial_sum_poly(job, N)(x)


def sobolev_error(job: FourierJob, N: int, check: bool = True):
    """Parseval residual ||f||_s^2 - sum_{n <= N} F_n^2 s_n.

    A value below -1e-9 ||f||_s^2 means the brackets are under-resolved.
    That diagnosis only holds for a positive product: when v is signed
    (some gamma~_n <= 0) or some s_n <= 0, Bessel's inequality fails and
    no error is raised.
    """
    total = job.norm_sq
    err = total - sum(job.F[n] ** 2 * job.ctx.s[n] for n in range(N + 1))
    definite = job.ctx.pair.is_positive and job.ctx.definite_through >= job.ctx.N
    if check and definite and err < -PARSEVAL_RTOL * abs(total):
        raise QuadratureAccuracyError(f"negative Parseval residual {float(err):.3g} at N={N}")
    return err


def recurrence_residuals(job: FourierJob) -> list:
    """|f_{n+2} + eta_{n-1} f_n - w_n| for every stored n."""
    out = []
    for n in range(job.N - 1):
        out.append(abs(job.fcoef[n + 2] + job.ctx.eta_at(n - 1) * job.fcoef[n] - job.w[n]))
    return out
