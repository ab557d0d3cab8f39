"""Invariant suite and the published-value discrepancy report.

Every check is evaluated in default mode (the self-consistent reading); the
discrepancy report then sets default and ``paper-compat`` values next to the
published numbers and the oracle's independent counterpart.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .classical import (
    ClassicalMeasure, dunkl_lowering_check, gauss_quadrature, moment_integral,
    moments_from_recurrence, pearson_residual,
)
from .coherence import (
    DEFAULT, PAPER_COMPAT, build_pair, christoffel_split_eps, companion, eps_consistency_residuals,
    eps_direct, eps_linearized, lambda_closed_form, quasi_orthogonality, r_polys, r_polys_ttrr,
)
from .config import JobConfig
from .errors import DunklError
from .fourier import expand, partial_sum_poly, recurrence_residuals, sobolev_error
from .oracle import basis_for, direct_fourier, oracle_eta
from .polycore import max_coeff_diff
from .precision import EXTENDED
from .sobolev import (
    build_context, coherence_diagnostic, coherence_diagnostic_scale, eta_via_Q,
    dunkl_image_residual, sobolev_inner,
)

PEARSON_N = 50
LOWERING_N = 30
ADMISSIBLE_N = 100
EPS_N = 20
ORACLE_N = 15
QUAD_SIZES = (10, 20, 40)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""
    informational: bool = False


@dataclass(frozen=True)
class Discrepancy:
    """A published number set against what the code computes."""

    item: str
    printed: str
    default: float | None
    compat: float | None
    oracle: float | None
    note: str = ""


@dataclass
class VerifyReport:
    config: JobConfig
    checks: list = field(default_factory=list)
    discrepancies: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed and not c.informational]


def _rel(a, b) -> float:
    a, b = float(a), float(b)
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _poly_rel(p, q) -> float:
    return float(max_coeff_diff(p, q)) / max(float(q.max_abs()), 1e-300)


def _check(name, value, tol, detail="", informational=False) -> Check:
    value = float(value)
    return Check(name, bool(value <= tol), value, tol, detail, informational)


# ------------------------------------------------------------------ measure

def measure_checks(u: ClassicalMeasure) -> list[Check]:
    out = []
    worst = 0.0
    for m in (u, u.derived()):
        for n in range(PEARSON_N + 1):
            res, scale = pearson_residual(m, n)
            worst = max(worst, float(abs(res) / scale))
    out.append(_check("pearson_residual", worst, 1e-10, f"n <= {PEARSON_N}, u and its lowered family"))
    worst = max(float(dunkl_lowering_check(u, n)) for n in range(1, LOWERING_N + 1))
    out.append(_check("dunkl_lowering", worst, 1e-10, f"n <= {LOWERING_N}"))
    try:
        u.check_admissible(ADMISSIBLE_N)
        out.append(Check("admissibility", True, 0.0, 0.0, f"n <= {ADMISSIBLE_N}"))
    except DunklError as exc:
        out.append(Check("admissibility", False, 1.0, 0.0, str(exc)))
    out.append(_check("quadrature_exactness", quadrature_exactness(u), 1e-10,
                      f"monomials of degree <= 2n-1, n in {QUAD_SIZES}"))
    return out


def quadrature_exactness(u: ClassicalMeasure, sizes=QUAD_SIZES) -> float:
    """Worst relative error of Gauss rules on monomials against exact moments."""
    worst = 0.0
    for n in sizes:
        q = gauss_quadrature(u, n)
        m = u.moments(2 * n - 1)
        x = np.asarray(q.nodes, dtype=float)
        for k in range(0, 2 * n):
            val = float(np.sum(q.weights * x ** k))
            ref = float(m[k])
            scale = max(abs(ref), float(np.sum(q.weights * np.abs(x) ** k)))
            worst = max(worst, abs(val - ref) / scale)
    return worst


# ----------------------------------------------------------------- pair

def pair_checks(pair, pair_ext=None) -> list[Check]:
    """Coherence identities; moment-sum checks use ``pair_ext`` when given."""
    out = []
    mp = pair if pair_ext is None else pair_ext
    N = EPS_N
    g = pair.gamma
    direct = eps_direct(g, pair.eps0, pair.eps1, N)
    lin = eps_linearized(g, pair.eps0, pair.eps1, N)
    split, _, _ = christoffel_split_eps(pair, N)
    worst = max(max(_rel(a, b), _rel(a, c)) for a, b, c in zip(lin, direct, split))
    out.append(_check("dual_path_eps", worst, 1e-8, f"direct, linearized and split, n <= {N}"))
    out.append(_check("eps_consistency", max(eps_consistency_residuals(pair, N)), 1e-9, f"n <= {N}"))
    worst_q, worst_b = 0.0, 0.0
    for n in range(2, ORACLE_N + 1):
        q, bracket, expected = quasi_orthogonality(mp, n)
        worst_q = max(worst_q, q)
        worst_b = max(worst_b, _rel(bracket, expected))
    out.append(_check("quasi_orthogonality", worst_q, 1e-10, f"<w, R_n T_k>, k <= n-3, n <= {ORACLE_N}"))
    out.append(_check("quasi_orthogonality_bracket", worst_b, 1e-9, "<w, R_n T_{n-2}> = eps_{n-2} t_{n-2}"))
    R = r_polys(pair, ORACLE_N)
    Rt = r_polys_ttrr(pair, ORACLE_N)
    worst = max(_poly_rel(a, b) for a, b in zip(R, Rt))
    out.append(_check("r_consistency", worst, 1e-9, "R_n = T_n + eps_{n-2} T_{n-2} against the TTRR"))
    R = r_polys(mp, ORACLE_N)
    mv = moments_from_recurrence(mp.tilde_gamma, 2 * ORACLE_N)
    worst = 0.0
    for m in range(ORACLE_N + 1):
        for n in range(m, ORACLE_N + 1):
            val = moment_integral(R[m] * R[n], mv)
            if m == n:
                worst = max(worst, _rel(val, mp.r[n]))
            else:
                worst = max(worst, float(abs(val)) / math.sqrt(abs(float(mp.r[m] * mp.r[n]))))
    out.append(_check("r_orthogonality", worst, 1e-9, f"<v, R_m R_n> from companion moments, n <= {ORACLE_N}"))
    comp = companion(pair)
    out.append(_check("geronimus_residual", max(comp.geronimus_residuals()), 1e-9, "v = w / phi on moments"))
    out.append(_check("v_normalization", abs(float(comp.moments[0]) - 1), 1e-12))
    out.append(Check("positive_pair", pair.is_positive, float(pair.positive_through), 0.0,
                     f"gamma~_n > 0 through n = {pair.positive_through}", informational=True))
    return out


# --------------------------------------------------------------- sobolev

def sobolev_checks(ctx, ctx_ext, basis, eta_o, perturb=None) -> list[Check]:
    out = [Check("definite_product", ctx.definite_through >= ctx.N, float(ctx.definite_through), 0.0,
                 f"s_n > 0 through n = {ctx.definite_through}", informational=True)]
    n_max = min(ORACLE_N, ctx.N - 1)
    worst_S = max(_poly_rel(ctx.S[n], basis.S[n]) for n in range(n_max + 1))
    worst_s = max(_rel(ctx.s[n], basis.s[n]) for n in range(n_max + 1))
    worst_eta = max(_rel(ctx.eta[k], eta_o[k]) for k in range(min(len(eta_o), n_max - 1)))
    detail = f"n <= {n_max} against the Gram-matrix oracle"
    out.append(_check("oracle_S", worst_S, 1e-9, detail))
    out.append(_check("oracle_s", worst_s, 1e-9, detail))
    out.append(_check("oracle_eta", worst_eta, 1e-9, detail))
    worst_off, worst_diag = 0.0, 0.0
    for m in range(n_max + 1):
        for n in range(m, n_max + 1):
            val = sobolev_inner(ctx_ext, ctx_ext.S[m], ctx_ext.S[n])
            if m == n:
                worst_diag = max(worst_diag, _rel(val, ctx_ext.s[n]))
            else:
                worst_off = max(worst_off, float(abs(val)) / math.sqrt(abs(float(ctx_ext.s[m] * ctx_ext.s[n]))))
    out.append(_check("sobolev_orthogonality", max(worst_off, worst_diag), 1e-9,
                      f"<S_m, S_n>_s in extended precision, n <= {n_max}"))
    # absolute on coefficients: S_16 reaches 1e8 for the Hermite set, past double rounding
    worst = max(float(dunkl_image_residual(ctx_ext, n)) for n in range(2, n_max + 1))
    out.append(_check("dunkl_image_residual", worst, 1e-9,
                      f"T S_{{n+1}} + eta_{{n-2}} T S_{{n-1}} = mu_{{n+1}} R_n, n <= {n_max}, extended"))
    worst, where = 0.0, None
    for n in range(2, n_max + 1):
        e = abs(float(coherence_diagnostic(ctx, n, perturb)))
        e = e / float(abs(coherence_diagnostic_scale(ctx, n)))
        if e > worst:
            worst, where = e, n
    detail = f"n <= {n_max}" + (f", largest at n = {where}" if where is not None else "")
    if perturb:
        detail += f", eta perturbed {perturb}"
    out.append(_check("e_n_diagnostic", worst, 1e-9, detail))
    worst = max(_rel(eta_via_Q(ctx, n), ctx.eta[n - 2]) for n in range(4, n_max + 1))
    out.append(_check("eta_via_Q", worst, 1e-10, "alternative eta formula"))
    return out


# --------------------------------------------------------------- fourier

def fourier_checks(cfg: JobConfig, ctx, basis, pair_ext) -> list[Check]:
    f = cfg.expr()
    N = min(cfg.N, ctx.N)
    job = expand(ctx, f, N, cfg.quad_nodes)
    poly = f.polynomial()
    ref = direct_fourier(basis, f, N, pair_ext, cfg.quad_nodes)
    F = np.array([float(x) for x in job.F[: N + 1]])
    Fo = np.array([float(x) for x in ref[: N + 1]])
    err = float(np.max(np.abs(F - Fo)) / max(np.max(np.abs(Fo)), 1e-300))
    tol = 1e-8 if poly is not None else 1e-6
    label = "exact moments" if poly is not None else f"{cfg.quad_nodes}-node quadrature, {job.brackets.v_realization}"
    out = [_check("fourier_vs_oracle", err, tol, f"n <= {N}, {label}, normwise")]
    scale = max(float(abs(x)) for x in job.fcoef if x is not None)
    res = max(float(r) for r in recurrence_residuals(job)) / max(scale, 1e-300)
    out.append(_check("fourier_recurrence", res, 1e-12, "f_{n+2} + eta_{n-1} f_n = w_n"))
    if poly is not None:
        d = poly.degree
        tail = max((abs(F[n]) for n in range(d + 1, N + 1)), default=0.0)
        out.append(_check("polynomial_tail", tail, 1e-9, f"F_n = 0 for n > {d}"))
        if d <= N:
            recon = _poly_rel(partial_sum_poly(job, d), poly)
            out.append(_check("polynomial_reconstruction", recon, 1e-9, f"partial sum through {d}"))
    if poly is not None and poly.parity is not None:
        other = 1 if poly.parity == "even" else 0
        leak = max((abs(F[n]) for n in range(other, N + 1, 2)), default=0.0)
        out.append(_check("parity_filter", leak, 1e-10, f"{poly.parity} f"))
    norm = float(job.norm_sq)
    errs = [float(sobolev_error(job, n, check=False)) for n in range(N + 1)]
    rise = max((errs[n + 1] - errs[n] for n in range(N)), default=0.0)
    low = min(errs)
    worst = max(rise, -low, 0.0) / max(abs(norm), 1e-300)
    detail = f"N <= {N}, min residual {low:.3g}, largest rise {rise:.3g}"
    if ctx.definite_through < N:
        detail += f"; s_{ctx.definite_through + 1} < 0"
    out.append(_check("parseval_monotone", worst, 1e-9, detail))
    return out


# ------------------------------------------------------------ discrepancy

PRINTED = {
    "hermite": [
        ("u normalization", "0.02 (x^10 e^{-x^2} coefficient)"),
        ("s_1", "5.6"), ("s_2", "7.22"), ("eta_0", "1.39"), ("eta_1", "1.98"),
        ("v", "0.45 x^8 e^{-x^2} + delta_0"),
        ("f_0", "-5.758"), ("f_1", "287.886"), ("w_0", "-15.18"), ("w_1", "80.551"),
    ],
    "gegenbauer": [
        ("Lambda", "0.0822"),
        ("s_1", "0.7"), ("s_2", "0.219"), ("eta_0", "0.049"), ("eta_1", "0.0258"),
        ("v", "-0.953e-4 x^2 (1-x^2)^5 + (delta_1 + delta_-1)/2"),
        ("f_0", "0.0583"), ("f_1", "1.338"), ("w_0", "0.081"), ("w_1", "1.768"),
    ],
}

_PUBLISHED = {
    "hermite": dict(family="hermite", mu=5.0, lam=0.1, eps0=1.2, eps1=1.3),
    "gegenbauer": dict(family="gegenbauer", mu=1.0, alpha=5.0, lam=0.5, eps0=0.1, eps1=0.15),
}


def published_case(cfg: JobConfig) -> str | None:
    """Name of the published parameter set matching ``cfg``, if any."""
    for name, params in _PUBLISHED.items():
        if all(getattr(cfg, k) == v for k, v in params.items()):
            return name
    return None


def _fourier_values(cfg: JobConfig, mode: str) -> dict:
    ctx = replace(cfg, mode=mode, N=4).context()
    job = expand(ctx, cfg.expr(), 4, cfg.quad_nodes)
    return {"f_0": job.fcoef[0], "f_1": job.fcoef[1], "w_0": job.w[0], "w_1": job.w[1],
            "s_1": ctx.s[1], "s_2": ctx.s[2], "eta_0": ctx.eta[0], "eta_1": ctx.eta[1]}


def _oracle_values(cfg: JobConfig, basis, pair_ext, eta_o) -> dict:
    """s_n, eta_n, f_n and w_n = f_{n+2} + eta_{n-1} f_n from the oracle alone."""
    F = direct_fourier(basis, cfg.expr(), 4, pair_ext, cfg.quad_nodes)
    fc = [float(F[n]) * float(basis.s[n]) for n in range(5)]
    return {"s_1": basis.s[1], "s_2": basis.s[2], "eta_0": eta_o[0], "eta_1": eta_o[1],
            "f_0": fc[0], "f_1": fc[1], "w_0": fc[2], "w_1": fc[3] + float(eta_o[0]) * fc[1]}


def discrepancy_report(cfg: JobConfig, basis=None, pair_ext=None, eta_o=None) -> list[Discrepancy]:
    case = published_case(cfg)
    if case is None:
        return []
    cfg = replace(cfg, f=cfg.f or ("x*(10-x)" if case == "hermite" else "x*exp(-(x-0.2)^2)"))
    if basis is None:
        pair_ext = replace(cfg, mode=DEFAULT, N=ORACLE_N).pair(precision="extended")
        basis = basis_for(pair_ext, cfg.lam, 6)
        eta_o = oracle_eta(basis, pair_ext, 5)
    dflt = _fourier_values(cfg, DEFAULT)
    comp = _fourier_values(cfg, PAPER_COMPAT)
    orc = _oracle_values(cfg, basis, pair_ext, eta_o)
    pd = replace(cfg, mode=DEFAULT).pair()
    pc = replace(cfg, mode=PAPER_COMPAT).pair()
    out = []
    for item, printed in PRINTED[case]:
        if item in dflt:
            out.append(Discrepancy(item, printed, float(dflt[item]), float(comp[item]), float(orc[item]),
                                   _note(case, item, printed, dflt[item], comp[item])))
        elif item == "u normalization":
            c = 1 / math.gamma(cfg.mu + 0.5)
            out.append(Discrepancy(item, printed, c, c, c,
                                   "1/Gamma(mu+1/2) makes u a probability measure; printed value is this rounded"))
        elif item == "Lambda":
            out.append(Discrepancy(item, printed, float(pd.D), float(pc.D),
                                   float(lambda_closed_form(cfg.measure(), cfg.eps0, cfg.eps1)),
                                   "oracle column: the printed closed form evaluated as written; "
                                   "default uses the lowered gamma, compat the gamma of u"))
        elif item == "v":
            out.append(_companion_item(case, printed, pd, pc))
    return out


def _note(case, item, printed, d, c) -> str:
    p = float(printed)
    tol = 0.5 * 10 ** (-_decimals(printed))
    hits = [name for name, val in (("default", d), ("paper-compat", c)) if abs(float(val) - p) <= tol * 1.0001]
    if hits:
        return "reproduced by " + " and ".join(hits) + " to the printed digits"
    name, val = min((("default", d), ("paper-compat", c)), key=lambda t: abs(float(t[1]) - p))
    return (f"not reproduced to the printed digits; nearest is {name} "
            f"(relative gap {abs(float(val) - p) / abs(p):.2g}); default agrees with the oracle")


def _decimals(text: str) -> int:
    mant = text.split("e")[0]
    return len(mant.split(".")[1]) if "." in mant else 0


def _companion_item(case, printed, pd, pc) -> Discrepancy:
    cd, cc = companion(pd), companion(pc)
    parts = []
    for label, cm in (("default", cd), ("paper-compat", cc)):
        desc = cm.template.describe() if cm.template is not None else (
            f"no closed form: kappa={float(cm.kappa):.6g}, t0={float(cm.t0):.6g}")
        parts.append(f"{label}: {desc}")
    if case == "gegenbauer":
        parts.append("printed coefficients -4.3325e-6 * 22 = -0.953e-4 agree with each other "
                     "but t0 = 1 needs a different eps_1")
    else:
        parts.append("t0 = 0 needs eps_1 = 1; with eps_1 = 1.3 the root of phi moves off the origin")
    return Discrepancy("v", printed, float(cd.t0), float(cc.t0), None, "; ".join(parts))


# ------------------------------------------------------------------ driver

def run_verify(cfg: JobConfig, perturb_eta: dict | None = None, with_report: bool = True) -> VerifyReport:
    start = time.perf_counter()
    cfg = replace(cfg, mode=DEFAULT).validate()
    n_ctx = max(cfg.N, ORACLE_N + 1)
    u = cfg.measure()
    report = VerifyReport(cfg)
    report.checks += measure_checks(u)
    n_pair = max(n_ctx, EPS_N) + 2
    pair = build_pair(u, cfg.eps0, cfg.eps1, n_pair, DEFAULT, cfg.xi, precision=cfg.precision)
    pair_ext = build_pair(u, cfg.eps0, cfg.eps1, n_pair, DEFAULT, cfg.xi, precision=EXTENDED)
    report.checks += pair_checks(pair, pair_ext)
    ctx = build_context(pair, cfg.lam, n_ctx)
    ctx_ext = build_context(pair_ext, cfg.lam, n_ctx)
    basis = basis_for(pair_ext, cfg.lam, n_ctx)
    eta_o = oracle_eta(basis, pair_ext, n_ctx - 1)
    report.checks += sobolev_checks(ctx, ctx_ext, basis, eta_o, perturb_eta)
    if cfg.f:
        report.checks += fourier_checks(cfg, ctx, basis, pair_ext)
    if with_report:
        report.discrepancies = discrepancy_report(cfg, basis, pair_ext, eta_o)
    report.seconds = time.perf_counter() - start
    return report
