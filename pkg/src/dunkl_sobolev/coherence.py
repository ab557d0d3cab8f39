"""Symmetric Dunkl-coherent pairs (u, v).

Case A (u classical): the MOPS {R_n} of v is R_n = T_n + eps_{n-2} T_{n-2},
where {T_n} is the lowered family T_mu P_{n+1} / mu_{n+1}. The parameters
eps_n obey a quadratic difference equation, solved here through its
linearization into two three-term recurrences. The companion measure v is
recovered as a Geronimus transform of the measure w of {T_n}: w = phi v with
phi(x) = kappa (x^2 - t0).

Case B (v classical) is handled at the level of sequences and moments: u is a
quadratic Christoffel transform (x^2 - b) vhat of a classical measure vhat.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .classical import (
    GEGENBAUER,
    HERMITE,
    ClassicalMeasure,
    moment_integral,
    moments_from_recurrence,
    monic_from_gammas,
    norms_from_gammas,
)
from .errors import (
    DegeneracyError,
    MomentMismatchError,
    ParameterError,
    PositivityError,
    SplitDegeneracyError,
    UnsupportedTemplateError,
)
from .polycore import Polynomial, max_coeff_diff, quadratic_split
from .precision import DOUBLE, Precision, get_precision

DEFAULT = "default"
PAPER_COMPAT = "paper-compat"
MODES = (DEFAULT, PAPER_COMPAT)

DEGENERACY_RTOL = 1e-14
TEMPLATE_TOL = 1e-10


def _vanishes(value, previous) -> bool:
    return abs(value) < DEGENERACY_RTOL * max(1, abs(previous))


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ParameterError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


def recursion_measure(u: ClassicalMeasure, mode: str = DEFAULT) -> ClassicalMeasure:
    """Measure whose recurrence coefficients drive the eps recursions.

    Structurally this is the measure w of the lowered family (the same
    Hermite measure, or Gegenbauer with alpha + 1). ``paper-compat`` uses u
    itself, matching the printed Gegenbauer example.
    """
    return u if _check_mode(mode) == PAPER_COMPAT else u.derived()


@dataclass(frozen=True)
class CoherencePair:
    """A Case A coherent pair with its generated sequences.

    All sequences are stored 0-based: ``eps[k]`` is eps_k, ``gamma[k]`` is
    gamma_k of the recursion measure (``gamma[0] = 1``), ``tilde_gamma[k]``
    is the recurrence coefficient of {R_n} (``tilde_gamma[0] = 1``) and
    ``r[k] = tilde_gamma[1] * ... * tilde_gamma[k]``.
    """

    u: ClassicalMeasure
    eps0: float
    eps1: float
    N: int
    mode: str
    xi: float | None
    precision: Precision
    gamma: tuple
    u_gamma: tuple
    eps: tuple
    tilde_gamma: tuple
    r: tuple
    D: object
    Lambda: object | None
    positive_through: int
    case: str = "A"

    @property
    def w(self) -> ClassicalMeasure:
        return recursion_measure(self.u, self.mode)

    @property
    def mu(self):
        return self.precision.num(self.u.mu)

    def eps_at(self, k: int):
        """eps_k with the convention eps_{-1} = 0."""
        if k == -1:
            return 0 * self.eps[0]
        return self.eps[k]

    @property
    def is_positive(self) -> bool:
        return self.positive_through >= self.N


def build_pair(
    u: ClassicalMeasure,
    eps0,
    eps1,
    N: int = 20,
    mode: str = DEFAULT,
    xi=None,
    precision: Precision | str | None = None,
    strict: bool = False,
) -> CoherencePair:
    """Generate eps_0..eps_N, gamma~_1..gamma~_N and r_0..r_N.

    Nonpositive gamma~_n means v is not a positive measure; by default this
    is only recorded in ``positive_through``, with ``strict=True`` it raises
    :class:`PositivityError`.
    """
    _check_mode(mode)
    if N < 2:
        raise ValueError("N must be at least 2")
    prec = get_precision(precision)
    w = recursion_measure(u, mode)
    gamma = tuple(w.gammas(N + 2, prec))
    u_gamma = tuple(u.gammas(N + 2, prec))
    e0, e1 = prec.num(eps0), prec.num(eps1)
    eps = tuple(eps_linearized(gamma, e0, e1, N))
    tg, r = tilde_gamma_seq(gamma, eps, N)
    positive_through = N
    for n in range(1, N + 1):
        if not tg[n] > 0:
            positive_through = n - 1
            break
    if strict and positive_through < N:
        n = positive_through + 1
        raise PositivityError(f"gamma~_{n} = {float(tg[n]):.6g} is not positive", index=n)
    lam = lambda_closed_form(u, e0, e1, prec) if u.family == GEGENBAUER else None
    return CoherencePair(
        u=u, eps0=eps0, eps1=eps1, N=N, mode=mode, xi=xi, precision=prec,
        gamma=gamma, u_gamma=u_gamma, eps=eps, tilde_gamma=tg, r=tuple(r),
        D=difference_constant(gamma, e0, e1), Lambda=lam,
        positive_through=positive_through,
    )


def difference_constant(gamma: Sequence, eps0, eps1):
    """D = (eps_1 - gamma_2)(1 - gamma_1 / eps_0)."""
    if _vanishes(eps0, 1):
        raise DegeneracyError("eps_0 vanishes", index=0)
    return (eps1 - gamma[2]) * (1 - gamma[1] / eps0)


def lambda_closed_form(u: ClassicalMeasure, eps0, eps1, precision=DOUBLE):
    """Published closed form of the Gegenbauer difference constant, evaluated as written."""
    prec = get_precision(precision)
    a, mu = prec.num(u.alpha), prec.num(u.mu)
    h = prec.num(0.5)
    mu1 = 1 + 2 * mu
    first = eps1 - (1 + a) / ((3 * h + a + mu) * (5 * h + a + mu))
    second = 1 - mu1 * (1 + 2 * a + 2 * mu) / (4 * eps0 * (h + a + mu) * (3 * h + a + mu))
    return first * second


def eps_direct(gamma: Sequence, eps0, eps1, N: int) -> list:
    """eps_0..eps_N from eps_{n+1} + gamma_n gamma_{n+1}/eps_{n-1} = gamma_{n+1} + gamma_{n+2} + D."""
    D = difference_constant(gamma, eps0, eps1)
    eps = [eps0, eps1]
    if _vanishes(eps1, eps0):
        raise DegeneracyError("eps_1 vanishes", index=1)
    for n in range(1, N):
        nxt = gamma[n + 1] + gamma[n + 2] + D - gamma[n] * gamma[n + 1] / eps[n - 1]
        if _vanishes(nxt, eps[n]):
            raise DegeneracyError(f"eps_{n + 1} vanishes", index=n + 1)
        eps.append(nxt)
    return eps[: N + 1]


def eps_linearized(gamma: Sequence, eps0, eps1, N: int) -> list:
    """eps_0..eps_N through the two linear recurrences rho (odd) and tau (even).

    rho_{m+1} = (gamma_{2m+1} + gamma_{2m+2} + D) rho_m - gamma_{2m} gamma_{2m+1} rho_{m-1}
    tau_{m+1} = (gamma_{2m} + gamma_{2m+1} + D) tau_m - gamma_{2m-1} gamma_{2m} tau_{m-1}
    with eps_{2m+1} = rho_{m+1}/rho_m and eps_{2m} = tau_{m+1}/tau_m. Each
    pair is rescaled after every step so the ratios never overflow.
    """
    D = difference_constant(gamma, eps0, eps1)
    if _vanishes(eps1, eps0):
        raise DegeneracyError("eps_1 vanishes", index=1)
    eps = [None] * (N + 1)
    eps[0], eps[1] = eps0, eps1
    one = eps0 * 0 + 1
    # odd chain
    r_prev, r_cur = one, eps1
    m = 1
    while 2 * m + 1 <= N:
        r_next = (gamma[2 * m + 1] + gamma[2 * m + 2] + D) * r_cur - gamma[2 * m] * gamma[2 * m + 1] * r_prev
        eps[2 * m + 1] = r_next / r_cur
        if _vanishes(eps[2 * m + 1], eps[2 * m - 1]):
            raise DegeneracyError(f"eps_{2 * m + 1} vanishes", index=2 * m + 1)
        scale = abs(r_next)
        r_prev, r_cur = r_cur / scale, r_next / scale
        m += 1
    # even chain
    t_prev, t_cur = one, eps0
    m = 1
    while 2 * m <= N:
        t_next = (gamma[2 * m] + gamma[2 * m + 1] + D) * t_cur - gamma[2 * m - 1] * gamma[2 * m] * t_prev
        eps[2 * m] = t_next / t_cur
        if _vanishes(eps[2 * m], eps[2 * m - 2]):
            raise DegeneracyError(f"eps_{2 * m} vanishes", index=2 * m)
        scale = abs(t_next)
        t_prev, t_cur = t_cur / scale, t_next / scale
        m += 1
    return eps


def eps_first_order(gamma: Sequence, eps0, eps1, N: int) -> list:
    """eps via eps_{n+1} = gamma_{n+2} + eps_n - eps_n gamma_n / eps_{n-1} (n >= 1)."""
    eps = [eps0, eps1]
    for n in range(1, N):
        eps.append(gamma[n + 2] + eps[n] - eps[n] * gamma[n] / eps[n - 1])
    return eps[: N + 1]


def tilde_gamma_seq(gamma: Sequence, eps: Sequence, N: int) -> tuple[tuple, list]:
    """gamma~_n = gamma_n + eps_{n-2} - eps_{n-1} (eps_{-1} = 0) and r_n."""
    zero = eps[0] * 0
    tg = [zero + 1]
    for n in range(1, N + 1):
        e2 = eps[n - 2] if n >= 2 else zero
        tg.append(gamma[n] + e2 - eps[n - 1])
    return tuple(tg), norms_from_gammas(tg)


def christoffel_split_eps(pair: CoherencePair, N: int | None = None) -> tuple[list, list, list]:
    """Rebuild the even-index eps from the odd ones via the quadratic split.

    With T_{2n}(x) = A_n(x^2) and a_n = -A_{n+1}(0)/A_n(0),
    eps_{2n} = a_n + eps_{2n-1}(1 - a_{n-1}/eps_{2n-2}) and
    b_n = eps_{2n-1} a_{n-1} / eps_{2n-2}. Returns ``(eps, a, b)``.
    """
    N = pair.N if N is None else N
    T = monic_from_gammas(pair.gamma, N + 2)
    A = [quadratic_split(T[2 * n])[0] for n in range((N + 2) // 2 + 1) if 2 * n <= N + 2]
    a = []
    for n in range(len(A) - 1):
        a0 = A[n](0 * pair.eps[0])
        if a0 == 0:
            raise SplitDegeneracyError(f"A_{n}(0) vanishes", index=n)
        a.append(-A[n + 1](0 * a0) / a0)
    eps = [pair.eps[0]] + [None] * N
    b = [None]
    for k in range(1, N + 1, 2):
        eps[k] = pair.eps[k]
    for n in range(1, N // 2 + 1):
        eps[2 * n] = a[n] + eps[2 * n - 1] * (1 - a[n - 1] / eps[2 * n - 2])
        b.append(eps[2 * n - 1] * a[n - 1] / eps[2 * n - 2])
    return eps, a, b


# ------------------------------------------------------------ diagnostics

def eps_consistency_residuals(pair: CoherencePair, N: int | None = None) -> list:
    """Relative residuals of eps_n gamma_n = eps_{n-1} gamma~_{n+2}, n = 1..N."""
    N = pair.N - 2 if N is None else N
    out = []
    for n in range(1, N + 1):
        lhs = pair.eps[n] * pair.gamma[n]
        rhs = pair.eps[n - 1] * pair.tilde_gamma[n + 2]
        out.append(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return out


def r_polys(pair: CoherencePair, N: int) -> list[Polynomial]:
    """R_n = T_n + eps_{n-2} T_{n-2}, n = 0..N."""
    T = monic_from_gammas(pair.gamma, N)
    return [T[n] + (T[n - 2] * pair.eps[n - 2] if n >= 2 else 0 * pair.eps[0]) for n in range(N + 1)]


def r_polys_ttrr(pair: CoherencePair, N: int) -> list[Polynomial]:
    return monic_from_gammas(pair.tilde_gamma, N)


def quasi_orthogonality(pair: CoherencePair, n: int) -> tuple[float, object, object]:
    """For R_n against the lowered MOPS {T_k} in w.

    Returns ``(max_k<=n-3 |<w, R_n T_k>| / scale, <w, R_n T_{n-2}>, eps_{n-2} t_{n-2})``.
    """
    T = monic_from_gammas(pair.gamma, n)
    R = r_polys(pair, n)[n]
    m = moments_from_recurrence(pair.gamma, 2 * n)
    t = norms_from_gammas(pair.gamma[: n + 1])
    scale = max(1, abs(pair.eps[n - 2] * t[n - 2])) if n >= 2 else 1
    worst = 0.0
    for k in range(0, n - 2):
        worst = max(worst, float(abs(moment_integral(R * T[k], m))) / float(scale))
    bracket = moment_integral(R * T[n - 2], m) if n >= 2 else None
    expected = pair.eps[n - 2] * t[n - 2] if n >= 2 else None
    return worst, bracket, expected


# ---------------------------------------------------------- companion

@dataclass(frozen=True)
class TemplateForm:
    """Explicit density-plus-masses description of v.

    ``v = density_coeff * density_measure + sum(mass * delta_loc)``, where
    ``density_measure`` is a normalized classical measure. ``monomial_coeff``
    is the resulting constant in front of the bare weight
    (x^{2mu'} e^{-x^2} or x^{2mu}(1-x^2)^{alpha'}).
    """

    kind: str
    density_coeff: float
    density_measure: ClassicalMeasure
    point_masses: tuple
    monomial_coeff: float
    t0: float

    @property
    def signed(self) -> bool:
        return self.density_coeff < 0

    def describe(self) -> str:
        m = self.density_measure
        if m.family == HERMITE:
            weight = f"|x|^{2 * m.mu:g} exp(-x^2)"
        else:
            weight = f"|x|^{2 * m.mu:g} (1-x^2)^{m.alpha:g}"
        masses = " + ".join(f"{mass:.6g}*delta({loc:g})" for loc, mass in self.point_masses)
        return f"{self.monomial_coeff:.6g}*{weight} + {masses}"


@dataclass(frozen=True)
class CompanionMeasure:
    """The companion v of a Case A pair.

    ``moments`` come from the gamma~ recurrence. The Geronimus data
    (``kappa``, ``t0``) realize <v, g> for non-polynomial g; ``template`` is
    set when v has one of the two explicit closed forms.
    """

    pair: CoherencePair
    kappa: object
    t0: object
    moments: tuple
    template: TemplateForm | None
    declared_t0: float | None
    notes: tuple = field(default=())

    @property
    def base(self) -> ClassicalMeasure:
        return self.pair.w

    def geronimus_residuals(self, K: int | None = None) -> list:
        """Relative residuals of m^v_{2k+2} = t0 m^v_{2k} + m^w_{2k}/kappa."""
        mv = self.moments
        K = (len(mv) - 3) // 2 if K is None else K
        mw = self.base.moments(2 * K, self.pair.precision)
        out = []
        for k in range(K + 1):
            lhs = mv[2 * k + 2]
            rhs = self.t0 * mv[2 * k] + mw[2 * k] / self.kappa
            out.append(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
        return out

    def integrate(self, g: Callable, quad_w, even_part: Callable | None = None):
        """<v, g> for a function ``g`` evaluable on real and complex arrays.

        Uses <v, g> = <w, (E(x^2) - E(t0)) / phi> + E(t0), with E the even
        part of g written in x^2 and ``quad_w`` a quadrature for w.
        """
        return geronimus_integral(g, quad_w, self.kappa, self.t0)


def even_part_at(g: Callable, t):
    """E(t) where E(x^2) = (g(x) + g(-x))/2, for real t of either sign."""
    t = complex(t)
    s = np.sqrt(np.asarray([t], dtype=complex))
    val = (g(s) + g(-s))[0] / 2
    return val.real


def geronimus_integral(g: Callable, quad_w, kappa, t0, with_scale: bool = False):
    """<v, g> for v = w / (kappa (x^2 - t0)) with unit mass.

    The quotient (E(x^2) - E(t0)) / (x^2 - t0) is smooth; nodes that fall
    within a relative 1e-7 of the root use a central difference instead.
    """
    kappa, t0 = float(kappa), float(t0)
    x = np.asarray(quad_w.nodes, dtype=float)
    gx = np.asarray(g(x))
    gm = np.asarray(g(-x))
    even = (gx + gm) / 2
    e0 = even_part_at(g, t0)
    d = x * x - t0
    near = np.abs(d) < 1e-7 * max(1.0, abs(t0))
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = (even - e0) / d
    if np.any(near):
        h = 1e-4 * max(1.0, abs(t0))
        slope = (even_part_at(g, t0 + h) - even_part_at(g, t0 - h)) / (2 * h)
        quotient = np.where(near, slope, quotient)
    terms = quad_w.weights * quotient / kappa
    value = float(np.sum(terms)) + e0
    if with_scale:
        return value, float(np.sum(np.abs(terms))) + abs(e0)
    return value


def declared_t0(u: ClassicalMeasure, xi) -> float | None:
    """Root of phi implied by a declared companion parameter xi.

    Hermite uses x^2 + xi^2 (root -xi^2), Gegenbauer x^2 - xi^2 (root xi^2).
    """
    if xi is None:
        return None
    return 0.0 - xi * xi if u.family == HERMITE else xi * xi


def eps1_from_xi(u: ClassicalMeasure, eps0, xi, mode: str = DEFAULT, precision=DOUBLE):
    """The eps_1 that puts the root of phi at the declared location."""
    prec = get_precision(precision)
    g = recursion_measure(u, mode).gammas(2, prec)
    t0 = prec.num(declared_t0(u, xi))
    e0 = prec.num(eps0)
    tg1 = g[1] - e0
    return g[2] + e0 * t0 / tg1


def geronimus_parameters(pair: CoherencePair) -> tuple:
    """(kappa, t0) with phi = 1 + (eps_0/r_2)(x^2 - gamma~_1) = kappa (x^2 - t0)."""
    r2 = pair.r[2]
    kappa = pair.eps[0] / r2
    t0 = pair.tilde_gamma[1] - r2 / pair.eps[0]
    return kappa, t0


def _template(pair: CoherencePair, kappa, t0) -> TemplateForm | None:
    w = pair.w
    prec = pair.precision
    inv = 1 / kappa
    if w.family == HERMITE and abs(t0) <= TEMPLATE_TOL:
        # v = (1/kappa) x^{-2} w + m delta_0 and x^{-2} H(mu) = H(mu - 1) / (mu - 1/2)
        if not w.mu > 0.5:
            return None
        coeff = inv / (prec.num(w.mu) - prec.num(0.5))
        dens = ClassicalMeasure(HERMITE, w.mu - 1)
        mono = coeff / prec.gammafn(prec.num(w.mu) - prec.num(0.5))
        return TemplateForm("hermite-origin", float(coeff), dens, ((0.0, float(1 - coeff)),),
                            float(mono), float(t0))
    if w.family == GEGENBAUER and abs(t0 - 1) <= TEMPLATE_TOL:
        # v = -(1/kappa) w / (1 - x^2) + (M/2)(delta_1 + delta_-1)
        beta = prec.num(w.alpha)
        mu = prec.num(w.mu)
        if not beta > 0:
            return None
        coeff = -inv * (beta + mu + prec.num(0.5)) / beta
        dens = ClassicalMeasure(GEGENBAUER, w.mu, w.alpha - 1)
        norm = prec.gammafn(beta + mu + prec.num(0.5)) / (prec.gammafn(beta) * prec.gammafn(mu + prec.num(0.5)))
        half = float(1 - coeff) / 2
        return TemplateForm("gegenbauer-endpoints", float(coeff), dens, ((-1.0, half), (1.0, half)),
                            float(coeff * norm), float(t0))
    return None


def companion(pair: CoherencePair, require_template: bool = False) -> CompanionMeasure:
    """Moment functional and Geronimus data of v; template when available."""
    kappa, t0 = geronimus_parameters(pair)
    moments = tuple(moments_from_recurrence(pair.tilde_gamma, 2 * pair.N))
    notes = []
    dt0 = declared_t0(pair.u, pair.xi)
    if dt0 is not None and abs(float(t0) - dt0) > TEMPLATE_TOL * max(1, abs(dt0)):
        notes.append(
            f"declared xi={pair.xi:g} places the root of phi at {dt0:g}, "
            f"but eps_0, eps_1 imply t0={float(t0):.10g}"
        )
    template = _template(pair, kappa, t0)
    if template is None and require_template:
        raise UnsupportedTemplateError(
            f"no closed form for t0={float(t0):.6g} in {pair.w.label()}; moments are still available"
        )
    if template is not None and template.signed:
        notes.append("template density coefficient is negative: v is a signed measure")
    return CompanionMeasure(pair, kappa, t0, moments, template, dt0, tuple(notes))


def declared_template(pair: CoherencePair) -> TemplateForm | None:
    """Closed form obtained by forcing the root of phi to the declared xi.

    Only meaningful when eps_1 is inconsistent with xi; the resulting v does
    not reproduce the gamma~ moments.
    """
    dt0 = declared_t0(pair.u, pair.xi)
    if dt0 is None:
        return None
    kappa, _ = geronimus_parameters(pair)
    return _template(pair, kappa, pair.precision.num(dt0))


# ---------------------------------------------------------------- Case B

@dataclass(frozen=True)
class CaseBResult:
    """tau_1..tau_N for a pair with v classical, and the measure u = (x^2 - b) vhat."""

    v: ClassicalMeasure
    vhat: ClassicalMeasure
    b: float
    tau: tuple  # tau[0] unused, tau[n] = tau_n
    tau_identified: tuple
    u_gamma: tuple
    hat_a: tuple
    hat_b: tuple
    system_residual: float
    shift_residual: float
    moment_residual: float


def case_b_vhat(v: ClassicalMeasure) -> ClassicalMeasure:
    """vhat with T_mu Q_{n+1} / mu_{n+1} = R_n: v itself (Hermite) or alpha - 1."""
    if v.family == HERMITE:
        return v
    return ClassicalMeasure(GEGENBAUER, v.mu, v.alpha - 1)


def tau1_from_b(v: ClassicalMeasure, b, precision=DOUBLE):
    prec = get_precision(precision)
    m = case_b_vhat(v).moments(4, prec)
    return m[2] - (m[4] - b * m[2]) / (m[2] - b)


def b_from_tau1(v: ClassicalMeasure, tau1, precision=DOUBLE):
    prec = get_precision(precision)
    m = case_b_vhat(v).moments(4, prec)
    c = m[2] - tau1
    return (m[4] - c * m[2]) / tau1


def _divide_t(p: Polynomial, b) -> tuple[Polynomial, object]:
    """Synthetic division of p(t) by (t - b): quotient and remainder."""
    coeffs = list(p.coeffs)
    q = [0 * b] * (len(coeffs) - 1)
    acc = 0 * b
    for k in range(len(coeffs) - 1, 0, -1):
        acc = acc * b + coeffs[k]
        q[k - 1] = acc
    rem = acc * b + coeffs[0]
    return Polynomial(tuple(q)), rem


def _split(p: Polynomial) -> tuple[Polynomial, bool]:
    even, odd = quadratic_split(p)
    return (even, False) if even is not None else (odd, True)


def case_b_tau(v: ClassicalMeasure, tau1, N: int, precision=DOUBLE, tol: float = 1e-9) -> CaseBResult:
    """Solve the Case B system for tau_2..tau_N given tau_1.

    The monic P_n of u = (x^2 - b) vhat come from the Christoffel formula
    P_n = (Q_{n+2} - c_n Q_n) / (x^2 - b). With hat_a_n = -A_{n+1}(0)/A_n(0)
    and hat_b_n = -C_{n+1}(0)/C_n(0) (A, C the even splits of P and Q)
    the coupled system gives tau_{2n} = hat_b_n tau_{2n-1} / hat_a_{n-1} and
    tau_{2n+1} = tau_{2n} + hat_b_n - hat_a_n. Every tau_n is also obtained
    by direct coefficient identification in Q_{n+1} = P_{n+1} - tau_n P_{n-1}.
    """
    prec = get_precision(precision)
    vhat = case_b_vhat(v)
    t1 = prec.num(tau1)
    if _vanishes(t1, 1):
        raise DegeneracyError("tau_1 vanishes", index=1)
    b = b_from_tau1(v, t1, prec)
    Q = vhat.monic_polys(N + 4, prec)
    P = []
    for n in range(N + 3):
        qa, odd = _split(Q[n + 2])
        qb, _ = _split(Q[n])
        qbb = qb(b)
        if _vanishes(qbb, 1):
            raise SplitDegeneracyError(f"Q_{n} vanishes at x^2 = b", index=n)
        quotient, rem = _divide_t(qa - qb * (qa(b) / qbb), b)
        Pn = Polynomial(_interleave(quotient.coeffs, odd))
        P.append(Pn)
    # u recurrence and moment check
    u_gamma = [prec.num(1)]
    for n in range(1, N + 1):
        # P_{n+1} = x P_n - gamma_n P_{n-1}: compare degree n-1 coefficients
        u_gamma.append((P[n].times_x() - P[n + 1])[n - 1] / P[n - 1][n - 1])
    mhat = vhat.moments(2 * N + 2, prec)
    norm = mhat[2] - b
    expected = [(mhat[k + 2] - b * mhat[k]) / norm for k in range(0, 2 * N - 1)]
    mu_u = moments_from_recurrence(u_gamma, 2 * N - 2)
    moment_res = max(
        float(abs(mu_u[k] - expected[k]) / max(abs(expected[k]), 1e-300)) for k in range(0, 2 * N - 1, 2)
    )
    if moment_res > tol:
        raise MomentMismatchError(f"u moments disagree with (x^2 - b) vhat by {moment_res:.3g}")
    # coefficient identification
    ident = [None]
    shift = 0.0
    for n in range(1, N + 1):
        diff = P[n + 1] - Q[n + 1]  # = tau_n P_{n-1} + shift constant
        tau_n = diff[n - 1] / P[n - 1][n - 1]
        rest = diff - P[n - 1] * tau_n
        shift = max(shift, float(rest.max_abs()) / max(1.0, float(abs(tau_n))))
        ident.append(tau_n)
    # coupled system
    A = [_split(P[2 * k])[0] for k in range(N // 2 + 2) if 2 * k < len(P)]
    C = [_split(Q[2 * k])[0] for k in range(N // 2 + 2)]
    hat_a, hat_b = [], []
    z = 0 * b
    for k in range(min(len(A), len(C)) - 1):
        if _vanishes(A[k](z), 1) or _vanishes(C[k](z), 1):
            raise SplitDegeneracyError(f"split polynomial {k} vanishes at 0", index=k)
        hat_a.append(-A[k + 1](z) / A[k](z))
        hat_b.append(-C[k + 1](z) / C[k](z))
    tau = [None, t1]
    n = 1
    while len(tau) <= N:
        if n >= len(hat_a):
            break
        if _vanishes(hat_a[n - 1], 1):
            raise DegeneracyError(f"hat_a_{n - 1} vanishes, forcing tau_{2 * n} = 0", index=2 * n)
        t_even = hat_b[n] * tau[2 * n - 1] / hat_a[n - 1]
        if _vanishes(t_even, 1):
            raise DegeneracyError(f"tau_{2 * n} vanishes", index=2 * n)
        tau.append(t_even)
        if len(tau) <= N:
            tau.append(t_even + hat_b[n] - hat_a[n])
        n += 1
    sys_res = max(
        (float(abs(tau[k] - ident[k]) / max(abs(ident[k]), 1e-300)) for k in range(1, len(tau))),
        default=0.0,
    )
    return CaseBResult(v, vhat, b, tuple(tau), tuple(ident), tuple(u_gamma),
                       tuple(hat_a), tuple(hat_b), sys_res, shift, moment_res)


def _interleave(coeffs: Sequence, odd: bool) -> tuple:
    zero = coeffs[0] * 0 if coeffs else 0.0
    out = []
    if odd:
        out.append(zero)
    for c in coeffs:
        out.extend((c, zero))
    return tuple(out)
