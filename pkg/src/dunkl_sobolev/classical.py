"""Symmetric Dunkl-classical measures: generalized Hermite and Gegenbauer.

Both measures are normalized to unit mass. All quantities derive from the
three-term recurrence x P_n = P_{n+1} + gamma_n P_{n-1}; moments come from
the mixed-moment recursion rather than from Gamma-function integrals.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NumericalError, ParameterError, RegimeError
from .polycore import Polynomial, X, dunkl, mu_index, validate_mu
from .precision import DOUBLE, EXT, EXTENDED, Precision, get_precision

HERMITE = "hermite"
GEGENBAUER = "gegenbauer"
FAMILIES = (HERMITE, GEGENBAUER)

AUTO_EXTENDED_MU = 20.0


@dataclass(frozen=True)
class ClassicalMeasure:
    family: str
    mu: float
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        validate_mu(self.mu)
        if self.family == GEGENBAUER:
            if self.alpha is None:
                raise ParameterError("the Gegenbauer family needs alpha")
            if not self.alpha > -1:
                raise RegimeError(f"Gegenbauer alpha={self.alpha} must exceed -1")
        elif self.alpha is not None:
            object.__setattr__(self, "alpha", None)

    def label(self) -> str:
        if self.family == HERMITE:
            return f"hermite(mu={self.mu:g})"
        return f"gegenbauer(alpha={self.alpha:g}, mu={self.mu:g})"

    # -- recurrence -----------------------------------------------------
    def gamma(self, n: int, precision: Precision | str | None = DOUBLE):
        """Recurrence coefficient gamma_n, n >= 1."""
        if n < 1:
            raise ValueError("gamma_n is defined for n >= 1")
        prec = get_precision(precision)
        mu = prec.num(self.mu)
        k = n - 1
        if self.family == HERMITE:
            g = mu_index(n, mu) / 2
        else:
            a = prec.num(self.alpha)
            rho = 2 * mu if k % 2 == 0 else 0 * mu
            if k == 0:
                # (1 + 2a + 2mu) / (2(a + mu + 1/2)) = 1; cancelled so a + mu = -1/2 works
                g = (1 + 2 * mu) / (2 * (a + mu + prec.num(1.5)))
            else:
                g = (k + 1 + rho) * (k + 1 + 2 * a + rho) / (
                    4 * (k + a + mu + prec.num(0.5)) * (k + a + mu + prec.num(1.5))
                )
        if not g > 0:
            raise RegimeError(f"gamma_{n} = {float(g)} is not positive for {self.label()}")
        return g

    def gammas(self, N: int, precision: Precision | str | None = DOUBLE) -> list:
        """``[gamma_0, ..., gamma_N]`` with the convention gamma_0 = 1."""
        return list(_gammas(self, N, get_precision(precision)))

    def monic_polys(self, N: int, precision: Precision | str | None = DOUBLE) -> list[Polynomial]:
        return list(_monic(self, N, get_precision(precision)))

    def norms(self, N: int, precision: Precision | str | None = DOUBLE) -> list:
        """p_n = <u, P_n^2> = gamma_1 ... gamma_n, with p_0 = 1."""
        return norms_from_gammas(self.gammas(N, precision))

    def moments(self, N: int, precision: Precision | str | None = DOUBLE) -> list:
        """m_0..m_N; odd moments are exactly zero."""
        prec = get_precision(precision)
        return list(_moments(self, N, prec))

    # -- structure ------------------------------------------------------
    def pearson_pair(self, precision=DOUBLE) -> tuple[Polynomial, Polynomial]:
        prec = get_precision(precision)
        one = prec.num(1)
        if self.family == HERMITE:
            return Polynomial((one,)), Polynomial((0 * one, -2 * one))
        a = prec.num(self.alpha)
        return Polynomial((-one, 0 * one, one)), Polynomial((0 * one, 2 * (a + 1)))

    def derived(self) -> ClassicalMeasure:
        """Measure of the lowered family T_mu P_{n+1} / mu_{n+1}."""
        if self.family == HERMITE:
            return self
        return ClassicalMeasure(GEGENBAUER, self.mu, self.alpha + 1)

    def admissibility(self, n: int, precision=DOUBLE):
        """Psi'(0) + Phi''(0) mu_n / 2; regularity needs it nonzero for every n."""
        prec = get_precision(precision)
        phi, psi = self.pearson_pair(prec)
        return psi[1] + phi[2] * mu_index(n, prec.num(self.mu))

    def check_admissible(self, N: int) -> None:
        for n in range(N + 1):
            if self.admissibility(n) == 0:
                raise RegimeError(f"{self.label()} fails admissibility at n={n}")

    def density(self, x, precision=DOUBLE):
        """Normalized weight function evaluated at real ``x`` (array or scalar)."""
        prec = get_precision(precision)
        mu = prec.num(self.mu)
        half = prec.num(0.5)
        ax = abs(x)
        if self.family == HERMITE:
            return ax ** (2 * mu) * prec.exp(-x * x) / prec.gammafn(mu + half)
        a = prec.num(self.alpha)
        c = prec.gammafn(a + mu + prec.num(1.5)) / (prec.gammafn(a + 1) * prec.gammafn(mu + half))
        inside = 1 - x * x
        return c * ax ** (2 * mu) * inside ** a

    @property
    def support(self) -> tuple[float, float]:
        return (-np.inf, np.inf) if self.family == HERMITE else (-1.0, 1.0)


def norms_from_gammas(gammas: Sequence) -> list:
    out = [gammas[0] * 0 + 1]
    for g in gammas[1:]:
        out.append(out[-1] * g)
    return out


def monic_from_gammas(gammas: Sequence, N: int) -> list[Polynomial]:
    """Monic symmetric MOPS P_0..P_N from ``[gamma_0, gamma_1, ...]``."""
    one = gammas[0] * 0 + 1
    polys = [Polynomial((one,))]
    if N >= 1:
        polys.append(X(one))
    for n in range(1, N):
        polys.append(polys[n].times_x() - polys[n - 1] * gammas[n])
    return polys


def moments_from_recurrence(gammas: Sequence, N: int) -> list:
    """Moments m_0..m_N of the symmetric form with recurrence ``gammas``.

    Uses x^k = sum_j c_{k,j} P_j and x P_j = P_{j+1} + gamma_j P_{j-1}, so
    c_{k+1,j} = c_{k,j-1} + gamma_{j+1} c_{k,j+1} and m_k = c_{k,0}.
    ``gammas`` must reach index ceil(N/2).
    """
    zero = gammas[0] * 0
    depth = N // 2 + 2
    if len(gammas) < (N + 1) // 2 + 1:
        raise ValueError("not enough recurrence coefficients for the requested moments")
    c = [zero + 1] + [zero] * depth
    out = [c[0]]
    for _ in range(N):
        nxt = [zero] * (depth + 1)
        for j in range(depth + 1):
            val = c[j - 1] if j >= 1 else zero
            if j + 1 <= depth and j + 1 < len(gammas):
                val = val + gammas[j + 1] * c[j + 1]
            nxt[j] = val
        c = nxt
        out.append(c[0])
    return out


@lru_cache(maxsize=256)
def _gammas(measure: ClassicalMeasure, N: int, prec: Precision) -> tuple:
    return (prec.num(1),) + tuple(measure.gamma(n, prec) for n in range(1, N + 1))


@lru_cache(maxsize=256)
def _monic(measure: ClassicalMeasure, N: int, prec: Precision) -> tuple:
    return tuple(monic_from_gammas(_gammas(measure, max(N, 1), prec), N))


@lru_cache(maxsize=256)
def _moments(measure: ClassicalMeasure, N: int, prec: Precision) -> tuple:
    return tuple(moments_from_recurrence(_gammas(measure, N // 2 + 1, prec), N))


def moment_integral(poly: Polynomial, moments: Sequence):
    """<u, poly> from the moment list of u."""
    if poly.is_zero():
        return 0 * moments[0]
    if poly.degree >= len(moments):
        raise ValueError(f"need moments through degree {poly.degree}")
    acc = 0 * moments[0]
    for k, c in enumerate(poly.coeffs):
        if k % 2 == 0:
            acc = acc + c * moments[k]
    return acc


def pearson_residual(measure: ClassicalMeasure, n: int, precision=DOUBLE):
    """<T_mu(Phi u) - Psi u, x^n> = -mu_n <u, Phi x^{n-1}> - <u, Psi x^n>.

    Returns ``(residual, scale)`` where ``scale`` is the largest term.
    """
    prec = get_precision(precision)
    phi, psi = measure.pearson_pair(prec)
    m = measure.moments(n + 3, prec)
    mn = mu_index(n, prec.num(measure.mu))
    lower = mn * moment_integral(phi.times_x(n - 1), m) if n >= 1 else 0 * mn
    upper = moment_integral(psi.times_x(n), m)
    return -lower - upper, max(abs(lower), abs(upper), 1)


def dunkl_lowering_check(measure: ClassicalMeasure, n: int, precision=DOUBLE):
    """Relative deviation between T_mu P_n and mu_n times the lowered P_{n-1}."""
    prec = get_precision(precision)
    P = measure.monic_polys(n, prec)[n]
    target = measure.derived().monic_polys(n - 1, prec)[n - 1] * mu_index(n, prec.num(measure.mu))
    lhs = dunkl(P, prec.num(measure.mu))
    diff = max((abs(lhs[k] - target[k]) for k in range(n)), default=0)
    return diff / max(1, target.max_abs())


# ----------------------------------------------------------------- quadrature

@dataclass(frozen=True)
class Quadrature:
    """Discrete rule sum_i w_i g(x_i) + sum_j m_j g(y_j)."""

    nodes: np.ndarray
    weights: np.ndarray
    point_masses: tuple = field(default=())
    precision: Precision = DOUBLE

    @property
    def total_mass(self):
        return sum(self.weights) + sum(m for _, m in self.point_masses)

    def integrate(self, g: Callable):
        acc = np.sum(self.weights * g(self.nodes)) if len(self.nodes) else 0
        for loc, mass in self.point_masses:
            acc = acc + mass * g(np.asarray([loc], dtype=self.nodes.dtype))[0]
        return acc

    def integrate_values(self, values, mass_values=()):
        acc = np.sum(self.weights * values)
        for (_, mass), val in zip(self.point_masses, mass_values):
            acc = acc + mass * val
        return acc


def gauss_quadrature(measure: ClassicalMeasure, n_nodes: int, precision=None) -> Quadrature:
    """Gauss rule of ``n_nodes`` points for ``measure``.

    Nodes start from the eigenvalues of the Jacobi matrix, are polished by
    Newton steps on the orthonormal recurrence, and the weights are the
    Christoffel numbers 1 / sum_k phat_k(x)^2. Extended arithmetic is used
    when requested or automatically for mu above ``AUTO_EXTENDED_MU``.
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    if precision is None:
        prec = EXTENDED if measure.mu > AUTO_EXTENDED_MU else DOUBLE
    else:
        prec = get_precision(precision)
    gam = measure.gammas(n_nodes, prec)
    return gauss_from_gammas(gam, n_nodes, prec)


_SCALE_LIMIT = 1e100


def _orthonormal_eval(x, sq, n: int, with_weights: bool, rescale: bool):
    """phat_n(x), phat_n'(x) and (optionally) sum_{k<n} phat_k(x)^2 in log form."""
    one = 1 + 0 * x
    p_prev, p = 0 * x, one
    d_prev, d = 0 * x, 0 * x
    total = one.copy() if with_weights else None
    logscale = np.zeros(np.shape(x)) if rescale else None
    for k in range(n):
        # phat_{k+1} = (x phat_k - sq_k phat_{k-1}) / sq_{k+1}
        s_prev = sq[k] if k >= 1 else 0
        p_new = (x * p - s_prev * p_prev) / sq[k + 1]
        d_new = (p + x * d - s_prev * d_prev) / sq[k + 1]
        p_prev, p, d_prev, d = p, p_new, d, d_new
        if with_weights and k + 1 < n:
            total = total + p * p
        if rescale:
            big = np.abs(p) > _SCALE_LIMIT
            if np.any(big):
                f = np.where(big, 1 / _SCALE_LIMIT, 1.0)
                p, p_prev, d, d_prev = p * f, p_prev * f, d * f, d_prev * f
                if with_weights:
                    total = total * f * f
                logscale = logscale - np.where(big, 2 * np.log(f), 0.0)
    return p, d, total, logscale


def gauss_from_gammas(gammas: Sequence, n: int, prec: Precision = DOUBLE, iterations: int = 6) -> Quadrature:
    """Gauss rule for a symmetric unit-mass measure given ``[1, gamma_1, ...]``."""
    g = [float(v) for v in gammas[1:n]]
    if n == 1:
        nodes0 = np.zeros(1)
    else:
        try:
            nodes0 = eigh_tridiagonal(np.zeros(n), np.sqrt(g), eigvals_only=True)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise NumericalError(f"tridiagonal eigensolver failed for n={n}: {exc}") from exc
    nodes0 = np.sort(nodes0)
    sq = [prec.sqrt(v) for v in gammas[: n + 1]]
    if prec.extended:
        x = np.array([EXT.mpf(v) for v in nodes0], dtype=object)
        sq_arr = sq
    else:
        x = nodes0.astype(float)
        sq_arr = [float(v) for v in sq]
    rescale = not prec.extended
    for _ in range(iterations):
        p, d, _, _ = _orthonormal_eval(x, sq_arr, n, False, rescale)
        with np.errstate(invalid="ignore", divide="ignore"):
            step = p / d
        if not prec.extended:
            step = np.where(np.isfinite(step), step, 0.0)
        x = x - step
    _, _, total, logscale = _orthonormal_eval(x, sq_arr, n, True, rescale)
    if prec.extended:
        w = np.array([1 / t for t in total], dtype=object)
    else:
        with np.errstate(over="ignore", under="ignore"):
            w = np.exp(-(np.log(total) + logscale))
    # enforce exact symmetry of the rule
    x = (x - x[::-1]) / 2
    w = (w + w[::-1]) / 2
    if n % 2 == 1:
        x[n // 2] = 0 * x[n // 2]
    return Quadrature(x, w, (), prec)
