"""Dense univariate polynomials and the Dunkl operator acting on them.

Coefficients are stored in ascending order and may be floats or extended
precision numbers; every operation is generic over the scalar type.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ParityError, RegimeError

ZERO_DEGREE = -1  # degree sentinel of the zero polynomial


def _trim(coeffs: Sequence) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def constant(cls, c) -> Polynomial:
        return cls((c,))

    @classmethod
    def monomial(cls, n: int, c=1.0) -> Polynomial:
        return cls((0 * c,) * n + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    @property
    def parity(self) -> str | None:
        """``'even'``, ``'odd'`` or ``None`` (mixed). The zero polynomial is even."""
        if all(c == 0 for c in self.coeffs[1::2]):
            return "even"
        if all(c == 0 for c in self.coeffs[0::2]):
            return "odd"
        return None

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a scalar or a numpy array."""
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self[k] + other[k] for k in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero() or other.is_zero():
                return Polynomial()
            out = [0 * self.coeffs[0]] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return Polynomial(tuple(out))
        return Polynomial(tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def times_x(self, power: int = 1) -> Polynomial:
        if self.is_zero():
            return self
        zero = 0 * self.coeffs[0]
        return Polynomial((zero,) * power + self.coeffs)

    def max_abs(self):
        return max((abs(c) for c in self.coeffs), default=0)

    def map(self, fn) -> Polynomial:
        return Polynomial(tuple(fn(c) for c in self.coeffs))

    def __repr__(self) -> str:
        return f"Polynomial({[float(c) for c in self.coeffs]})"


def X(one=1.0) -> Polynomial:
    return Polynomial((0 * one, one))


def validate_mu(mu) -> None:
    """Positive-definite regime for the Dunkl parameter: mu > -1/2."""
    if not mu > -0.5:
        raise RegimeError(f"Dunkl parameter mu={float(mu)} must exceed -1/2")


def mu_index(n: int, mu):
    """mu_n = n for even n and n + 2 mu for odd n."""
    if n < 0:
        raise ValueError("mu_index needs n >= 0")
    return n + 2 * mu if n % 2 else n + 0 * mu


def h_minus1(p: Polynomial) -> Polynomial:
    """(f(x) - f(-x)) / (2x): odd-power coefficients shifted down one degree."""
    if p.is_zero():
        return p
    zero = 0 * p.coeffs[0]
    return Polynomial(tuple(p[k + 1] if k % 2 == 0 else zero for k in range(len(p.coeffs) - 1)))


def dunkl(p: Polynomial, mu) -> Polynomial:
    """T_mu p = p' + 2 mu H_{-1} p, i.e. x^n -> mu_n x^(n-1)."""
    return Polynomial(tuple(mu_index(k, mu) * c for k, c in enumerate(p.coeffs))[1:])


def quadratic_split(p: Polynomial) -> tuple[Polynomial | None, Polynomial | None]:
    """Write a parity-definite polynomial in the variable t = x^2.

    Returns ``(A, None)`` with A(x^2) = p(x) for even p and ``(None, B)``
    with x B(x^2) = p(x) for odd p.
    """
    parity = p.parity
    if parity is None:
        raise ParityError("quadratic_split needs an even or an odd polynomial")
    if parity == "even":
        return Polynomial(p.coeffs[0::2]), None
    return None, Polynomial(p.coeffs[1::2])


def from_quadratic(q: Polynomial, odd: bool) -> Polynomial:
    """Inverse of :func:`quadratic_split`: q(x^2) or x q(x^2)."""
    if q.is_zero():
        return q
    zero = 0 * q.coeffs[0]
    out = []
    for c in q.coeffs:
        out.extend((c, zero))
    p = Polynomial(tuple(out))
    return p.times_x() if odd else p


def max_coeff_diff(p: Polynomial, q: Polynomial):
    n = max(len(p.coeffs), len(q.coeffs))
    return max((abs(p[k] - q[k]) for k in range(n)), default=0)
