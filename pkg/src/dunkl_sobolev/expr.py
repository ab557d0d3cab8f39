"""A small expression language for target functions f(x).

Grammar (precedence: power > unary minus > product > sum, left-associative)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' ['-'] int)?
    atom  := number | 'x' | func '(' expr ')' | '(' expr ')'
    func  := 'exp' | 'sin' | 'cos'

Numbers are decimal literals kept as text so that each precision backend
converts them exactly once.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifierError
from .polycore import Polynomial
from .precision import DOUBLE, EXT, Precision, get_precision

SINGULARITY_THRESHOLD = 1e-8
FUNCTIONS = ("exp", "sin", "cos")


@dataclass(frozen=True)
class Const:
    text: str

    @property
    def value(self) -> Fraction:
        return Fraction(self.text)


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Node"

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


Node = Union[Const, Var, Add, Sub, Mul, Div, Pow, Neg, Func]

ZERO, ONE = Const("0"), Const("1")


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass
class _Tok:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    offset: int


def _tokenize(src: str) -> list[_Tok]:
    toks, pos = [], 0
    raw = src.encode()
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            offset = len(src[:pos].encode())
            while offset < len(raw) and raw[offset : offset + 1].isspace():
                offset += 1
            raise ExprSyntaxError(f"unexpected character {src[pos:].lstrip()[:1]!r}", offset)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), len(src[:start].encode())))
        pos = m.end()
    toks.append(_Tok("end", "", len(raw)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _is(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def _fail(self, expected: set[str]):
        what = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
        raise ExprSyntaxError(f"unexpected {what}", self.tok.offset, frozenset(expected))

    def _expect(self, op: str):
        if not self._is(op):
            self._fail({op})
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self._is("+", "-"):
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self._is("*", "/"):
            op = self.tok.text
            self.i += 1
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self) -> Node:
        if self._is("-"):
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if not self._is("^"):
            return base
        self.i += 1
        sign = 1
        if self._is("-"):
            sign = -1
            self.i += 1
        if self.tok.kind != "num" or not self.tok.text.isdigit():
            self._fail({"integer exponent"})
        exponent = sign * int(self.tok.text)
        self.i += 1
        return Pow(base, exponent)

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(tok.text)
        if tok.kind == "name":
            if tok.text == "x":
                self.i += 1
                return Var()
            if tok.text in FUNCTIONS:
                self.i += 1
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Func(tok.text, arg)
            raise UnknownIdentifierError(
                f"unknown identifier {tok.text!r}", tok.offset, frozenset({"x", *FUNCTIONS})
            )
        if self._is("("):
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        self._fail({"number", "x", "(", "-", *FUNCTIONS})


def parse(src: str) -> Node:
    """Parse ``src`` into an AST; raises :class:`ExprSyntaxError` with a byte offset."""
    return _Parser(src).parse()


# -------------------------------------------------------------- rendering

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}
_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def _prec(node: Node) -> int:
    return _PREC.get(type(node), 5)


def render(node: Node) -> str:
    """Canonical text form; ``parse(render(n)) == n`` for every tree."""
    if isinstance(node, Const):
        return node.text
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Func):
        return f"{node.name}({render(node.arg)})"
    if isinstance(node, Neg):
        inner = render(node.arg)
        return "-" + (inner if _prec(node.arg) >= 3 else f"({inner})")
    if isinstance(node, Pow):
        base = render(node.base)
        if _prec(node.base) < 5:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    p = _prec(node)
    left, right = render(node.left), render(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left}{_SYMBOL[type(node)]}{right}"


# --------------------------------------------------------- differentiation

def _const(n: int) -> Node:
    c = Const(str(abs(n)))
    return Neg(c) if n < 0 else c


def _is_const(node: Node, value: int) -> bool:
    return isinstance(node, Const) and node.value == value


def _add(a: Node, b: Node) -> Node:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def _sub(a: Node, b: Node) -> Node:
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _neg(b)
    return Sub(a, b)


def _neg(a: Node) -> Node:
    if _is_const(a, 0):
        return a
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a: Node, b: Node) -> Node:
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Mul(a, b)


def differentiate(node: Node) -> Node:
    """Symbolic d/dx with the local rules 0*e -> 0, 1*e -> e, e+0 -> e."""
    if isinstance(node, Const):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Add):
        return _add(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Sub):
        return _sub(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Neg):
        return _neg(differentiate(node.arg))
    if isinstance(node, Mul):
        a, b = node.left, node.right
        return _add(_mul(differentiate(a), b), _mul(a, differentiate(b)))
    if isinstance(node, Div):
        a, b = node.left, node.right
        num = _sub(_mul(differentiate(a), b), _mul(a, differentiate(b)))
        return ZERO if _is_const(num, 0) else Div(num, Pow(b, 2))
    if isinstance(node, Pow):
        n = node.exponent
        if n == 0:
            return ZERO
        if n == 1:
            power = ONE
        elif n == 2:
            power = node.base
        else:
            power = Pow(node.base, n - 1)
        outer = _mul(_const(n), power)
        return _mul(outer, differentiate(node.base))
    if isinstance(node, Func):
        inner = differentiate(node.arg)
        if node.name == "exp":
            outer = node
        elif node.name == "sin":
            outer = Func("cos", node.arg)
        else:
            outer = Neg(Func("sin", node.arg))
        return _mul(outer, inner)
    raise TypeError(f"not an expression node: {node!r}")


# ------------------------------------------------------------- evaluation

def evaluate(node: Node, x, precision: Precision | str | None = DOUBLE):
    """Evaluate at a scalar or array ``x`` (real or complex) in ``precision``."""
    prec = get_precision(precision)
    return _eval(node, x, prec)


def _eval(node: Node, x, prec: Precision):
    if isinstance(node, Const):
        return prec.num(node.text) + 0 * x
    if isinstance(node, Var):
        return x
    if isinstance(node, Add):
        return _eval(node.left, x, prec) + _eval(node.right, x, prec)
    if isinstance(node, Sub):
        return _eval(node.left, x, prec) - _eval(node.right, x, prec)
    if isinstance(node, Mul):
        return _eval(node.left, x, prec) * _eval(node.right, x, prec)
    if isinstance(node, Div):
        return _eval(node.left, x, prec) / _eval(node.right, x, prec)
    if isinstance(node, Neg):
        return -_eval(node.arg, x, prec)
    if isinstance(node, Pow):
        base = _eval(node.base, x, prec)
        if node.exponent < 0:
            return 1 / base ** (-node.exponent)
        return base ** node.exponent
    if isinstance(node, Func):
        arg = _eval(node.arg, x, prec)
        if isinstance(arg, np.ndarray) or prec.extended:
            return getattr(prec, node.name)(arg)
        return getattr(np, node.name)(arg)
    raise TypeError(f"not an expression node: {node!r}")


def to_polynomial(node: Node, precision: Precision | str | None = DOUBLE) -> Polynomial | None:
    """Expand ``node`` into a :class:`Polynomial`, or ``None`` if it is not one."""
    prec = get_precision(precision)
    q = _poly(node)
    if q is None:
        return None
    if not prec.extended:
        return Polynomial(tuple(float(c) for c in q.coeffs))  # correctly rounded
    return Polynomial(tuple(prec.num(c.numerator) / prec.num(c.denominator) for c in q.coeffs))


def _poly(node: Node) -> Polynomial | None:
    # Exact rational arithmetic so polynomial inputs stay exact.
    if isinstance(node, Const):
        return Polynomial((node.value,))
    if isinstance(node, Var):
        return Polynomial((Fraction(0), Fraction(1)))
    if isinstance(node, Func):
        return None
    if isinstance(node, Neg):
        p = _poly(node.arg)
        return None if p is None else -p
    if isinstance(node, Pow):
        p = _poly(node.base)
        if p is None or node.exponent < 0:
            return None
        out = Polynomial((Fraction(1),))
        for _ in range(node.exponent):
            out = out * p
        return out
    a, b = _poly(node.left), _poly(node.right)
    if a is None or b is None:
        return None
    if isinstance(node, Add):
        return a + b
    if isinstance(node, Sub):
        return a - b
    if isinstance(node, Mul):
        return a * b
    if b.degree != 0:
        return None
    return a * (1 / b.coeffs[0])


def _check_finite(values, prec: Precision):
    arr = np.asarray(values)
    if prec.extended:
        ok = all(EXT.isfinite(v) for v in arr.ravel())
    else:
        ok = bool(np.all(np.isfinite(arr)))
    if not ok:
        raise DomainError("expression evaluation produced a non-finite value")
    return values


@dataclass(frozen=True)
class ExprFn:
    """A parsed target function together with its symbolic derivative."""

    ast: Node
    mu: float = 0.0
    dast: Node = field(default=None)
    source: str = ""

    def __post_init__(self):
        if self.dast is None:
            object.__setattr__(self, "dast", differentiate(self.ast))

    @classmethod
    def from_source(cls, src: str, mu=0.0) -> ExprFn:
        return cls(parse(src), mu, source=src)

    def f(self, x, precision=DOUBLE):
        prec = get_precision(precision)
        with np.errstate(all="ignore"):  # non-finite results raise below
            return _check_finite(_eval(self.ast, x, prec), prec)

    def df(self, x, precision=DOUBLE):
        prec = get_precision(precision)
        with np.errstate(all="ignore"):
            return _check_finite(_eval(self.dast, x, prec), prec)

    def polynomial(self, precision=DOUBLE) -> Polynomial | None:
        return to_polynomial(self.ast, precision)

    def dunkl_eval(self, x, precision=DOUBLE):
        """T_mu f(x) = f'(x) + mu (f(x) - f(-x)) / x.

        For |x| below the singularity threshold the odd-part quotient is
        replaced by its Taylor limit f'(x) + f'(-x), which equals 2 f'(0) at
        x = 0 and so gives (1 + 2 mu) f'(0) there.
        """
        prec = get_precision(precision)
        mu = prec.num(self.mu)
        scalar = not isinstance(x, np.ndarray)
        xs = np.atleast_1d(np.asarray(x, dtype=object if prec.extended else None))
        small = np.array([abs(v) < SINGULARITY_THRESHOLD for v in xs.ravel()]).reshape(xs.shape)
        safe = np.where(small, 1 + 0 * xs, xs)
        dfx = self.df(xs, prec)
        dfm = self.df(-xs, prec)
        quotient = (self.f(safe, prec) - self.f(-safe, prec)) / safe
        out = dfx + mu * np.where(small, dfx + dfm, quotient)
        out = _check_finite(out, prec)
        return out[0] if scalar else out
