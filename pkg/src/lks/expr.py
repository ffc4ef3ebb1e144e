"""Expressions in one variable ``x``.

A small immutable AST with a recursive-descent parser, a printer whose output
parses back to the same tree, symbolic differentiation and vectorised
evaluation.  The grammar is::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' INT)?
    base   := NUMBER | 'pi' | 'x' | '(' expr ')' | FUNC '(' expr ')'
    FUNC   := 'sin' | 'cos' | 'exp'

``-`` directly in front of a bare number is folded into the constant.
Error offsets are 1-based byte positions in the UTF-8 encoded text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvaluationError, ExprSyntaxError, UnknownIdentifier

__all__ = [
    "Const", "Pi", "Var", "Neg", "Func", "BinOp", "Pow", "Expr",
    "parse", "to_text", "differentiate", "evaluate", "substitute_affine",
    "X", "const", "add", "sub", "mul", "div", "neg", "power", "func",
    "linear_form", "tidy", "scale", "size", "compile_scalar",
]


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Func:
    name: str  # sin | cos | exp
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Const, Pi, Var, Neg, Func, BinOp, Pow]

FUNCS = ("sin", "cos", "exp")
X = Var()


# -- smart constructors (light constant folding only) -------------------------

def const(v: float) -> Const:
    return Const(float(v))


def _is_const(e: Expr, v: float | None = None) -> bool:
    return isinstance(e, Const) and (v is None or e.value == v)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    if isinstance(a, BinOp) and a.op in "*/" and isinstance(a.left, Const):
        return BinOp(a.op, Const(-a.left.value), a.right)
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(b, Neg):
        return BinOp("-", a, b.arg)
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    if isinstance(b, Neg):
        return BinOp("+", a, b.arg)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return neg(b)
    if _is_const(b, -1.0):
        return neg(a)
    if _is_const(b) and not _is_const(a):
        a, b = b, a
    if isinstance(a, Neg):
        return neg(mul(a.arg, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.arg))
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return Const(0.0)
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Const(a.value / b.value)
    return BinOp("/", a, b)


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return Const(1.0)
    if n == 1:
        return a
    if _is_const(a) and (a.value != 0.0 or n > 0):
        return Const(a.value ** n)
    return Pow(a, n)


def func(name: str, a: Expr) -> Expr:
    if _is_const(a):
        return Const(float(getattr(math, name)(a.value)))
    return Func(name, a)


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), _offset(text, pos)))
        pos = m.end()
    tokens.append(("end", "", _offset(text, len(text))))
    return tokens


def _offset(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8")) + 1


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, off = self.take()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", off)

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            nxt = self.tokens[self.i]
            if nxt[0] == "num" and self.tokens[self.i + 1][1] != "^":
                self.take()
                return Const(-float(nxt[1]))
            return Neg(self.factor())
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val, off = self.take()
            if kind != "num" or not val.isdigit():
                raise ExprSyntaxError("expected integer exponent", off)
            node = Pow(node, sign * int(val))
        return node

    def base(self) -> Expr:
        kind, val, off = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "ident":
            if val == "pi":
                return Pi()
            if val == "x":
                return Var()
            if val in FUNCS:
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return Func(val, inner)
            raise UnknownIdentifier(f"unknown identifier {val!r}", off)
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {found}", off)


def parse(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    kind, val, off = p.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {val!r}", off)
    return node


# -- printing -----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Const) and e.value < 0:
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def _num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    """Render ``e`` so that ``parse(to_text(e)) == e``."""
    if isinstance(e, Const):
        if not math.isfinite(e.value):
            raise ValueError("non-finite constant has no textual form")
        return _num(e.value)
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        if _prec(e.arg) < 3 or (isinstance(e.arg, Const) and e.arg.value >= 0):
            inner = f"({inner})"
        return "-" + inner
    if isinstance(e, Pow):
        inner = to_text(e.base)
        if _prec(e.base) < 5:
            inner = f"({inner})"
        return f"{inner}^{e.exponent}"
    p = _PREC[e.op]
    left = to_text(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = to_text(e.right)
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# -- calculus -----------------------------------------------------------------

def differentiate(e: Expr) -> Expr:
    if isinstance(e, (Const, Pi)):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0)
    if isinstance(e, Neg):
        return neg(differentiate(e.arg))
    if isinstance(e, Func):
        du = differentiate(e.arg)
        if e.name == "sin":
            return mul(Func("cos", e.arg), du)
        if e.name == "cos":
            return neg(mul(Func("sin", e.arg), du))
        return mul(Func("exp", e.arg), du)
    if isinstance(e, Pow):
        du = differentiate(e.base)
        return mul(mul(Const(float(e.exponent)), power(e.base, e.exponent - 1)), du)
    u, v = e.left, e.right
    du, dv = differentiate(u), differentiate(v)
    if e.op == "+":
        return add(du, dv)
    if e.op == "-":
        return sub(du, dv)
    if e.op == "*":
        return add(mul(du, v), mul(u, dv))
    return div(sub(mul(du, v), mul(u, dv)), power(v, 2))


def substitute_affine(e: Expr, a: float, b: float) -> Expr:
    """Return the expression of ``x -> e(a*x + b)``."""
    if isinstance(e, Var):
        return add(mul(Const(float(a)), X), Const(float(b)))
    if isinstance(e, (Const, Pi)):
        return e
    if isinstance(e, Neg):
        return neg(substitute_affine(e.arg, a, b))
    if isinstance(e, Func):
        return Func(e.name, substitute_affine(e.arg, a, b))
    if isinstance(e, Pow):
        return power(substitute_affine(e.base, a, b), e.exponent)
    return BinOp(e.op, substitute_affine(e.left, a, b), substitute_affine(e.right, a, b))


def linear_form(e: Expr) -> tuple[float, float] | None:
    """Return (a, b) when ``e`` is the affine function a*x + b, else None."""
    if isinstance(e, Const):
        return 0.0, e.value
    if isinstance(e, Pi):
        return 0.0, math.pi
    if isinstance(e, Var):
        return 1.0, 0.0
    if isinstance(e, Neg):
        inner = linear_form(e.arg)
        return None if inner is None else (-inner[0], -inner[1])
    if isinstance(e, BinOp):
        left, right = linear_form(e.left), linear_form(e.right)
        if left is None or right is None:
            return None
        if e.op == "+":
            return left[0] + right[0], left[1] + right[1]
        if e.op == "-":
            return left[0] - right[0], left[1] - right[1]
        if e.op == "*":
            if left[0] == 0.0:
                return left[1] * right[0], left[1] * right[1]
            if right[0] == 0.0:
                return right[1] * left[0], right[1] * left[1]
            return None
        if right[0] == 0.0 and right[1] != 0.0:
            return left[0] / right[1], left[1] / right[1]
    return None


def _affine_expr(a: float, b: float) -> Expr:
    return add(mul(Const(a), X), Const(b))


def tidy(e: Expr, snap: float = 1e-12) -> Expr:
    """Collapse affine subtrees that contain x into the form a*x + b.

    Offsets with |b| <= snap are dropped; this only tidies the output of
    substitutions, it is not a general simplifier.
    """
    if isinstance(e, (Const, Pi, Var)):
        return e
    form = linear_form(e)
    if form is not None and form[0] != 0.0:
        a, b = form
        return _affine_expr(a, 0.0 if abs(b) <= snap else b)
    if isinstance(e, Neg):
        return neg(tidy(e.arg, snap))
    if isinstance(e, Func):
        return Func(e.name, tidy(e.arg, snap))
    if isinstance(e, Pow):
        return power(tidy(e.base, snap), e.exponent)
    return BinOp(e.op, tidy(e.left, snap), tidy(e.right, snap))


def scale(e: Expr, c: float) -> Expr:
    """Return the expression of ``c * e``."""
    return mul(Const(float(c)), e)


def _eval(e: Expr, x):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -_eval(e.arg, x)
    if isinstance(e, Func):
        return getattr(np, e.name)(_eval(e.arg, x))
    if isinstance(e, Pow):
        base = _eval(e.base, x)
        if e.exponent < 0:
            return 1.0 / np.power(base, -e.exponent)
        return np.power(base, e.exponent)
    left, right = _eval(e.left, x), _eval(e.right, x)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    return left / right


def evaluate(e: Expr, x, *, strict: bool = False):
    """Evaluate ``e`` at a scalar or an array of points.

    With ``strict`` a non-finite result raises ``EvaluationError``; otherwise
    inf/nan propagate silently, which suits grid sampling.
    """
    arr = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(e, arr) + np.zeros_like(arr)
    if strict and not np.all(np.isfinite(out)):
        raise EvaluationError(f"{to_text(e)} is singular at x={x!r}")
    if np.ndim(x) == 0:
        return float(out)
    return out


def _src(e: Expr) -> str:
    if isinstance(e, Const):
        return f"({e.value!r})"
    if isinstance(e, Pi):
        return "_pi"
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"(-{_src(e.arg)})"
    if isinstance(e, Func):
        return f"_{e.name}({_src(e.arg)})"
    if isinstance(e, Pow):
        if e.exponent < 0:
            return f"(1.0 / {_src(e.base)} ** {-e.exponent})"
        return f"({_src(e.base)} ** {e.exponent})"
    return f"({_src(e.left)} {e.op} {_src(e.right)})"


def compile_scalar(e: Expr):
    """A plain-float version of ``evaluate`` for hot loops (ODE right-hand
    sides, quadrature); singular points give nan or inf instead of raising."""
    code = compile(f"lambda x: {_src(e)}", "<expr>", "eval")
    fn = eval(code, {"_pi": math.pi, "_sin": math.sin, "_cos": math.cos, "_exp": math.exp})

    def call(x: float) -> float:
        try:
            return float(fn(float(x)))
        except ZeroDivisionError:
            return math.nan
        except OverflowError:
            return math.inf

    return call


def size(e: Expr) -> int:
    if isinstance(e, (Const, Pi, Var)):
        return 1
    if isinstance(e, (Neg, Func)):
        return 1 + size(e.arg)
    if isinstance(e, Pow):
        return 1 + size(e.base)
    return 1 + size(e.left) + size(e.right)
