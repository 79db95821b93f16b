"""Expression trees for invariants and action maps.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | factor
    factor := atom ['^' uint]
    atom   := number | ident | '(' expr ')' | 'sqrt(' expr ')'
            | 'det2(' 4 exprs ')' | 'det3(' 9 exprs ')' | 'det4(' 16 exprs ')'

A rational literal ``p/q`` is the quotient of two integer literals and is folded
into a single Constant, as is a negated literal.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import NotAUnit, NotInvertible, ParseError, UnboundVariable, UnsupportedOperation
from .ring import Polynomial, RationalFunction, RingDescriptor
from .weil import MultiWeilElement, WeilElement, weil_sqrt


class Expression:
    __slots__ = ()

    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return Div(self, _wrap(other))

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return power(self, n)

    def __str__(self):
        return render(self)


@dataclass(frozen=True, eq=True)
class Constant(Expression):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Variable(Expression):
    name: str


@dataclass(frozen=True)
class Add(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Sub(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Mul(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Div(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Neg(Expression):
    arg: Expression


@dataclass(frozen=True)
class IntPow(Expression):
    base: Expression
    n: int


@dataclass(frozen=True)
class Sqrt(Expression):
    arg: Expression


@dataclass(frozen=True)
class Det(Expression):
    """Determinant of an n x n matrix given row-major."""

    n: int
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.n * self.n:
            raise ValueError(f"det{self.n} takes {self.n * self.n} arguments")

    def entry(self, i, j):
        return self.args[i * self.n + j]


def _wrap(x):
    if isinstance(x, Expression):
        return x
    return Constant(Fraction(x))


ZERO = Constant(0)
ONE = Constant(1)


def _is_const(e, v=None):
    return isinstance(e, Constant) and (v is None or e.value == v)


# smart constructors: fold only the trivial identities
def add(a, b):
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return Constant(a.value + b.value)
    return Add(a, b)


def sub(a, b):
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    if _is_const(a) and _is_const(b):
        return Constant(a.value - b.value)
    return Sub(a, b)


def mul(a, b):
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return Constant(a.value * b.value)
    return Mul(a, b)


def div(a, b):
    if _is_const(a, 0):
        return ZERO
    if _is_const(b, 1):
        return a
    return Div(a, b)


def neg(a):
    if _is_const(a):
        return Constant(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a, n):
    if n == 0:
        return ONE
    if n == 1:
        return a
    if _is_const(a):
        return Constant(a.value ** n)
    return IntPow(a, n)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")
_MINUS_SIGNS = {"−": "-", "–": "-"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        for m in _TOKEN.finditer(text):
            num, ident, other = m.groups()
            if num is None and ident is None and other is None:
                continue
            pos = m.start(m.lastindex)
            if num is not None:
                self.tokens.append(("num", num, pos))
            elif ident is not None:
                self.tokens.append(("ident", ident, pos))
            else:
                other = _MINUS_SIGNS.get(other, other)
                if other not in "+-*/^(),":
                    self._fail(f"unexpected character {other!r}", pos)
                self.tokens.append(("op", other, pos))
        self.i = 0

    def _fail(self, msg, pos):
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        raise ParseError(msg, line, col)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("eof", "", len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value or t[0] == "eof":
            self._fail(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def parse(self):
        if not self.tokens:
            self._fail("empty expression", 0)
        e = self.expr()
        t = self.peek()
        if t[0] != "eof":
            self._fail(f"unexpected {t[1]!r}", t[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                e = Mul(e, rhs)
            elif _is_const(e) and _is_const(rhs) and self._literal_quotient:
                if rhs.value == 0:
                    self._fail("zero denominator in rational literal", self.tokens[self.i - 1][2])
                e = Constant(e.value / rhs.value)
            else:
                e = Div(e, rhs)
        return e

    _literal_quotient = True

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            arg = self.unary()
            return Constant(-arg.value) if _is_const(arg) else Neg(arg)
        return self.factor()

    def factor(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            n = self.take()
            if n[0] != "num":
                self._fail("exponent must be a non-negative integer", n[2])
            return IntPow(base, int(n[1]))
        return base

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return Constant(int(val))
        if kind == "ident":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                return self.call(val, pos)
            if val == "sqrt" or re.fullmatch(r"det\d+", val):
                self._fail(f"{val} requires an argument list", pos)
            return Variable(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        self._fail(f"unexpected {val or 'end of input'!r}", pos)

    def call(self, name, pos):
        self.expect("(")
        args = [self.expr()]
        while self.peek()[1] == "," and self.peek()[0] == "op":
            self.take()
            args.append(self.expr())
        self.expect(")")
        if name == "sqrt":
            if len(args) != 1:
                self._fail("sqrt takes one argument", pos)
            return Sqrt(args[0])
        m = re.fullmatch(r"det([234])", name)
        if m:
            n = int(m.group(1))
            if len(args) != n * n:
                self._fail(f"{name} takes {n * n} arguments, got {len(args)}", pos)
            return Det(n, tuple(args))
        self._fail(f"unknown function {name!r}", pos)


def parse(text: str) -> Expression:
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# rendering

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e) -> int:
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, IntPow):
        return _PREC_POW
    if isinstance(e, Constant):
        v = e.value
        if v.denominator != 1:
            return _PREC_MUL
        return _PREC_NEG if v < 0 else _PREC_ATOM
    return _PREC_ATOM


def _wrap_if(e, cond):
    s = render(e)
    return f"({s})" if cond else s


def render(e: Expression) -> str:
    if isinstance(e, Constant):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(e, Variable):
        return e.name
    if isinstance(e, (Add, Sub, Mul, Div)):
        p = _prec(e)
        op = {Add: " + ", Sub: " - ", Mul: "*", Div: "/"}[type(e)]
        return _wrap_if(e.left, _prec(e.left) < p) + op + _wrap_if(e.right, _prec(e.right) <= p)
    if isinstance(e, Neg):
        return "-" + _wrap_if(e.arg, _prec(e.arg) < _PREC_NEG or _is_const(e.arg))
    if isinstance(e, IntPow):
        return _wrap_if(e.base, _prec(e.base) < _PREC_ATOM) + f"^{e.n}"
    if isinstance(e, Sqrt):
        return f"sqrt({render(e.arg)})"
    if isinstance(e, Det):
        return f"det{e.n}(" + ", ".join(render(a) for a in e.args) + ")"
    raise TypeError(f"not an expression: {e!r}")


# --------------------------------------------------------------------------
# structure

def free_variables(e: Expression) -> set:
    out = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Variable):
            out.add(x.name)
        elif isinstance(x, (Add, Sub, Mul, Div)):
            stack += [x.left, x.right]
        elif isinstance(x, (Neg, Sqrt)):
            stack.append(x.arg)
        elif isinstance(x, IntPow):
            stack.append(x.base)
        elif isinstance(x, Det):
            stack.extend(x.args)
    return out


def substitute(e: Expression, mapping: Mapping[str, Expression]) -> Expression:
    if isinstance(e, Variable):
        return mapping.get(e.name, e)
    if isinstance(e, Constant):
        return e
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, (Neg, Sqrt)):
        return type(e)(substitute(e.arg, mapping))
    if isinstance(e, IntPow):
        return IntPow(substitute(e.base, mapping), e.n)
    if isinstance(e, Det):
        return Det(e.n, tuple(substitute(a, mapping) for a in e.args))
    raise TypeError(f"not an expression: {e!r}")


def rename(e: Expression, names: Mapping[str, str]) -> Expression:
    return substitute(e, {k: Variable(v) for k, v in names.items()})


# --------------------------------------------------------------------------
# evaluation

def _algebra_of(value):
    if isinstance(value, (WeilElement, MultiWeilElement)):
        return value.spec
    if isinstance(value, float):
        return RingDescriptor.float64()
    if isinstance(value, (int, Fraction)):
        return RingDescriptor.rational()
    if isinstance(value, (Polynomial, RationalFunction)):
        return value.ring
    raise TypeError(f"cannot evaluate over {type(value).__name__}")


def _divide(a, b):
    try:
        if isinstance(b, (int, Fraction, float)) and not isinstance(a, (WeilElement, MultiWeilElement)):
            if b == 0:
                raise NotAUnit("division by zero")
            if isinstance(a, int) and isinstance(b, int):
                return Fraction(a, b)
        if isinstance(b, Polynomial) and not b.is_constant():
            raise NotAUnit(f"polynomial {b.render()} is not a unit")
        return a / b
    except NotAUnit:
        raise
    except (NotInvertible, ZeroDivisionError) as exc:
        raise NotAUnit(str(exc)) from exc


def _sqrt(a):
    if isinstance(a, float):
        if a < 0.0:
            raise UnsupportedOperation(f"sqrt of negative radicand {a!r}")
        return math.sqrt(a)
    if isinstance(a, WeilElement):
        return weil_sqrt(a)
    if isinstance(a, MultiWeilElement):
        return MultiWeilElement(a.spec, [weil_sqrt(p) for p in a.parts])
    raise UnsupportedOperation("sqrt is only available over the float ring")


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        t = rows[0][j] * _det(minor)
        if total is None:
            total = t
        elif j % 2:
            total = total - t
        else:
            total = total + t
    return total


def evaluate(e: Expression, binding: Mapping[str, object], algebra=None):
    """Evaluate over the algebra of the bound values (or ``algebra`` if given)."""
    if algebra is None:
        for v in binding.values():
            algebra = _algebra_of(v)
            break
        else:
            algebra = RingDescriptor.rational()
    cache: dict = {}

    def ev(x):
        key = id(x)
        if key in cache:
            return cache[key][1]
        val = _ev(x)
        cache[key] = (x, val)
        return val

    def _ev(x):
        if isinstance(x, Constant):
            return algebra.const(x.value)
        if isinstance(x, Variable):
            try:
                return binding[x.name]
            except KeyError:
                raise UnboundVariable(f"unbound variable {x.name!r}") from None
        if isinstance(x, Add):
            return ev(x.left) + ev(x.right)
        if isinstance(x, Sub):
            return ev(x.left) - ev(x.right)
        if isinstance(x, Mul):
            return ev(x.left) * ev(x.right)
        if isinstance(x, Div):
            return _divide(ev(x.left), ev(x.right))
        if isinstance(x, Neg):
            return -ev(x.arg)
        if isinstance(x, IntPow):
            b = ev(x.base)
            if x.n == 0:
                return algebra.const(1)
            out = b
            for _ in range(x.n - 1):
                out = out * b
            return out
        if isinstance(x, Sqrt):
            return _sqrt(ev(x.arg))
        if isinstance(x, Det):
            vals = [ev(a) for a in x.args]
            return _det([vals[i * x.n:(i + 1) * x.n] for i in range(x.n)])
        raise TypeError(f"not an expression: {x!r}")

    return ev(e)


# --------------------------------------------------------------------------
# differentiation

def partial_derivative(e: Expression, var: str) -> Expression:
    memo: dict = {}

    def d(x):
        key = id(x)
        if key in memo:
            return memo[key][1]
        out = _d(x)
        memo[key] = (x, out)
        return out

    def _d(x):
        if isinstance(x, Constant):
            return ZERO
        if isinstance(x, Variable):
            return ONE if x.name == var else ZERO
        if isinstance(x, Add):
            return add(d(x.left), d(x.right))
        if isinstance(x, Sub):
            return sub(d(x.left), d(x.right))
        if isinstance(x, Mul):
            return add(mul(d(x.left), x.right), mul(x.left, d(x.right)))
        if isinstance(x, Div):
            dl, dr = d(x.left), d(x.right)
            if _is_const(dr, 0):
                return div(dl, x.right)
            return div(sub(mul(dl, x.right), mul(x.left, dr)), power(x.right, 2))
        if isinstance(x, Neg):
            return neg(d(x.arg))
        if isinstance(x, IntPow):
            db = d(x.base)
            if _is_const(db, 0):
                return ZERO
            return mul(mul(Constant(x.n), power(x.base, x.n - 1)), db)
        if isinstance(x, Sqrt):
            da = d(x.arg)
            if _is_const(da, 0):
                return ZERO
            return div(da, mul(Constant(2), x))
        if isinstance(x, Det):
            n = x.n
            total = ZERO
            for j in range(n):
                col = [d(x.entry(i, j)) for i in range(n)]
                if all(_is_const(c, 0) for c in col):
                    continue
                args = list(x.args)
                for i in range(n):
                    args[i * n + j] = col[i]
                total = add(total, Det(n, tuple(args)))
            return total
        raise TypeError(f"not an expression: {x!r}")

    return d(e)
