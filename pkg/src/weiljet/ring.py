"""Coefficient rings: float64, exact rationals, sparse polynomials and
unreduced rational functions over a fixed tuple of variable names.

Polynomial and RationalFunction support the Python arithmetic operators with
each other's own kind and with int/Fraction scalars.  The ``ring_*`` functions
are the strict entry points: they refuse to mix descriptors.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import NotInvertible, RingMismatch, UnknownVariable

FLOAT = "float64"
RATIONAL = "rational"
POLYNOMIAL = "polynomial"
RATIONAL_FUNCTION = "rational-function"
KINDS = (FLOAT, RATIONAL, POLYNOMIAL, RATIONAL_FUNCTION)


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _order_key(exp):
    # graded lexicographic; larger key = larger monomial
    return (sum(exp), exp)


def _fmt_coeff(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Polynomial:
    """Sparse multivariate polynomial with exact rational coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple, Fraction] | None = None, *, _trusted=False):
        self.vars = tuple(vars)
        if _trusted:
            self.terms = terms
        else:
            n = len(self.vars)
            clean = {}
            for exp, c in (terms or {}).items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != n or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent vector {exp} for {n} variables")
                c = Fraction(c)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
            self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, vars, q) -> "Polynomial":
        vars = tuple(vars)
        q = Fraction(q)
        return cls(vars, {(0,) * len(vars): q} if q else {}, _trusted=True)

    @classmethod
    def var(cls, vars, name: str) -> "Polynomial":
        vars = tuple(vars)
        if name not in vars:
            raise UnknownVariable(f"unknown variable {name!r}")
        exp = tuple(int(v == name) for v in vars)
        return cls(vars, {exp: Fraction(1)}, _trusted=True)

    @property
    def ring(self) -> "RingDescriptor":
        return RingDescriptor(POLYNOMIAL, self.vars)

    # predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _order_key(t[0]), reverse=True)

    def leading(self):
        return max(self.terms.items(), key=lambda t: _order_key(t[0]))

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.vars != self.vars:
                raise RingMismatch(f"polynomials over {self.vars} and {other.vars}")
            return other
        if _is_scalar(other):
            return Polynomial.const(self.vars, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in o.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Polynomial(self.vars, terms, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            q = Fraction(other)
            if not q:
                return Polynomial(self.vars, {}, _trusted=True)
            return Polynomial(self.vars, {e: c * q for e, c in self.terms.items()}, _trusted=True)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, 0) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial(self.vars, terms, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Polynomial.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if _is_scalar(other) or (isinstance(other, Polynomial) and other.is_constant()):
            q = Fraction(other) if _is_scalar(other) else self._coerce(other).constant_value()
            if not q:
                raise NotInvertible("division by zero polynomial")
            return self * (1 / q)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self.terms == other.terms
        if _is_scalar(other):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # calculus and evaluation --------------------------------------------
    def partial(self, name: str) -> "Polynomial":
        if name not in self.vars:
            raise UnknownVariable(f"unknown variable {name!r}")
        k = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                terms[ne] = c * e[k]
        return Polynomial(self.vars, terms, _trusted=True)

    def evaluate(self, values: Mapping[str, object]):
        """Substitute every variable; values may live in any commutative ring."""
        vals = [values[v] for v in self.vars]
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * v ** k
            total = total + t
        return total

    def content(self) -> Fraction:
        """Positive rational g with self/g having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def monomial_gcd(self) -> tuple:
        if not self.terms:
            return (0,) * len(self.vars)
        it = iter(self.terms)
        g = list(next(it))
        for e in it:
            g = [min(a, b) for a, b in zip(g, e)]
        return tuple(g)

    def divide_monomial(self, exp) -> "Polynomial":
        return Polynomial(
            self.vars, {tuple(a - b for a, b in zip(e, exp)): c for e, c in self.terms.items()}, _trusted=True
        )

    def exact_div(self, other: "Polynomial"):
        """Return q with q*other == self, or None if other does not divide self."""
        if other.is_zero():
            raise NotInvertible("division by zero polynomial")
        lt_e, lt_c = other.leading()
        rem = self
        quot: dict = {}
        while not rem.is_zero():
            e, c = rem.leading()
            if any(a < b for a, b in zip(e, lt_e)):
                return None
            qe = tuple(a - b for a, b in zip(e, lt_e))
            qc = c / lt_c
            quot[qe] = qc
            rem = rem - Polynomial(self.vars, {qe: qc}, _trusted=True) * other
        return Polynomial(self.vars, quot, _trusted=True)

    # rendering -------------------------------------------------------------
    def _monomial_str(self, exp) -> str:
        parts = []
        for v, k in zip(self.vars, exp):
            if k == 1:
                parts.append(v)
            elif k > 1:
                parts.append(f"{v}^{k}")
        return "*".join(parts)

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            mono = self._monomial_str(e)
            mag = abs(c)
            if not mono:
                body = _fmt_coeff(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_fmt_coeff(mag)}*{mono}"
            if i == 0:
                out.append(f"-{body}" if c < 0 else body)
            else:
                out.append(f" - {body}" if c < 0 else f" + {body}")
        return "".join(out)

    def num_terms(self) -> int:
        return len(self.terms)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Polynomial({self.render()!r})"


class RationalFunction:
    """Quotient num/den of polynomials, kept unreduced.

    Constructors cancel the monomial gcd and make the denominator's leading
    coefficient 1; no polynomial gcd is ever computed.  Equality is decided by
    cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.const(num.vars, 1)
        if num.vars != den.vars:
            raise RingMismatch("numerator and denominator over different variables")
        if den.is_zero():
            raise NotInvertible("zero denominator")
        if num.is_zero():
            self.num, self.den = num, Polynomial.const(num.vars, 1)
            return
        if not den.is_constant():
            g = tuple(min(a, b) for a, b in zip(num.monomial_gcd(), den.monomial_gcd()))
            if any(g):
                num, den = num.divide_monomial(g), den.divide_monomial(g)
        lc = den.leading()[1]
        if lc != 1:
            inv = 1 / lc
            num, den = num * inv, den * inv
        self.num, self.den = num, den

    @classmethod
    def const(cls, vars, q) -> "RationalFunction":
        return cls(Polynomial.const(vars, q))

    @classmethod
    def var(cls, vars, name) -> "RationalFunction":
        return cls(Polynomial.var(vars, name))

    @property
    def vars(self):
        return self.num.vars

    @property
    def ring(self) -> "RingDescriptor":
        return RingDescriptor(RATIONAL_FUNCTION, self.vars)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.vars != self.vars:
                raise RingMismatch(f"rational functions over {self.vars} and {other.vars}")
            return other
        if _is_scalar(other):
            return RationalFunction.const(self.vars, other)
        if isinstance(other, Polynomial):
            if other.vars != self.vars:
                raise RingMismatch("rational function and polynomial over different variables")
            return RationalFunction(other)
        return None

    def _den_one(self) -> bool:
        return self.den.is_constant()

    def __add__(self, other):
        if _is_scalar(other):
            return RationalFunction(self.num + self.den * other, self.den)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            return RationalFunction(self.num * other, self.den)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._den_one() and o._den_one():
            return RationalFunction(self.num * o.num, self.den)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise NotInvertible("zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        return RationalFunction(self.num ** n, self.den ** n)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, RationalFunction) else other
        if o is None:
            return NotImplemented
        if o.vars != self.vars:
            return False
        if self.den == o.den:
            return self.num == o.num
        return self.num * o.den == o.num * self.den

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    def partial(self, name: str) -> "RationalFunction":
        dn, dd = self.num.partial(name), self.den.partial(name)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, values: Mapping[str, object]):
        return self.num.evaluate(values) / self.den.evaluate(values)

    def reduced(self) -> "RationalFunction":
        """Cancel the denominator entirely when it divides the numerator."""
        if self.den.is_constant():
            return self
        q = self.num.exact_div(self.den)
        if q is not None:
            return RationalFunction(q)
        return self

    def as_polynomial(self) -> Polynomial | None:
        r = self.reduced()
        if r.den.is_constant():
            return r.num * (1 / r.den.constant_value())
        return None

    def render(self) -> str:
        r = self.reduced()
        num, den = r.num, r.den
        if num.is_zero():
            return "0"
        # integer coefficients, overall content 1, denominator leading coefficient > 0
        g_num, g_den = num.content(), den.content()
        ratio = g_num / g_den
        num = num * (ratio.numerator / g_num)
        den = den * (ratio.denominator / g_den)
        if den.leading()[1] < 0:
            num, den = -num, -den
        if den.is_constant() and den.constant_value() == 1:
            return num.render()
        ns = num.render()
        if num.num_terms() > 1:
            ns = f"({ns})"
        ds = den.render()
        single = den.num_terms() == 1
        if not single or "*" in ds:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"RationalFunction({self.render()!r})"


@dataclass(frozen=True)
class RingDescriptor:
    kind: str
    vars: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ring kind {self.kind!r}")
        object.__setattr__(self, "vars", tuple(self.vars))
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("variable names must be unique")
        if self.kind in (FLOAT, RATIONAL) and self.vars:
            raise ValueError(f"{self.kind} ring takes no variables")

    @classmethod
    def float64(cls):
        return cls(FLOAT)

    @classmethod
    def rational(cls):
        return cls(RATIONAL)

    @classmethod
    def polynomial(cls, vars: Iterable[str]):
        return cls(POLYNOMIAL, tuple(vars))

    @classmethod
    def rational_function(cls, vars: Iterable[str]):
        return cls(RATIONAL_FUNCTION, tuple(vars))

    @property
    def exact(self) -> bool:
        return self.kind != FLOAT

    def const(self, q):
        if self.kind == FLOAT:
            return float(q)
        if self.kind == RATIONAL:
            return Fraction(q)
        if self.kind == POLYNOMIAL:
            return Polynomial.const(self.vars, q)
        return RationalFunction.const(self.vars, q)

    def zero(self):
        return self.const(0)

    def one(self):
        return self.const(1)

    def var(self, name: str):
        if self.kind == POLYNOMIAL:
            return Polynomial.var(self.vars, name)
        if self.kind == RATIONAL_FUNCTION:
            return RationalFunction.var(self.vars, name)
        raise UnknownVariable(f"{self.kind} ring has no variables")

    def contains(self, x) -> bool:
        try:
            return ring_of(x) == self
        except RingMismatch:
            return False

    def is_zero(self, x) -> bool:
        if self.kind in (FLOAT, RATIONAL):
            return x == 0
        return x.is_zero()

    def render(self, x) -> str:
        if self.kind == FLOAT:
            return repr(float(x))
        if self.kind == RATIONAL:
            return _fmt_coeff(Fraction(x))
        return x.render()


def ring_of(x) -> RingDescriptor:
    if isinstance(x, bool):
        raise RingMismatch("booleans are not ring elements")
    if isinstance(x, float):
        return RingDescriptor(FLOAT)
    if isinstance(x, (int, Fraction)) or (isinstance(x, Rational) and not isinstance(x, float)):
        return RingDescriptor(RATIONAL)
    if isinstance(x, Polynomial):
        return RingDescriptor(POLYNOMIAL, x.vars)
    if isinstance(x, RationalFunction):
        return RingDescriptor(RATIONAL_FUNCTION, x.vars)
    raise RingMismatch(f"{type(x).__name__} is not a ring element")


def _same_ring(a, b) -> RingDescriptor:
    ra, rb = ring_of(a), ring_of(b)
    if ra != rb:
        raise RingMismatch(f"operands from {ra.kind}{list(ra.vars) or ''} and {rb.kind}{list(rb.vars) or ''}")
    return ra


def ring_add(a, b):
    _same_ring(a, b)
    return a + b


def ring_mul(a, b):
    _same_ring(a, b)
    return a * b


def ring_neg(a):
    ring_of(a)
    return -a


def ring_eq(a, b) -> bool:
    _same_ring(a, b)
    return a == b


def ring_inverse(a):
    r = ring_of(a)
    if r.kind == FLOAT:
        if a == 0.0:
            raise NotInvertible("float zero")
        return 1.0 / a
    if r.kind == RATIONAL:
        if a == 0:
            raise NotInvertible("rational zero")
        return 1 / Fraction(a)
    if r.kind == POLYNOMIAL:
        if a.is_zero() or not a.is_constant():
            raise NotInvertible(f"polynomial {a.render()} is not a unit")
        return Polynomial.const(a.vars, 1 / a.constant_value())
    return a.inverse()


def poly_partial(p: Polynomial, var: str) -> Polynomial:
    return p.partial(var)
