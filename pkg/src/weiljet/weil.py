"""Truncated power-series (Weil) algebras over a pluggable coefficient ring.

``WeilSpec(m, r, ring)`` is R[[e1..em]] modulo (e)^(r+1).  A spec may also be
built from several blocks of generators, each with its own truncation order;
that is how tensor products are represented.  Elements are sparse maps from
multi-index to coefficient.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import factorial
from typing import Sequence

from .errors import (
    DivisionByZero,
    NotAUnit,
    NotDivisible,
    NotInvertible,
    NotMonomialTimesUnit,
    SpecMismatch,
    UnsupportedOperation,
)
from .ring import RingDescriptor, _is_scalar, ring_inverse, ring_of


def _nonzero(c) -> bool:
    if isinstance(c, (int, float, Fraction)):
        return c != 0
    return not c.is_zero()


def _multi_indices(m: int, r: int):
    """All alpha in N^m with |alpha| <= r, ascending graded order."""
    out = []
    for d in range(r + 1):
        out.extend(_homogeneous(m, d))
    return out


def _homogeneous(m, d):
    if m == 1:
        return [(d,)]
    res = []
    for first in range(d, -1, -1):
        for rest in _homogeneous(m - 1, d - first):
            res.append((first,) + rest)
    return res


def alpha_factorial(alpha) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


@dataclass(frozen=True)
class WeilSpec:
    m: int
    r: int
    ring: RingDescriptor = field(default_factory=RingDescriptor.rational)
    blocks: tuple = None

    def __post_init__(self):
        if self.blocks is None:
            object.__setattr__(self, "blocks", ((self.m, self.r),))
        blocks = tuple((int(a), int(b)) for a, b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if self.m < 1 or self.r < 0:
            raise ValueError("need m >= 1 and r >= 0")
        if sum(b[0] for b in blocks) != self.m or any(a < 1 or b < 0 for a, b in blocks):
            raise ValueError(f"blocks {blocks} inconsistent with m={self.m}")

    @property
    def single_block(self) -> bool:
        return len(self.blocks) == 1

    @cached_property
    def _slices(self):
        out, start = [], 0
        for mi, ri in self.blocks:
            out.append((start, start + mi, ri))
            start += mi
        return out

    def admissible(self, alpha) -> bool:
        if len(self.blocks) == 1:
            return sum(alpha) <= self.r
        return all(sum(alpha[a:b]) <= ri for a, b, ri in self._slices)

    @cached_property
    def basis(self) -> list:
        parts = [_multi_indices(mi, ri) for mi, ri in self.blocks]
        return [sum(p, ()) for p in product(*parts)]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def nilpotency(self) -> int:
        """Largest total degree of a basis monomial."""
        return sum(ri for _, ri in self.blocks)

    @property
    def zero_index(self) -> tuple:
        return (0,) * self.m

    def const(self, q) -> "WeilElement":
        c = q if not _is_scalar(q) and not isinstance(q, float) else self.ring.const(q)
        return WeilElement(self, {self.zero_index: c})

    def one(self) -> "WeilElement":
        return self.const(1)

    def zero(self) -> "WeilElement":
        return WeilElement(self, {})

    def gen(self, j: int) -> "WeilElement":
        """The j-th nilpotent generator (0-based)."""
        if self.nilpotency == 0:
            return self.zero()
        alpha = tuple(int(i == j) for i in range(self.m))
        if not self.admissible(alpha):
            return self.zero()
        return WeilElement(self, {alpha: self.ring.one()})

    def monomial(self, alpha, coeff=1) -> "WeilElement":
        alpha = tuple(alpha)
        if not self.admissible(alpha):
            return self.zero()
        c = self.ring.const(coeff) if _is_scalar(coeff) or isinstance(coeff, float) else coeff
        return WeilElement(self, {alpha: c})

    def with_order(self, r: int) -> "WeilSpec":
        if not self.single_block:
            raise UnsupportedOperation("order change only for single-block specs")
        return WeilSpec(self.m, r, self.ring)


class WeilElement:
    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: WeilSpec, coeffs=None, *, _trusted=False):
        self.spec = spec
        if _trusted:
            self.coeffs = coeffs
            return
        clean = {}
        for alpha, c in (coeffs or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != spec.m:
                raise ValueError(f"multi-index {alpha} has wrong length for m={spec.m}")
            if not spec.admissible(alpha):
                continue
            if _is_scalar(c) or isinstance(c, float):
                c = spec.ring.const(c)
            if _nonzero(c):
                clean[alpha] = c
        self.coeffs = clean

    @property
    def algebra(self):
        return self.spec

    def coeff(self, alpha):
        return self.coeffs.get(tuple(alpha), self.spec.ring.zero())

    def components(self) -> list:
        """(alpha, coefficient) pairs in ascending graded order, zeros omitted."""
        order = {a: i for i, a in enumerate(self.spec.basis)}
        return sorted(self.coeffs.items(), key=lambda t: order[t[0]])

    def is_zero(self) -> bool:
        return not self.coeffs

    def lowest_degree(self):
        return min((sum(a) for a in self.coeffs), default=None)

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, WeilElement):
            if other.spec != self.spec:
                raise SpecMismatch(f"{self.spec} vs {other.spec}")
            return other
        if isinstance(other, (MultiWeilElement,)):
            return None
        if _is_scalar(other) or isinstance(other, float):
            return self.spec.const(other)
        try:
            if ring_of(other) == self.spec.ring:
                return self.spec.const(other)
        except Exception:
            pass
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for a, c in o.coeffs.items():
            if a in out:
                s = out[a] + c
                if _nonzero(s):
                    out[a] = s
                else:
                    del out[a]
            else:
                out[a] = c
        return WeilElement(self.spec, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return WeilElement(self.spec, {a: -c for a, c in self.coeffs.items()}, _trusted=True)

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

    def scale(self, c) -> "WeilElement":
        out = {}
        for a, v in self.coeffs.items():
            p = v * c
            if _nonzero(p):
                out[a] = p
        return WeilElement(self.spec, out, _trusted=True)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if len(o.coeffs) == 1 and o.spec.zero_index in o.coeffs:
            return self.scale(o.coeffs[o.spec.zero_index])
        if len(self.coeffs) == 1 and self.spec.zero_index in self.coeffs:
            return o.scale(self.coeffs[self.spec.zero_index])
        spec = self.spec
        ok = spec.admissible
        out: dict = {}
        for a1, c1 in self.coeffs.items():
            for a2, c2 in o.coeffs.items():
                a = tuple(x + y for x, y in zip(a1, a2))
                if not ok(a):
                    continue
                p = c1 * c2
                if a in out:
                    out[a] = out[a] + p
                else:
                    out[a] = p
        return WeilElement(spec, {a: c for a, c in out.items() if _nonzero(c)}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = self.spec.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * weil_invert(o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * weil_invert(self)

    def __eq__(self, other):
        if isinstance(other, WeilElement):
            if other.spec != self.spec or self.coeffs.keys() != other.coeffs.keys():
                return False
            return all(self.coeffs[a] == other.coeffs[a] for a in self.coeffs)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self == o

    __hash__ = None

    # rendering -------------------------------------------------------------
    def render(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for alpha, c in self.components():
            cs = self.spec.ring.render(c)
            mono = "*".join(
                f"e{j + 1}" if k == 1 else f"e{j + 1}^{k}" for j, k in enumerate(alpha) if k
            )
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif re.fullmatch(r"[\w.^]+", cs):
                parts.append(f"{cs}*{mono}")
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    def to_json(self) -> list:
        return [{"alpha": list(a), "coeff": self.spec.ring.render(c)} for a, c in self.components()]

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"WeilElement({self.render()!r})"


def weil_add(a: WeilElement, b: WeilElement) -> WeilElement:
    if a.spec != b.spec:
        raise SpecMismatch(f"{a.spec} vs {b.spec}")
    return a + b


def weil_mul(a: WeilElement, b: WeilElement) -> WeilElement:
    if a.spec != b.spec:
        raise SpecMismatch(f"{a.spec} vs {b.spec}")
    return a * b


def valuation(a: WeilElement):
    return a.coeff(a.spec.zero_index)


def weil_invert(a: WeilElement) -> WeilElement:
    """Inverse via a = w(1 - n), a^-1 = w^-1 * sum_{i<=N} n^i with n nilpotent."""
    w = valuation(a)
    try:
        w_inv = ring_inverse(w)
    except NotInvertible as exc:
        raise NotAUnit(f"valuation {a.spec.ring.render(w)} is not invertible") from exc
    one = a.spec.one()
    n = one - a.scale(w_inv)
    acc = one
    for _ in range(a.spec.nilpotency):
        acc = one + n * acc
    return acc.scale(w_inv)


def weil_sqrt(a: WeilElement) -> WeilElement:
    """Square root over the float ring via the binomial series of sqrt(1 + n)."""
    if a.spec.ring.exact:
        raise UnsupportedOperation("sqrt is only available over the float ring")
    w = float(valuation(a))
    if w <= 0.0:
        raise UnsupportedOperation(f"sqrt of non-positive valuation {w}")
    one = a.spec.one()
    n = a.scale(1.0 / w) - one
    acc = one.scale(0.0)
    power = one
    coef = 1.0
    for i in range(a.spec.nilpotency + 1):
        acc = acc + power.scale(coef)
        coef *= (0.5 - i) / (i + 1)
        power = power * n
    return acc.scale(w ** 0.5)


class Endomorphism:
    """Substitution e_j -> images[j]; images must lie in the maximal ideal."""

    def __init__(self, spec: WeilSpec, images: Sequence[WeilElement]):
        if not spec.single_block:
            raise UnsupportedOperation("endomorphisms are defined on single-block specs only")
        images = tuple(images)
        if len(images) != spec.m:
            raise ValueError(f"need {spec.m} generator images, got {len(images)}")
        for im in images:
            if im.spec != spec:
                raise SpecMismatch("generator image from another algebra")
            if _nonzero(valuation(im)):
                raise ValueError("generator images must have zero constant term")
        self.spec = spec
        self.images = images

    @classmethod
    def scaling(cls, spec: WeilSpec, c) -> "Endomorphism":
        return cls(spec, [spec.gen(j).scale(spec.ring.const(c)) for j in range(spec.m)])

    def __call__(self, a: WeilElement) -> WeilElement:
        return apply_endo(self, a)

    def __repr__(self):
        return f"Endomorphism({[im.render() for im in self.images]})"


def apply_endo(sigma: Endomorphism, a: WeilElement) -> WeilElement:
    if a.spec != sigma.spec:
        raise SpecMismatch("endomorphism and element from different algebras")
    spec = a.spec
    powers = []
    for im in sigma.images:
        ps = [spec.one()]
        for _ in range(spec.r):
            ps.append(ps[-1] * im)
        powers.append(ps)
    out = spec.zero()
    for alpha, c in a.coeffs.items():
        term = spec.one()
        for j, k in enumerate(alpha):
            if k:
                term = term * powers[j][k]
        out = out + term.scale(c)
    return out


def truncate(a: WeilElement, r: int) -> WeilElement:
    """Project onto the order-r quotient (single-block specs)."""
    spec = a.spec.with_order(r)
    return WeilElement(spec, {k: v for k, v in a.coeffs.items() if sum(k) <= r}, _trusted=True)


def lift(a: WeilElement, r: int) -> WeilElement:
    """Embed into order r by the zero lift (coefficients copied, nothing added)."""
    spec = a.spec.with_order(r)
    return WeilElement(spec, {k: v for k, v in a.coeffs.items() if sum(k) <= r}, _trusted=True)


def singular_divide(a: WeilElement, b: WeilElement) -> WeilElement:
    """The class of c with b*c = a in A/Ann(b), for b = e^s * unit and m = 1.

    Returns an element of the order r-s algebra.
    """
    if a.spec != b.spec:
        raise SpecMismatch("numerator and denominator from different algebras")
    spec = a.spec
    if spec.m != 1 or not spec.single_block:
        raise UnsupportedOperation("singular division implemented for one generator only")
    if b.is_zero():
        raise DivisionByZero("denominator is zero")
    s = b.lowest_degree()
    lead = b.coeffs[(s,)]
    try:
        ring_inverse(lead)
    except NotInvertible as exc:
        raise NotMonomialTimesUnit(
            f"leading coefficient {spec.ring.render(lead)} of the denominator is not a unit"
        ) from exc
    low = [k for (k,) in a.coeffs if k < s]
    if low:
        raise NotDivisible(f"numerator has a nonzero term of degree {min(low)} below the denominator order {s}")
    reduced = spec.with_order(spec.r - s)
    a_shift = WeilElement(reduced, {(k - s,): c for (k,), c in a.coeffs.items() if k - s <= reduced.r}, _trusted=True)
    u = WeilElement(reduced, {(k - s,): c for (k,), c in b.coeffs.items() if k - s <= reduced.r}, _trusted=True)
    return a_shift * weil_invert(u)


@dataclass(frozen=True)
class TensorProduct:
    """A (x) B as a two-block spec, with the basis isomorphism e^a (x) d^b <-> e^a d^b."""

    spec: WeilSpec
    left_spec: WeilSpec
    right_spec: WeilSpec

    def index(self, alpha, beta) -> tuple:
        return tuple(alpha) + tuple(beta)

    def split(self, gamma) -> tuple:
        m = self.left_spec.m
        return tuple(gamma[:m]), tuple(gamma[m:])

    def left(self, a: WeilElement) -> WeilElement:
        z = (0,) * self.right_spec.m
        return WeilElement(self.spec, {self.index(k, z): c for k, c in a.coeffs.items()}, _trusted=True)

    def right(self, b: WeilElement) -> WeilElement:
        z = (0,) * self.left_spec.m
        return WeilElement(self.spec, {self.index(z, k): c for k, c in b.coeffs.items()}, _trusted=True)

    def pure(self, a: WeilElement, b: WeilElement) -> WeilElement:
        return self.left(a) * self.right(b)

    def slice_left(self, t: WeilElement, alpha) -> WeilElement:
        """Coefficient of e^alpha in t, as an element of B."""
        alpha = tuple(alpha)
        out = {}
        for g, c in t.coeffs.items():
            a, b = self.split(g)
            if a == alpha:
                out[b] = c
        return WeilElement(self.right_spec, out, _trusted=True)


def tensor_product(A: WeilSpec, B: WeilSpec) -> TensorProduct:
    if A.ring != B.ring:
        raise SpecMismatch("tensor factors over different coefficient rings")
    spec = WeilSpec(A.m + B.m, max(A.r, B.r), A.ring, blocks=A.blocks + B.blocks)
    return TensorProduct(spec, A, B)


@dataclass(frozen=True)
class MultiWeilSpec:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("a multi-Weil algebra needs at least one factor")
        if len({f.ring for f in self.factors}) != 1:
            raise SpecMismatch("factors over different coefficient rings")

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def ring(self) -> RingDescriptor:
        return self.factors[0].ring

    def const(self, q) -> "MultiWeilElement":
        return MultiWeilElement(self, tuple(f.const(q) for f in self.factors))

    def one(self):
        return self.const(1)

    def zero(self):
        return self.const(0)


class MultiWeilElement:
    """Element of a finite product of Weil algebras; arithmetic is componentwise."""

    __slots__ = ("spec", "parts")

    def __init__(self, spec: MultiWeilSpec, parts):
        parts = tuple(parts)
        if len(parts) != spec.k or any(p.spec != f for p, f in zip(parts, spec.factors)):
            raise SpecMismatch("parts do not match the factors")
        self.spec = spec
        self.parts = parts

    @property
    def algebra(self):
        return self.spec

    def _coerce(self, other):
        if isinstance(other, MultiWeilElement):
            if other.spec != self.spec:
                raise SpecMismatch("multi-Weil specs differ")
            return other
        if isinstance(other, WeilElement):
            return None
        try:
            return self.spec.const(other)
        except Exception:
            return None

    def _zip(self, other, op):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return MultiWeilElement(self.spec, [op(x, y) for x, y in zip(self.parts, o.parts)])

    def __add__(self, other):
        return self._zip(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._zip(other, lambda x, y: y - x)

    def __mul__(self, other):
        return self._zip(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._zip(other, lambda x, y: x / y)

    def __rtruediv__(self, other):
        return self._zip(other, lambda x, y: y / x)

    def __neg__(self):
        return MultiWeilElement(self.spec, [-p for p in self.parts])

    def __pow__(self, n):
        return MultiWeilElement(self.spec, [p ** n for p in self.parts])

    def __eq__(self, other):
        if not isinstance(other, MultiWeilElement):
            return NotImplemented
        return self.spec == other.spec and all(x == y for x, y in zip(self.parts, other.parts))

    __hash__ = None

    def valuations(self) -> tuple:
        return tuple(valuation(p) for p in self.parts)

    def __repr__(self):
        return f"MultiWeilElement({[p.render() for p in self.parts]})"


def tensor_rk(A: WeilSpec, k: int) -> MultiWeilSpec:
    """A (x) R^k realised as the product A^k."""
    return MultiWeilSpec(tuple([A] * k))


def pushforward(images: Sequence[Endomorphism], a: WeilElement) -> MultiWeilElement:
    """sigma(a) = (sigma_1(a), ..., sigma_k(a)) in A^k."""
    spec = tensor_rk(a.spec, len(images))
    return MultiWeilElement(spec, [apply_endo(s, a) for s in images])


def universal_series(spec: WeilSpec, coeffs: dict) -> WeilElement:
    """sum_alpha coeffs[alpha] * e^alpha / alpha!  (jet coordinate convention)."""
    out = {}
    for alpha, c in coeffs.items():
        f = alpha_factorial(alpha)
        out[tuple(alpha)] = c * Fraction(1, f) if f != 1 else c
    return WeilElement(spec, out)
