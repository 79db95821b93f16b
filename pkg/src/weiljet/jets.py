"""Near-points, prolongation, total derivatives and twisted differentials.

Jet variables follow a fixed naming scheme:

* ``x<i>_p<j>``  coordinate i of point j (joint-invariant inputs),
* ``x<i>_d<o>``  o-th derivative coefficient of coordinate i (rank m = 1),
* ``x<i>_a<a1>_<a2>...``  coefficient x_{i,alpha} for rank m > 1.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Mapping

from .errors import SpecMismatch
from .expr import Constant, Det, Expression, Variable, add, evaluate, free_variables, mul, partial_derivative
from .linalg import exact_det
from .ring import RingDescriptor
from .weil import (
    Endomorphism,
    WeilElement,
    WeilSpec,
    _multi_indices,
    alpha_factorial,
    pushforward,
    singular_divide,
    universal_series,
)

POINT_RE = re.compile(r"x(\d+)_p(\d+)")
JET_RE = re.compile(r"x(\d+)_d(\d+)")
MULTI_RE = re.compile(r"x(\d+)_a(\d+(?:_\d+)*)")


def point_var(i: int, j: int) -> str:
    return f"x{i}_p{j}"


def jet_var(i: int, alpha) -> str:
    if isinstance(alpha, int):
        return f"x{i}_d{alpha}"
    alpha = tuple(alpha)
    if len(alpha) == 1:
        return f"x{i}_d{alpha[0]}"
    return f"x{i}_a" + "_".join(str(a) for a in alpha)


def parse_jet_var(name: str):
    """(i, alpha) for a jet variable name, or None."""
    m = JET_RE.fullmatch(name)
    if m:
        return int(m.group(1)), (int(m.group(2)),)
    m = MULTI_RE.fullmatch(name)
    if m:
        return int(m.group(1)), tuple(int(a) for a in m.group(2).split("_"))
    return None


def jet_variables(n: int, m: int, r: int) -> list:
    return [jet_var(i, a) for i in range(1, n + 1) for a in _multi_indices(m, r)]


@dataclass(frozen=True)
class NearPoint:
    """n coordinate series in one (multi-)Weil algebra."""

    dim: int
    spec: object
    series: tuple

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        if len(self.series) != self.dim:
            raise ValueError(f"need {self.dim} coordinate series")
        if any(s.spec != self.spec for s in self.series):
            raise SpecMismatch("coordinate series from different algebras")

    def coordinates(self) -> dict:
        """Jet coordinates x_{i,alpha} = alpha! * (coefficient of e^alpha)."""
        out = {}
        for i, s in enumerate(self.series, start=1):
            for alpha in self.spec.basis:
                out[jet_var(i, alpha)] = s.coeff(alpha) * alpha_factorial(alpha)
        return out

    def point_binding(self, j: int = 1) -> dict:
        return {point_var(i, j): s for i, s in enumerate(self.series, start=1)}


def jet_from_coordinates(values: Mapping[str, object], n: int, spec: WeilSpec) -> NearPoint:
    """Near-point whose jet coordinates are ``values`` (missing ones are zero)."""
    series = []
    for i in range(1, n + 1):
        coeffs = {}
        for alpha in spec.basis:
            v = values.get(jet_var(i, alpha))
            if v is not None:
                coeffs[alpha] = v
        series.append(universal_series(spec, coeffs))
    return NearPoint(n, spec, tuple(series))


def universal_jet(n: int, m: int, r: int, kind: str = "rational-function") -> NearPoint:
    """The generic jet: series i = sum x_{i,alpha} e^alpha / alpha! over symbolic coordinates."""
    names = jet_variables(n, m, r)
    ring = RingDescriptor(kind, tuple(names))
    spec = WeilSpec(m, r, ring)
    return jet_from_coordinates({v: ring.var(v) for v in names}, n, spec)


def random_jet_values(rng: random.Random, n: int, r: int, m: int = 1, *, exact=True, bound=9, den=5) -> dict:
    out = {}
    for i in range(1, n + 1):
        for alpha in _multi_indices(m, r):
            if exact:
                out[jet_var(i, alpha)] = Fraction(rng.randint(-bound, bound), rng.randint(1, den))
            else:
                out[jet_var(i, alpha)] = rng.uniform(-2.0, 2.0)
    return out


def prolong(f: Expression, p: NearPoint) -> object:
    """f^A(p): evaluate f with coordinate x<i>_p1 bound to the i-th series."""
    return evaluate(f, p.point_binding(1), algebra=p.spec)


def total_derivative(e: Expression, j: int = 0, m: int = 1) -> Expression:
    """Formal derivation shifting each coefficient x_{i,alpha} to x_{i,alpha+e_j}."""
    out = None
    for name in sorted(free_variables(e)):
        parsed = parse_jet_var(name)
        if parsed is None:
            continue
        i, alpha = parsed
        if len(alpha) != m:
            raise ValueError(f"{name} is not a rank-{m} jet variable")
        shifted = tuple(a + (k == j) for k, a in enumerate(alpha))
        term = mul(partial_derivative(e, name), Variable(jet_var(i, shifted)))
        out = term if out is None else add(out, term)
    return out if out is not None else Constant(0)


@dataclass(frozen=True)
class TwistSpec:
    endos: tuple

    def __post_init__(self):
        object.__setattr__(self, "endos", tuple(self.endos))
        if not self.endos:
            raise ValueError("a twist needs at least one endomorphism")
        if len({e.spec for e in self.endos}) != 1:
            raise SpecMismatch("endomorphisms of different algebras")

    @property
    def k(self) -> int:
        return len(self.endos)

    @property
    def spec(self) -> WeilSpec:
        return self.endos[0].spec

    @classmethod
    def scaling(cls, spec: WeilSpec, *cs) -> "TwistSpec":
        return cls(tuple(Endomorphism.scaling(spec, c) for c in cs))


@dataclass
class DerivationResult:
    element: WeilElement
    order: int
    reduced_order: int | None = None
    components: list = field(init=False)

    def __post_init__(self):
        self.components = self.element.components()

    def lowest(self):
        return self.components[0] if self.components else None

    def coefficient(self, j):
        alpha = (j,) if isinstance(j, int) else tuple(j)
        return self.element.coeff(alpha)

    def to_json(self) -> dict:
        ring = self.element.spec.ring
        comps = []
        for alpha, c in self.components:
            comps.append(
                {
                    "eps_power": alpha[0] if len(alpha) == 1 else list(alpha),
                    "coefficient": ring.render(c),
                    "factorial_scaled": ring.render(c * alpha_factorial(alpha)),
                }
            )
        return {"order": self.order, "reduced_order": self.reduced_order, "components": comps}


def _check_point_vars(I: Expression, n: int, k: int):
    for name in free_variables(I):
        m = POINT_RE.fullmatch(name)
        if not m or not (1 <= int(m.group(1)) <= n and 1 <= int(m.group(2)) <= k):
            raise ValueError(f"variable {name!r} is not a coordinate x<i>_p<j> with i <= {n}, j <= {k}")


def twisted_binding(tw: TwistSpec, p: NearPoint) -> dict:
    """x<i>_p<j> -> tau_j(series_i): the k components of sigma_* p in A^k = (M^k)(A)."""
    binding = {}
    for i, s in enumerate(p.series, start=1):
        pushed = pushforward(tw.endos, s)
        for j, part in enumerate(pushed.parts, start=1):
            binding[point_var(i, j)] = part
    return binding


def twisted_differential(I: Expression, tw: TwistSpec, p: NearPoint) -> DerivationResult:
    if tw.spec != p.spec:
        raise SpecMismatch("twist and near-point over different algebras")
    _check_point_vars(I, p.dim, tw.k)
    value = evaluate(I, twisted_binding(tw, p), algebra=p.spec)
    return DerivationResult(value, p.spec.r)


def singular_twisted_quotient(I: Expression, J: Expression, tw: TwistSpec, p: NearPoint) -> DerivationResult:
    num = twisted_differential(I, tw, p).element
    den = twisted_differential(J, tw, p).element
    q = singular_divide(num, den)
    return DerivationResult(q, p.spec.r, reduced_order=q.spec.r)


def lambda_constant(n: int) -> Fraction:
    if n < 1:
        raise ValueError("n >= 1")
    rows = [[i ** j for j in range(1, n + 1)] for i in range(1, n + 1)]
    return exact_det(rows) / prod(factorial(k) for k in range(1, n + 1))


def wronskian(n: int) -> Expression:
    """det[x<i>_d<j>] for i, j = 1..n (n <= 4 as an expression)."""
    if n == 1:
        return Variable("x1_d1")
    return Det(n, tuple(Variable(jet_var(i, j)) for i in range(1, n + 1) for j in range(1, n + 1)))


