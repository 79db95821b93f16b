"""Group actions, prolonged actions on jets, invariance checks and generator ranks."""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .errors import BasePointSingular, NotAUnit, SamplerExhausted, UnsupportedOperation
from .expr import Expression, Variable, evaluate, free_variables, parse, render
from .jets import (
    NearPoint,
    jet_from_coordinates,
    parse_jet_var,
    point_var,
    random_jet_values,
)
from .linalg import exact_rank
from .ring import RingDescriptor
from .weil import WeilElement, WeilSpec, alpha_factorial, tensor_product


def _rand_q(rng: random.Random, bound=5, den=4) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, den))


@dataclass
class GroupAction:
    """Action x -> action(x; params) on R^n with its infinitesimal generators.

    ``directions[g]`` is the tangent vector in parameter space (param -> coefficient)
    whose flow at the identity produces generator g.  ``sampler(rng, exact)``
    returns parameter values of a random group element.
    """

    name: str
    dim_M: int
    params: tuple
    identity: tuple
    action: tuple
    generators: tuple
    directions: tuple | None = None
    sampler: Callable | None = None

    def __post_init__(self):
        self.params = tuple(self.params)
        self.identity = tuple(Fraction(v) for v in self.identity)
        self.action = tuple(parse(a) if isinstance(a, str) else a for a in self.action)
        self.generators = tuple(
            tuple(parse(c) if isinstance(c, str) else c for c in g) for g in self.generators
        )
        if len(self.action) != self.dim_M or any(len(g) != self.dim_M for g in self.generators):
            raise ValueError("action and generators need dim_M components")
        if len(self.identity) != len(self.params):
            raise ValueError("identity needs one value per parameter")
        allowed = {point_var(i, 1) for i in range(1, self.dim_M + 1)}
        for a in self.action:
            extra = free_variables(a) - allowed - set(self.params)
            if extra:
                raise ValueError(f"action uses unknown names {sorted(extra)}")
        for g in self.generators:
            for c in g:
                if free_variables(c) - allowed:
                    raise ValueError("generators may only use x<i>_p1")

    @property
    def dim_G(self) -> int:
        return len(self.generators)

    def identity_params(self) -> dict:
        return dict(zip(self.params, self.identity))

    def sample(self, rng: random.Random, exact: bool = True) -> dict:
        if self.sampler is not None:
            vals = self.sampler(rng)
        else:
            vals = {p: v + _rand_q(rng, 3, 4) for p, v in self.identity_params().items()}
        if not exact:
            vals = {k: float(v) for k, v in vals.items()}
        return vals

    def to_fixture(self) -> dict:
        out = {
            "name": self.name,
            "dim_M": self.dim_M,
            "params": list(self.params),
            "identity": [str(v) for v in self.identity],
            "action": [render(a) for a in self.action],
            "generators": [[render(c) for c in g] for g in self.generators],
        }
        if self.directions is not None:
            out["directions"] = [{k: str(v) for k, v in d.items()} for d in self.directions]
        return out


def mov(n: int) -> GroupAction:
    """Euclidean motions of R^n: a product of Givens rotations followed by a translation."""
    if n < 1:
        raise ValueError("n >= 1")
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    v = [Variable(point_var(i, 1)) for i in range(1, n + 1)]
    for i, j in reversed(pairs):
        c, s = Variable(f"c{i}{j}"), Variable(f"s{i}{j}")
        vi, vj = v[i - 1], v[j - 1]
        v[i - 1] = c * vi - s * vj
        v[j - 1] = s * vi + c * vj
    action = [v[i] + Variable(f"t{i + 1}") for i in range(n)]
    params = [f"t{i}" for i in range(1, n + 1)]
    identity = [0] * n
    for i, j in pairs:
        params += [f"c{i}{j}", f"s{i}{j}"]
        identity += [1, 0]
    gens, dirs = [], []
    for k in range(1, n + 1):
        gens.append(["1" if i == k else "0" for i in range(1, n + 1)])
        dirs.append({f"t{k}": Fraction(1)})
    for i, j in pairs:
        comp = ["0"] * n
        comp[i - 1] = f"-{point_var(j, 1)}"
        comp[j - 1] = point_var(i, 1)
        gens.append(comp)
        dirs.append({f"s{i}{j}": Fraction(1)})

    def sampler(rng):
        vals = {f"t{k}": _rand_q(rng) for k in range(1, n + 1)}
        for i, j in pairs:
            u = _rand_q(rng, 4, 3)
            vals[f"c{i}{j}"] = (1 - u * u) / (1 + u * u)
            vals[f"s{i}{j}"] = 2 * u / (1 + u * u)
        return vals

    return GroupAction(f"mov:{n}", n, params, identity, action, gens, tuple(dirs), sampler)


def aff1() -> GroupAction:
    def sampler(rng):
        lam = Fraction(0)
        while lam == 0:
            lam = _rand_q(rng)
        return {"lam": lam, "mu": _rand_q(rng)}

    return GroupAction(
        "aff1", 1, ("lam", "mu"), (1, 0), ["lam*x1_p1 + mu"], [["1"], ["x1_p1"]],
        ({"mu": Fraction(1)}, {"lam": Fraction(1)}), sampler,
    )


def pgl2() -> GroupAction:
    def sampler(rng):
        while True:
            a, b, c, d = (_rand_q(rng) for _ in range(4))
            if a * d - b * c != 0:
                return {"a": a, "b": b, "c": c, "d": d}

    # perturbing c by -delta at the identity gives x -> x + delta*x^2
    return GroupAction(
        "pgl2", 1, ("a", "b", "c", "d"), (1, 0, 0, 1), ["(a*x1_p1 + b)/(c*x1_p1 + d)"],
        [["1"], ["x1_p1"], ["x1_p1^2"]],
        ({"b": Fraction(1)}, {"a": Fraction(1)}, {"c": Fraction(-1)}), sampler,
    )


def load_fixture(source) -> GroupAction:
    """Build an action from the JSON fixture format (path, JSON text or dict)."""
    if isinstance(source, (str, Path)) and Path(str(source)).exists():
        data = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        data = json.loads(source)
    else:
        data = dict(source)
    dirs = data.get("directions")
    if dirs is not None:
        dirs = tuple({k: Fraction(v) for k, v in d.items()} for d in dirs)
    return GroupAction(
        data["name"], int(data["dim_M"]), data["params"], [Fraction(v) for v in data["identity"]],
        data["action"], data["generators"], dirs,
    )


def get_action(name: str) -> GroupAction:
    if name.startswith("@"):
        return load_fixture(Path(name[1:]))
    if name.startswith("mov:"):
        return mov(int(name.split(":", 1)[1]))
    if name == "aff1":
        return aff1()
    if name == "pgl2":
        return pgl2()
    raise ValueError(f"unknown group {name!r}")


# --------------------------------------------------------------------------
# prolonged action

def prolonged_action(g: Mapping[str, object], p: NearPoint, action: GroupAction) -> NearPoint:
    """Image jet g.p, computed by evaluating the action map over the jet's algebra."""
    spec = p.spec
    binding = p.point_binding(1)
    for name in action.params:
        v = g[name]
        binding[name] = v if isinstance(v, WeilElement) else spec.const(v)
    try:
        image = [evaluate(a, binding, algebra=spec) for a in action.action]
    except NotAUnit as exc:
        raise BasePointSingular(f"action of {action.name} is singular at the base point: {exc}") from exc
    return NearPoint(p.dim, spec, tuple(image))


def _check_jet_vars(cand: Expression, n: int, r: int):
    for name in free_variables(cand):
        parsed = parse_jet_var(name)
        if parsed is None or not (1 <= parsed[0] <= n) or len(parsed[1]) != 1 or parsed[1][0] > r:
            raise ValueError(f"{name!r} is not a jet variable x<i>_d<o> with i <= {n}, o <= {r}")


def _deviation(before, after, exact: bool):
    if exact:
        return abs(Fraction(after) - Fraction(before))
    scale = max(abs(before), abs(after))
    return 0.0 if scale == 0 else abs(after - before) / scale


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


@dataclass
class InvarianceReport:
    invariant: bool
    samples: int
    ring: str
    max_deviation: object
    rejections: int
    witness: dict | None = None

    def to_json(self) -> dict:
        return {
            "verdict": "invariant" if self.invariant else "not-invariant",
            "samples": self.samples,
            "ring": self.ring,
            "max_deviation": _jsonable(self.max_deviation),
            "rejections": self.rejections,
            "witness": self.witness,
        }


def check_invariant(
    cand: Expression,
    action: GroupAction,
    r: int,
    samples: int = 100,
    tol: float = 0.0,
    seed: int = 0,
    ring: str = "rational",
) -> InvarianceReport:
    """Compare cand(jet) with cand(g.jet) at random jets and group elements.

    Each sample draws from its own generator seeded by (seed, index), so the
    report depends only on (seed, samples).
    """
    exact = ring != "float"
    desc = RingDescriptor.rational() if exact else RingDescriptor.float64()
    spec = WeilSpec(1, r, desc)
    n = action.dim_M
    _check_jet_vars(cand, n, r)
    worst = Fraction(0) if exact else 0.0
    witness = None
    rejections = 0
    for i in range(samples):
        rng = random.Random(f"{seed}/{i}")
        while True:
            if rejections > 100 * samples:
                raise SamplerExhausted(f"{rejections} rejected samples for {action.name}")
            values = random_jet_values(rng, n, r, exact=exact)
            params = action.sample(rng, exact=exact)
            try:
                before = evaluate(cand, values, algebra=desc)
                image = prolonged_action(params, jet_from_coordinates(values, n, spec), action)
                after = evaluate(cand, image.coordinates(), algebra=desc)
            except (NotAUnit, BasePointSingular, UnsupportedOperation):
                rejections += 1
                continue
            break
        dev = _deviation(before, after, exact)
        if witness is None or dev > worst:
            worst = dev
            witness = {
                "sample": i,
                "jet": {k: _jsonable(v) for k, v in values.items()},
                "params": {k: _jsonable(v) for k, v in params.items()},
                "before": _jsonable(before),
                "after": _jsonable(after),
            }
    ok = worst == 0 if exact else worst <= tol
    return InvarianceReport(ok, samples, ring, worst, rejections, None if ok else witness)


def infinitesimal_invariance(
    cand: Expression, action: GroupAction, generator: int, r: int, jet: NearPoint, route: str = "auto"
):
    """delta-coefficient of cand at the jet moved along one generator.

    The jet lives in A; the motion is an A (x) R[delta]/(delta^2)-valued
    near-point.  ``route="params"`` perturbs the identity parameters along the
    generator's direction, ``route="field"`` uses x + delta * xi(x).
    """
    A = jet.spec
    D = WeilSpec(1, 1, A.ring)
    T = tensor_product(A, D)
    delta = T.right(D.gen(0))
    lifted = NearPoint(jet.dim, T.spec, tuple(T.left(s) for s in jet.series))
    if route == "auto":
        route = "params" if action.directions is not None else "field"
    if route == "params":
        direction = action.directions[generator]
        g = {}
        for name, v in action.identity_params().items():
            g[name] = T.spec.const(v) + delta.scale(A.ring.const(direction.get(name, 0)))
        image = prolonged_action(g, lifted, action).series
    elif route == "field":
        binding = lifted.point_binding(1)
        xi = action.generators[generator]
        image = tuple(
            s + delta * evaluate(c, binding, algebra=T.spec) for s, c in zip(lifted.series, xi)
        )
    else:
        raise ValueError(f"unknown route {route!r}")
    coords = {}
    for i, s in enumerate(image, start=1):
        for o in range(A.r + 1):
            coords[f"x{i}_d{o}"] = T.slice_left(s, (o,)).scale(A.ring.const(alpha_factorial((o,))))
    _check_jet_vars(cand, jet.dim, A.r)
    value = evaluate(cand, coords, algebra=D)
    return value.coeff((1,))


def generator_mismatch(action: GroupAction, samples: int = 10, seed: int = 0) -> Fraction:
    """Max |xi_g(x) - d/dt action(identity + t*direction_g)(x)| at random rational points."""
    if action.directions is None:
        raise ValueError(f"{action.name} has no parameter directions")
    D = WeilSpec(1, 1, RingDescriptor.rational())
    worst = Fraction(0)
    for s in range(samples):
        rng = random.Random(f"gen/{seed}/{s}")
        x = {point_var(i, 1): _rand_q(rng, 9, 5) for i in range(1, action.dim_M + 1)}
        for g, direction in enumerate(action.directions):
            binding = {k: D.const(v) for k, v in x.items()}
            for name, v in action.identity_params().items():
                binding[name] = D.const(v) + D.gen(0).scale(Fraction(direction.get(name, 0)))
            for comp, xi in zip(action.action, action.generators[g]):
                moved = evaluate(comp, binding, algebra=D).coeff((1,))
                worst = max(worst, abs(moved - evaluate(xi, x, algebra=RingDescriptor.rational())))
    return worst


# --------------------------------------------------------------------------
# ranks

@dataclass
class RankRow:
    k: int
    rank: int
    invariant_count: int
    attained: float

    def to_json(self):
        return {"k": self.k, "rank": self.rank, "invariant_count": self.invariant_count, "attained": self.attained}


@dataclass
class RankReport:
    group: str
    dim_G: int
    dim_M: int
    samples: int
    rows: list
    k0_estimate: int | None
    bounds: tuple
    notes: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def row(self, k: int) -> RankRow:
        return self.rows[k - 1]

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "dim_G": self.dim_G,
            "dim_M": self.dim_M,
            "samples": self.samples,
            "rows": [r.to_json() for r in self.rows],
            "k0_estimate": self.k0_estimate,
            "bounds": list(self.bounds),
            "notes": self.notes,
            "warnings": self.warnings,
        }


def generator_matrix(action: GroupAction, points: Sequence[Mapping[str, Fraction]]) -> list:
    """dim_G x (k*n) matrix of generator components at the given points."""
    desc = RingDescriptor.rational()
    rows = []
    for gen in action.generators:
        row = []
        for pt in points:
            row.extend(evaluate(c, pt, algebra=desc) for c in gen)
        rows.append(row)
    return rows


def rank_analysis(action: GroupAction, k_max: int, samples: int = 20, seed: int = 0) -> RankReport:
    if k_max < 1:
        raise ValueError("k_max >= 1")
    n, dg = action.dim_M, action.dim_G
    rows, warnings = [], []
    for k in range(1, k_max + 1):
        ranks = []
        for s in range(samples):
            rng = random.Random(f"rank/{seed}/{k}/{s}")
            pts = [{point_var(i, 1): _rand_q(rng, 20, 7) for i in range(1, n + 1)} for _ in range(k)]
            ranks.append(exact_rank(generator_matrix(action, pts)))
        best = max(ranks)
        frac = ranks.count(best) / len(ranks)
        if frac < 0.9:
            warnings.append(f"k={k}: only {frac:.0%} of samples reach rank {best}; sampling may be non-generic")
        rows.append(RankRow(k, best, k * n - best, frac))
    k0 = next((r.k for r in rows if r.rank == dg), None)
    bounds = (math.ceil(dg / n), dg)
    notes = [
        "k0 bounds: k*dim_M >= dim_G is necessary for a trivial stabilizer algebra and "
        "k = dim_G always suffices, so ceil(dim_G/dim_M) <= k0 <= dim_G "
        "(the reversed inequality dim_G/dim_M >= k0 >= dim_G cannot hold when dim_M > 1)"
    ]
    return RankReport(action.name, dg, n, samples, rows, k0, bounds, notes, warnings)


# --------------------------------------------------------------------------
# identities between joint invariants

@dataclass
class IdentityReport:
    passed: bool
    samples: int
    tol: float
    max_deviation: float
    rejections: int
    witness: dict | None = None

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "samples": self.samples,
            "tol": self.tol,
            "max_deviation": self.max_deviation,
            "rejections": self.rejections,
            "witness": self.witness,
        }


class Reject(Exception):
    """Raised by samplers for configurations outside the open set."""


def general_position_sampler(n: int, k: int, min_ratio: float = 1e-6, box: float = 1.0):
    """Uniform points in [-box, box]^n; for k = n+1 rejects near-degenerate simplices."""

    def sample(rng: random.Random) -> dict:
        pts = [[rng.uniform(-box, box) for _ in range(n)] for _ in range(k)]
        if k == n + 1:
            scale = max(math.dist(p, q) for p in pts for q in pts)
            m = [[pts[j][i] - pts[0][i] for j in range(1, k)] for i in range(n)]
            vol = abs(_float_det(m))
            if scale == 0 or vol < min_ratio * scale ** n:
                raise Reject
        return {point_var(i + 1, j + 1): pts[j][i] for j in range(k) for i in range(n)}

    return sample


def _float_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _float_det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(n))


def evaluate_pair(lhs: Expression, rhs: Expression, binding: Mapping[str, float]):
    desc = RingDescriptor.float64()
    return evaluate(lhs, binding, algebra=desc), evaluate(rhs, binding, algebra=desc)


def identity_check(
    lhs: Expression, rhs: Expression, sampler: Callable, samples: int = 1000, tol: float = 1e-9, seed: int = 0
) -> IdentityReport:
    worst = 0.0
    witness = None
    rejections = 0
    for i in range(samples):
        rng = random.Random(f"identity/{seed}/{i}")
        while True:
            if rejections > 100 * samples:
                raise SamplerExhausted(f"{rejections} rejected samples")
            try:
                binding = sampler(rng)
                a, b = evaluate_pair(lhs, rhs, binding)
            except (Reject, UnsupportedOperation, NotAUnit):
                rejections += 1
                continue
            break
        dev = _deviation(a, b, exact=False)
        if witness is None or dev > worst:
            worst = dev
            witness = {"sample": i, "binding": binding, "lhs": a, "rhs": b}
    ok = worst <= tol
    return IdentityReport(ok, samples, tol, worst, rejections, None if ok else witness)
