"""Named configurations for the worked examples."""
from __future__ import annotations

from dataclasses import dataclass, field

from .jets import point_var


@dataclass(frozen=True)
class DerivePreset:
    expr: str
    points: int
    dim: int
    jet_order: int
    twist: tuple
    quotient: bool = False
    # invariant the derivation is expected to produce, and the group it is invariant under
    invariant: str = ""
    group: str = ""
    check_order: int = 0


def _diff(i, j, k):
    return f"{point_var(i, j)} - {point_var(i, k)}"


def volume_expr(n: int) -> str:
    """det(p2 - p1, ..., p_{n+1} - p1) with columns indexed by point."""
    entries = [_diff(i, j, 1) for i in range(1, n + 1) for j in range(2, n + 2)]
    if n == 1:
        return entries[0]
    return f"det{n}(" + ", ".join(entries) + ")"


def wronskian_text(n: int) -> str:
    if n == 1:
        return "x1_d1"
    return f"det{n}(" + ", ".join(f"x{i}_d{j}" for i in range(1, n + 1) for j in range(1, n + 1)) + ")"


SCHWARZIAN = "(3*x1_d2^2 - 2*x1_d1*x1_d3)/x1_d1^2"

DERIVE_PRESETS = {
    "endo-metric": DerivePreset(
        "(x1_p1 - x1_p2)^2 + (x2_p1 - x2_p2)^2", 2, 2, 2, (0, 1),
        invariant="x1_d1^2 + x2_d1^2", group="mov:2", check_order=1,
    ),
    "area": DerivePreset(
        volume_expr(2), 3, 2, 3, (0, 1, 2),
        invariant="x1_d1*x2_d2 - x1_d2*x2_d1", group="mov:2", check_order=2,
    ),
    # the lowest nonvanishing component of the n = 3 volume sits at e^6
    "volume-n3": DerivePreset(
        volume_expr(3), 4, 3, 6, (0, 1, 2, 3),
        invariant=wronskian_text(3), group="mov:3", check_order=3,
    ),
    "affine-ratio": DerivePreset(
        "(x1_p3 - x1_p1)/(x1_p2 - x1_p1)", 3, 1, 2, (0, 1, 2), quotient=True,
        invariant="x1_d2/x1_d1", group="aff1", check_order=2,
    ),
    "anharmonic": DerivePreset(
        "((x1_p1 - x1_p3)*(x1_p2 - x1_p4))/((x1_p1 - x1_p2)*(x1_p3 - x1_p4))", 4, 1, 4, (0, 1, 2, 3),
        quotient=True, invariant=SCHWARZIAN, group="pgl2", check_order=3,
    ),
}


def _dist(j, k, n):
    return "sqrt(" + " + ".join(f"({_diff(i, j, k)})^2" for i in range(1, n + 1)) + ")"


def _sqdist(j, k, n):
    if j == k:
        return "0"
    return "(" + " + ".join(f"({_diff(i, j, k)})^2" for i in range(1, n + 1)) + ")"


def heron() -> tuple:
    a, b, c = _dist(1, 2, 2), _dist(1, 3, 2), _dist(2, 3, 2)
    lhs = f"1/4*sqrt(({a} + {b} + {c})*(-{a} + {b} + {c})*({a} - {b} + {c})*({a} + {b} - {c}))"
    rhs = f"1/2*sqrt({volume_expr(2)}^2)"
    return lhs, rhs


def cayley_menger() -> tuple:
    """288 V^2 = det of the bordered squared-distance matrix, expanded along its border row."""
    size = 5
    m = [["0"] + ["1"] * 4]
    for i in range(1, 5):
        m.append(["1"] + [_sqdist(i, j, 3) for j in range(1, 5)])
    terms = []
    for j in range(1, size):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        det = "det4(" + ", ".join(x for row in minor for x in row) + ")"
        terms.append(("-" if j % 2 else "+", det))
    expansion = "".join(f" {s} {d}" if k else (f"-{d}" if s == "-" else d) for k, (s, d) in enumerate(terms))
    lhs = f"sqrt(({expansion})/288)"
    rhs = f"sqrt({volume_expr(3)}^2)/6"
    return lhs, rhs


@dataclass(frozen=True)
class IdentityPreset:
    lhs: str
    rhs: str
    dim: int
    points: int
    degenerate: tuple = field(default_factory=tuple)


def _config(points):
    return {point_var(i + 1, j + 1): float(p[i]) for j, p in enumerate(points) for i in range(len(p))}


IDENTITY_PRESETS = {
    "heron": IdentityPreset(
        *heron(), 2, 3,
        degenerate=(
            _config([(0, 0), (1, 0), (3, 0)]),
            _config([(0, 0), (0, 2), (0, 5)]),
            _config([(1, 1), (1, 1), (2, 0)]),
        ),
    ),
    "cayley-menger": IdentityPreset(
        *cayley_menger(), 3, 4,
        degenerate=(
            _config([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)]),
            _config([(0, 0, 0), (1, 2, 3), (2, 4, 6), (0, 1, 0)]),
        ),
    ),
}

