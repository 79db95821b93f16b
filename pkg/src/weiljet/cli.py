"""Command-line interface: derive, check, rank, identity.

Exit codes: 0 success, 1 invariance failure or identity violation,
2 usage error, 3 engine error.  Errors are printed as one line
``error: <Code>: <message>`` on stderr.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import AlgebraError, ParseError, SingularQuotientError
from .expr import Div, free_variables, parse
from .groups import (
    check_invariant,
    evaluate_pair,
    general_position_sampler,
    get_action,
    identity_check,
    rank_analysis,
)
from .jets import (
    POINT_RE,
    TwistSpec,
    jet_from_coordinates,
    parse_jet_var,
    random_jet_values,
    singular_twisted_quotient,
    twisted_differential,
    universal_jet,
)
from .presets import DERIVE_PRESETS, IDENTITY_PRESETS
from .ring import RingDescriptor
from .weil import WeilSpec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ENGINE = 0, 1, 2, 3


class UsageError(Exception):
    code = "UsageError"


@dataclass
class CommandConfig:
    subcommand: str
    expr: str | None = None
    points: int | None = None
    dim: int | None = None
    jet_order: int | None = None
    twist: tuple | None = None
    quotient: bool = False
    group: str | None = None
    samples: int | None = None
    tol: float | None = None
    seed: int = 0
    ring: str | None = None
    json: bool = False
    preset: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="weiljet", description="Derive and verify differential invariants from joint invariants.")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--expr", help="expression text or @file")
        sp.add_argument("--preset")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--ring", choices=["rational", "rational-function", "float"])
        sp.add_argument("--json", action="store_true")

    d = sub.add_parser("derive", help="twisted differential of a joint invariant")
    common(d)
    d.add_argument("--points", type=int)
    d.add_argument("--dim", type=int)
    d.add_argument("--jet-order", type=int)
    d.add_argument("--twist")
    d.add_argument("--quotient", action="store_true", default=None)

    c = sub.add_parser("check", help="exact or numeric invariance check")
    common(c)
    c.add_argument("--group")
    c.add_argument("--jet-order", type=int)
    c.add_argument("--samples", type=int)
    c.add_argument("--tol", type=float)

    r = sub.add_parser("rank", help="generator ranks and joint-invariant counts")
    r.add_argument("--group", required=True)
    r.add_argument("--points", type=int)
    r.add_argument("--samples", type=int)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--json", action="store_true")

    i = sub.add_parser("identity", help="functional-dependence identity check")
    common(i)
    i.add_argument("--points", type=int)
    i.add_argument("--dim", type=int)
    i.add_argument("--samples", type=int)
    i.add_argument("--tol", type=float)
    return p


def _read_expr(text: str) -> str:
    if text.startswith("@"):
        return Path(text[1:]).read_text().strip()
    return text


def _parse_expr(text: str):
    try:
        return parse(_read_expr(text))
    except ParseError as exc:
        raise UsageError(f"cannot parse expression: {exc}") from exc
    except OSError as exc:
        raise UsageError(str(exc)) from exc


def _parse_twist(text: str) -> tuple:
    try:
        return tuple(Fraction(t.strip()) for t in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad twist {text!r}") from exc


def config_from_args(argv) -> CommandConfig:
    ns = _build_parser().parse_args(argv)
    cfg = CommandConfig(ns.subcommand, seed=ns.seed, json=ns.json)
    for name in ("expr", "points", "dim", "jet_order", "group", "samples", "tol", "ring", "preset", "quotient"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    cfg.quotient = bool(cfg.quotient)
    if getattr(ns, "twist", None):
        cfg.twist = _parse_twist(ns.twist)
    if cfg.seed < 0:
        raise UsageError("--seed must be non-negative")
    if cfg.samples is not None and cfg.samples < 1:
        raise UsageError("--samples must be positive")
    return cfg


def _fmt(q) -> str:
    if isinstance(q, Fraction):
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return str(q)


# --------------------------------------------------------------------------

def cmd_derive(cfg: CommandConfig) -> tuple:
    if cfg.preset:
        if cfg.preset not in DERIVE_PRESETS:
            raise UsageError(f"unknown derive preset {cfg.preset!r}; choose from {sorted(DERIVE_PRESETS)}")
        pre = DERIVE_PRESETS[cfg.preset]
        cfg.expr = cfg.expr or pre.expr
        cfg.points = cfg.points or pre.points
        cfg.dim = cfg.dim or pre.dim
        cfg.jet_order = cfg.jet_order if cfg.jet_order is not None else pre.jet_order
        cfg.twist = cfg.twist or tuple(Fraction(c) for c in pre.twist)
        cfg.quotient = cfg.quotient or pre.quotient
    if not cfg.expr:
        raise UsageError("derive needs --expr or --preset")
    expr = _parse_expr(cfg.expr)
    used = free_variables(expr)
    bad = [v for v in used if not POINT_RE.fullmatch(v)]
    if bad:
        raise UsageError(f"variables {sorted(bad)} are not point coordinates x<i>_p<j>")
    k = cfg.points or max((int(POINT_RE.fullmatch(v).group(2)) for v in used), default=1)
    n = cfg.dim or max((int(POINT_RE.fullmatch(v).group(1)) for v in used), default=1)
    r = cfg.jet_order if cfg.jet_order is not None else k
    twist = cfg.twist or tuple(Fraction(c) for c in range(k))
    if len(twist) != k:
        raise UsageError(f"twist has {len(twist)} entries but --points is {k}")
    for v in used:
        m = POINT_RE.fullmatch(v)
        if int(m.group(1)) > n or int(m.group(2)) > k:
            raise UsageError(f"{v} exceeds --dim {n} / --points {k}")
    if r < 0:
        raise UsageError("--jet-order must be non-negative")
    ring = cfg.ring or "rational-function"
    if ring == "rational-function":
        jet = universal_jet(n, 1, r)
    else:
        desc = RingDescriptor.rational() if ring == "rational" else RingDescriptor.float64()
        values = random_jet_values(random.Random(f"derive/{cfg.seed}"), n, r, exact=ring == "rational")
        jet = jet_from_coordinates(values, n, WeilSpec(1, r, desc))
    tw = TwistSpec.scaling(jet.spec, *twist)
    if cfg.quotient:
        if not isinstance(expr, Div):
            raise UsageError("--quotient needs an expression of the form NUM/DEN")
        result = singular_twisted_quotient(expr.left, expr.right, tw, jet)
    else:
        result = twisted_differential(expr, tw, jet)
    payload = result.to_json()
    if cfg.json:
        return EXIT_OK, payload
    lines = [f"order {payload['order']}" + (f", reduced order {payload['reduced_order']}" if payload["reduced_order"] is not None else "")]
    for idx, comp in enumerate(payload["components"]):
        mark = "*" if idx == 0 else " "
        lines.append(f"{mark} e^{comp['eps_power']}: {comp['coefficient']}    [{comp['eps_power']}!*coeff: {comp['factorial_scaled']}]")
    if not payload["components"]:
        lines.append("  (identically zero at this order)")
    return EXIT_OK, "\n".join(lines)


def cmd_check(cfg: CommandConfig) -> tuple:
    if cfg.preset:
        if cfg.preset not in DERIVE_PRESETS:
            raise UsageError(f"unknown preset {cfg.preset!r}")
        pre = DERIVE_PRESETS[cfg.preset]
        cfg.expr = cfg.expr or pre.invariant
        cfg.group = cfg.group or pre.group
        cfg.jet_order = cfg.jet_order if cfg.jet_order is not None else pre.check_order
    if not cfg.expr or not cfg.group:
        raise UsageError("check needs --expr and --group (or --preset)")
    expr = _parse_expr(cfg.expr)
    try:
        action = get_action(cfg.group)
    except (ValueError, OSError, KeyError) as exc:
        raise UsageError(f"bad group: {exc}") from exc
    orders = []
    for v in free_variables(expr):
        parsed = parse_jet_var(v)
        if parsed is None or len(parsed[1]) != 1:
            raise UsageError(f"{v} is not a jet variable x<i>_d<o>")
        orders.append(parsed[1][0])
    r = cfg.jet_order if cfg.jet_order is not None else max(orders, default=0)
    ring = cfg.ring or "rational"
    if ring == "rational-function":
        raise UsageError("check runs over rational or float samples")
    try:
        report = check_invariant(expr, action, r, cfg.samples or 100, cfg.tol if cfg.tol is not None else 1e-9, cfg.seed, ring)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    code = EXIT_OK if report.invariant else EXIT_FAIL
    payload = report.to_json()
    payload["group"] = action.name
    payload["expr"] = cfg.expr
    if cfg.json:
        return code, payload
    text = (
        f"{'pass' if report.invariant else 'FAIL'}: {payload['verdict']} under {action.name} "
        f"({report.samples} samples, {ring}); max deviation {_fmt(report.max_deviation)}"
    )
    if report.witness:
        text += "\nwitness: " + json.dumps(report.witness, sort_keys=True)
    return code, text


def cmd_rank(cfg: CommandConfig) -> tuple:
    try:
        action = get_action(cfg.group)
    except (ValueError, OSError, KeyError) as exc:
        raise UsageError(f"bad group: {exc}") from exc
    k_max = cfg.points or action.dim_G
    if k_max < 1:
        raise UsageError("--points must be positive")
    report = rank_analysis(action, k_max, cfg.samples or 20, cfg.seed)
    if cfg.json:
        return EXIT_OK, report.to_json()
    lines = [f"{action.name}: dim G = {action.dim_G}, dim M = {action.dim_M}, {report.samples} samples per k",
             "  k  rank  invariants"]
    for row in report.rows:
        lines.append(f"{row.k:>3}  {row.rank:>4}  {row.invariant_count:>10}")
    lines.append(f"k0 estimate: {report.k0_estimate}; bounds {report.bounds[0]} <= k0 <= {report.bounds[1]}")
    lines += [f"note: {n}" for n in report.notes] + [f"warning: {w}" for w in report.warnings]
    return EXIT_OK, "\n".join(lines)


def cmd_identity(cfg: CommandConfig) -> tuple:
    degenerate = ()
    if cfg.preset:
        if cfg.preset not in IDENTITY_PRESETS:
            raise UsageError(f"unknown identity preset {cfg.preset!r}; choose from {sorted(IDENTITY_PRESETS)}")
        pre = IDENTITY_PRESETS[cfg.preset]
        lhs_text, rhs_text = pre.lhs, pre.rhs
        cfg.dim = cfg.dim or pre.dim
        cfg.points = cfg.points or pre.points
        degenerate = pre.degenerate
    else:
        if not cfg.expr:
            raise UsageError("identity needs --preset or --expr 'LHS == RHS'")
        text = _read_expr(cfg.expr)
        if "==" not in text:
            raise UsageError("identity --expr must have the form 'LHS == RHS'")
        lhs_text, rhs_text = text.split("==", 1)
    lhs, rhs = _parse_expr(lhs_text), _parse_expr(rhs_text)
    used = free_variables(lhs) | free_variables(rhs)
    n = cfg.dim or max((int(POINT_RE.fullmatch(v).group(1)) for v in used if POINT_RE.fullmatch(v)), default=1)
    k = cfg.points or max((int(POINT_RE.fullmatch(v).group(2)) for v in used if POINT_RE.fullmatch(v)), default=1)
    if cfg.ring not in (None, "float"):
        raise UsageError("identity checks run over the float ring")
    tol = cfg.tol if cfg.tol is not None else 1e-9
    report = identity_check(lhs, rhs, general_position_sampler(n, k), cfg.samples or 1000, tol, cfg.seed)
    degen = [list(evaluate_pair(lhs, rhs, b)) for b in degenerate]
    degen_ok = all(a == 0.0 and b == 0.0 for a, b in degen)
    passed = report.passed and degen_ok
    payload = report.to_json()
    payload["verdict"] = "pass" if passed else "fail"
    payload["degenerate"] = degen
    if cfg.json:
        return (EXIT_OK if passed else EXIT_FAIL), payload
    text = f"{'pass' if passed else 'FAIL'}: max relative deviation {report.max_deviation:.3e} over {report.samples} samples (tol {tol:g})"
    if degen:
        text += "\ndegenerate configurations: " + ", ".join(f"({a:g}, {b:g})" for a, b in degen)
    if report.witness:
        text += "\nwitness: " + json.dumps(report.witness, sort_keys=True)
    return (EXIT_OK if passed else EXIT_FAIL), text


COMMANDS = {"derive": cmd_derive, "check": cmd_check, "rank": cmd_rank, "identity": cmd_identity}


def run(argv) -> tuple:
    """(exit code, stdout text, stderr text) without touching the real streams."""
    try:
        cfg = config_from_args(argv)
        code, out = COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        return EXIT_USAGE, "", f"error: UsageError: {exc}"
    except SingularQuotientError as exc:
        return EXIT_ENGINE, "", f"error: {exc.code}: {exc} [condition={exc.condition}]"
    except AlgebraError as exc:
        return EXIT_ENGINE, "", f"error: {exc.code}: {exc}"
    if isinstance(out, dict):
        out = json.dumps(out, sort_keys=True, indent=2)
    return code, out, ""


def main(argv=None) -> int:
    code, out, err = run(sys.argv[1:] if argv is None else argv)
    if out:
        print(out)
    if err:
        print(err.replace("\n", " "), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
