from fractions import Fraction

import sympy
from hypothesis import settings, strategies as st

from weiljet.ring import Polynomial, RationalFunction, RingDescriptor
from weiljet.weil import WeilElement, WeilSpec

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

VARS = ("x", "y", "z")

small_q = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
nonzero_q = small_q.filter(bool)


def polynomials(vars=VARS, max_terms=4, max_deg=2):
    exps = st.tuples(*[st.integers(0, max_deg) for _ in vars])
    return st.dictionaries(exps, small_q, max_size=max_terms).map(lambda t: Polynomial(vars, t))


def rational_functions(vars=VARS):
    return st.tuples(polynomials(vars, 3, 2), polynomials(vars, 2, 1).filter(lambda p: not p.is_zero())).map(
        lambda nd: RationalFunction(*nd)
    )


def ring_elements(desc: RingDescriptor):
    if desc.kind == "float64":
        return st.integers(-50, 50).map(lambda i: i / 8)  # dyadic, so float arithmetic is exact
    if desc.kind == "rational":
        return small_q
    if desc.kind == "polynomial":
        return polynomials(desc.vars)
    return rational_functions(desc.vars)


def weil_elements(spec: WeilSpec, coeffs=None):
    coeffs = coeffs or ring_elements(spec.ring)
    return st.lists(coeffs, min_size=spec.dimension, max_size=spec.dimension).map(
        lambda cs: WeilElement(spec, dict(zip(spec.basis, cs)))
    )


def to_sympy(p: Polynomial):
    syms = sympy.symbols(p.vars)
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[s ** e for s, e in zip(syms, exp)])
         for exp, c in p.terms.items()),
        sympy.Integer(0),
    )


# ------------------------------------------------------------------ acceptance reporting

ACCEPTANCE_LINES: list = []
SUITE_BUDGET_SECONDS = 120.0
_session = {}


def pytest_sessionstart(session):
    import time

    _session["start"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    import time

    elapsed = time.perf_counter() - _session.get("start", time.perf_counter())
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    verdict = "PASS" if elapsed < SUITE_BUDGET_SECONDS else "FAIL"
    terminalreporter.write_line(f"suite runtime {elapsed:.1f} s (budget {SUITE_BUDGET_SECONDS:.0f} s): {verdict}")


def pytest_sessionfinish(session, exitstatus):
    import time

    if "start" in _session and time.perf_counter() - _session["start"] >= SUITE_BUDGET_SECONDS:
        session.exitstatus = 1
