"""Normalising constants Lambda_n and the lowest twisted-volume order.

For each n the script prints Lambda_n = det[i^j] / (1! 2! ... n!) and, for
n <= 4, the lowest e-power at which the twisted volume of n+1 points
is nonzero together with a check that it equals Lambda_n times the Wronskian.

Usage: python scripts/lambda_table.py [--max-n N]
"""
import argparse
import time

from weiljet.expr import evaluate, parse
from weiljet.jets import TwistSpec, lambda_constant, twisted_differential, universal_jet, wronskian
from weiljet.presets import volume_expr


def lowest_volume_term(n):
    r = n * (n + 1) // 2
    jet = universal_jet(n, 1, r)
    res = twisted_differential(parse(volume_expr(n)), TwistSpec.scaling(jet.spec, *range(n + 1)), jet)
    power, coeff = res.lowest()
    ring = jet.spec.ring
    W = evaluate(wronskian(n), {v: ring.var(v) for v in ring.vars}, algebra=ring)
    return power[0], coeff == lambda_constant(n) * W


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=6)
    args = ap.parse_args()
    print(f"{'n':>2}  {'Lambda_n':>8}  lowest power  = Lambda*W  seconds")
    for n in range(1, args.max_n + 1):
        lam = lambda_constant(n)
        if n <= 4:
            start = time.perf_counter()
            power, ok = lowest_volume_term(n)
            print(f"{n:>2}  {str(lam):>8}  {power:>12}  {str(ok):>9}  {time.perf_counter() - start:7.3f}")
        else:
            print(f"{n:>2}  {str(lam):>8}  {'-':>12}  {'-':>9}")


if __name__ == "__main__":
    main()
