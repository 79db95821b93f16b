"""Generator ranks and joint-invariant counts for the built-in groups.

Usage: python scripts/rank_table.py [--samples N] [--seed S]
"""
import argparse

from weiljet.groups import aff1, mov, pgl2, rank_analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    actions = [aff1(), pgl2(), mov(2), mov(3), mov(4)]
    print(f"{'group':<8}{'dim G':>6}{'k0':>4}   invariant counts for k = 1..dim G")
    for action in actions:
        rep = rank_analysis(action, action.dim_G, args.samples, args.seed)
        counts = " ".join(str(r.invariant_count) for r in rep.rows)
        print(f"{action.name:<8}{action.dim_G:>6}{rep.k0_estimate:>4}   {counts}")
        for w in rep.warnings:
            print(f"    warning: {w}")


if __name__ == "__main__":
    main()
