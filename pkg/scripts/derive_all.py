"""Run every derive preset and print the components it produces.

Usage: python scripts/derive_all.py [--json]
"""
import argparse
import json
import time

from weiljet.cli import run
from weiljet.presets import DERIVE_PRESETS


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="emit one JSON document keyed by preset")
    args = ap.parse_args()
    results = {}
    for name in DERIVE_PRESETS:
        start = time.perf_counter()
        code, out, err = run(["derive", "--preset", name, "--json"])
        elapsed = time.perf_counter() - start
        if code != 0:
            results[name] = {"error": err}
            continue
        results[name] = json.loads(out) | {"seconds": round(elapsed, 4)}
    if args.json:
        print(json.dumps(results, sort_keys=True, indent=2))
        return
    for name, res in results.items():
        if "error" in res:
            print(f"{name}: {res['error']}")
            continue
        head = f"{name}: order {res['order']}"
        if res["reduced_order"] is not None:
            head += f" (reduced {res['reduced_order']})"
        print(f"{head}, {res['seconds']:.3f} s")
        for c in res["components"]:
            print(f"    e^{c['eps_power']}: {c['coefficient']}")


if __name__ == "__main__":
    main()
