"""Step-halving study of the Moser flow pullback error.

    python3 scripts/moser_convergence.py --fixture moser-n1 --steps 5 10 20 40 80
"""

import argparse
import json

from isomax.fixtures import fixture
from isomax.moser import flow_differential, pullback_error


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", default="moser-n1")
    ap.add_argument("--steps", type=int, nargs="+", default=[5, 10, 20, 40, 80, 1000])
    ap.add_argument("--samples", type=int, default=64)
    args = ap.parse_args()

    w = fixture(args.fixture)
    rows, prev = [], None
    for steps in args.steps:
        x0, _, J = flow_differential(w, steps, args.samples)
        err = pullback_error(w, x0, J)
        ratio = prev / err if prev else None
        rows.append({"steps": steps, "error": err, "ratio": ratio})
        print(f"{steps:6d}  {err:.3e}" + (f"  ratio {ratio:6.2f}" if ratio else ""))
        prev = err
    print(json.dumps({"fixture": args.fixture, "rows": rows}))


if __name__ == "__main__":
    main()
