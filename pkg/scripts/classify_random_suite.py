"""Classify a seeded suite of random invariant tuples and tabulate the classes.

    python3 scripts/classify_random_suite.py --count 500 --seed 1
"""

import argparse
import random
import time
from collections import Counter

from isomax.invariants import classify_tuple, manifold_dimension
from isomax.sampling import random_valid_tuple


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--max-dim", type=int, default=6)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    suite = [random_valid_tuple(rng, max_dim=args.max_dim) for _ in range(args.count)]
    start = time.perf_counter()
    classes = [classify_tuple(t) for t in suite]
    elapsed = time.perf_counter() - start

    table = Counter((t.dim_T, c.value) for t, c in zip(suite, classes))
    for (d, c), k in sorted(table.items()):
        print(f"dim_T={d}  {c:32s} {k:4d}")
    print(f"total {len(suite)}  classify time {elapsed:.2f}s")
    dims = Counter(manifold_dimension(t) for t in suite)
    print("manifold dimensions:", dict(sorted(dims.items())))


if __name__ == "__main__":
    main()
