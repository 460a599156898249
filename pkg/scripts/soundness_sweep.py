#!/usr/bin/env python3
"""Cross-validate the local criterion against brute force on random specs."""

import argparse
import collections
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from specgen import random_spec  # noqa: E402

from hypercontrol.analyzer import cross_validate  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-nodes", type=int, default=4)
    ap.add_argument("--subsets", default="singletons", choices=["singletons", "all", "witness"])
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    tally = collections.Counter()
    for k in range(args.n):
        spec = random_spec(rng, max_nodes=args.max_nodes)
        cv = cross_validate(spec, args.subsets)
        tally[cv.status] += 1
        if not cv.consistent:
            print(f"spec {k}: INCONSISTENT local={cv.local.verdict.name} brute={cv.brute.brute_force.kind}")
    for status, count in sorted(tally.items()):
        print(f"{status:28s} {count}")
    return 0 if tally["inconsistent"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
