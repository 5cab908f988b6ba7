"""Randomized invariant suites with timing."""

import argparse
import time

from aniso.checks import DEFAULT_COUNT, DEFAULT_SEED, run_suite


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=DEFAULT_COUNT)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = ap.parse_args()
    for suite in ("geometry", "operators"):
        t0 = time.perf_counter()
        results = run_suite(suite, args.seed, args.count)
        dt = time.perf_counter() - t0
        print(f"# {suite}: {sum(r.passed for r in results)}/{len(results)} passed in {dt:.1f}s")
        for r in results:
            print(r.line())


if __name__ == "__main__":
    main()
