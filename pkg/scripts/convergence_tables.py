"""Run every builtin single-element convergence study and print its table."""

import argparse
import sys
from pathlib import Path

from aniso.harness import builtin_cases, run_study


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, help="also write one CSV per case here")
    args = ap.parse_args()
    if args.outdir:
        args.outdir.mkdir(parents=True, exist_ok=True)
    for case in builtin_cases():
        table = run_study(case)
        print(f"# {table.case}")
        table.write_csv(sys.stdout)
        for note in table.notes:
            print(f"# note: {note}")
        print()
        if args.outdir:
            name = table.case.replace("(", "_").replace(")", "").replace(",", "_").replace("=", "")
            with open(args.outdir / f"{name}.csv", "w") as fh:
                table.write_csv(fh)


if __name__ == "__main__":
    main()
