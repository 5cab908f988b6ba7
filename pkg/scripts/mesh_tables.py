"""MinAngle/MaxAngle metrics of the six unit-square mesh families."""

import argparse

from aniso.cli import metric_format
from aniso.meshes import FAMILIES, generate, quality


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", default="32,64,128")
    ap.add_argument("--pattern", choices=("diagonal", "staggered"))
    args = ap.parse_args()
    Ns = [int(n) for n in args.ns.split(",")]
    print("family," + ",".join(f"MinAngle_{n},MaxAngle_{n}" for n in Ns))
    for f in FAMILIES:
        cols = []
        for N in Ns:
            Q = quality(generate(f, N, args.pattern))
            cols += [metric_format(Q.min_angle_metric), metric_format(Q.max_angle_metric)]
        print(f + "," + ",".join(cols))


if __name__ == "__main__":
    main()
