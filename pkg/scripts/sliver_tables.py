"""Geometry columns of the flat-tetrahedron (sliver) families for N = 32, 64, 128."""

from aniso import families as fam
from aniso.quality import H_star, condition_report

PAIRS = ((1.5, 1.0), (1.0, 1.5), (1.5, 1.5))


def main() -> None:
    for e1, e2 in PAIRS:
        print(f"# sliver eps1={e1:g} eps2={e2:g}")
        print("N,L6/L1,h^3/|T|,H*_T/h_T,H_T/h_T,R/h_T,classification")
        for N in (32, 64, 128):
            T = fam.sliver(1 / N, e1, e2)
            r = condition_report(T)
            print(
                f"{N},{r.hmax_over_hmin:.4e},{r.ratio_classic:.4e},{H_star(T) / r.h_T:.4e},"
                f"{r.ratio_new:.4e},{r.R_over_h:.4e},{r.classification.value}"
            )
        print()


if __name__ == "__main__":
    main()
