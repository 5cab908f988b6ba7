"""Show how low-order quadrature changes the published-style error tables.

Exact integration (the package default) is compared with
  * the 3-point edge-midpoint rule on triangles, used with the sign-flipped
    quadratic 2x^2 - xy - 3y^2 and the tensor-convention H^2 denominator;
  * the 4-point vertex rule on tetrahedra.
The low-order columns match the historical values to all printed digits.
"""

import numpy as np

from aniso import families as fam
from aniso.fields import Difference, polynomial_field
from aniso.harness import make_case, run_study
from aniso.interpolation import interpolate
from aniso.norms import SeminormSpec, seminorm
from aniso.quadrature import QuadratureRule

EDGE_MIDPOINT = QuadratureRule(2, [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]], np.full(3, 1 / 6), 2)
TET_VERTEX = QuadratureRule(3, np.eye(4), np.full(4, 1 / 24), 1)
LEVELS = (128, 256, 512, 1024)


def bubble_low_order(eps: float) -> list[float]:
    phi = polynomial_field(2, {(2, 0): 2.0, (1, 1): -1.0, (0, 2): -3.0})
    out = []
    for N in LEVELS:
        T = fam.right_angled(1 / N, eps)
        I = interpolate("P1Bubble", T, phi)
        num = seminorm(T, Difference(phi, I.poly), SeminormSpec(m=1), EDGE_MIDPOINT)
        den = seminorm(T, phi, SeminormSpec(m=2, convention="tensor"), EDGE_MIDPOINT)
        out.append(num / den)
    return out


def rates(errs) -> list[float]:
    e = np.asarray(errs)
    return list(np.log2(e[:-1] / e[1:]))


def main() -> None:
    for eps in (1.5, 2.0):
        exact = run_study(make_case("p1bubble", eps)).errors
        low = bubble_low_order(eps)
        print(f"P1+bubble eps={eps:g}")
        print("N,Err_exact,Err_midpoint,r_exact,r_midpoint")
        re, rl = [None] + rates(exact), [None] + rates(low)
        for N, a, b, ra, rb in zip(LEVELS, exact, low, re, rl):
            r = ",," if ra is None else f",{ra:.4e},{rb:.4e}"
            print(f"{N},{a:.4e},{b:.4e}{r}")
        print()
    case = make_case("lag3d-I")
    exact = run_study(case)
    low = run_study(case, q=TET_VERTEX)
    print("Lagrange tetrahedron case I eps=3 delta=2")
    print("N,Err_exact,Err_vertex,r_exact,r_vertex")
    for a, b in zip(exact.rows, low.rows):
        ra = "" if a.r is None else f"{a.r:.4f}"
        rb = "" if b.r is None else f"{b.r:.4f}"
        print(f"{a.N},{a.err:.4e},{b.err:.4e},{ra},{rb}")


if __name__ == "__main__":
    main()
