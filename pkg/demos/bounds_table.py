"""Print the degree thresholds and the plane-curve bounds side by side."""

from __future__ import annotations

from tropskel.bounds import D_bound, bound_report, castelnuovo, ell_bound, t_of_g


def main() -> None:
    print(" g  t(g)")
    for g in (0, 1, 2, 3, 5, 10):
        print(f"{g:2d}  {t_of_g(g):4d}")

    print("\n d  D(d,2)  genus")
    for d in range(3, 9):
        rep = bound_report(d=d, N=2, planar=True)
        print(f"{d:2d}  {D_bound(d, 2, planar=True):6d}  {rep.g:5d}")

    print("\n d  N  m0 eps0  pi  D(d,N)  ell")
    for d, n in ((4, 3), (6, 3), (8, 4), (12, 5)):
        m0, eps0, pi = castelnuovo(d, n)
        print(f"{d:2d} {n:2d} {m0:3d} {eps0:4d} {pi:3d} {D_bound(d, n):7d} {ell_bound(pi, d, n):4d}")


if __name__ == "__main__":
    main()
