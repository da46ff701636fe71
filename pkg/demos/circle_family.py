"""Walk through the two-function family on a circle of length 4.

Builds the tent and the one-sided ramp, prints the induced divisors, the cell
slope vectors and the certificate, then shows that the tent alone folds the
circle onto a segment.
"""

from __future__ import annotations

from tropskel.catalog import circle
from tropskel.divisors import Divisor, PLFunction
from tropskel.graph import GraphPoint
from tropskel.tropical import assemble_map, certify_faithful


def main() -> None:
    g = circle(4)
    w = g.point("e", 2)
    base = Divisor({GraphPoint.vertex("v0"): 1, w: 2})
    tent = PLFunction.from_knots(g, {"v0": 0}, {"e": [(2, 2)]})
    ramp = PLFunction.from_knots(g, {"v0": 0}, {"e": [(2, 0), (3, -1)]})

    m = assemble_map(g, base, [tent, ramp])
    print("base divisor:", base)
    for i, d in enumerate(m.induced_divisors(), 1):
        print(f"D{i} =", d)
    cert = certify_faithful(m)
    for c in cert.cells:
        print(f"  cell {c.ident}[{c.start}, {c.stop}]  vector {c.vector}")
    print("verdict:", cert.verdict)

    folded = certify_faithful(assemble_map(g, base, [tent]))
    x, y, image = folded.witness
    print("tent alone:", folded.verdict, "-", x, "and", y, "both map to", "(" + ", ".join(map(str, image)) + ")")


if __name__ == "__main__":
    main()
