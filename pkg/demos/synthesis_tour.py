"""Synthesize faithful maps for every catalog graph at its threshold degree."""

from __future__ import annotations

import time

from tropskel import catalog
from tropskel.bounds import t_of_g
from tropskel.graph import genus
from tropskel.synthesis import Infeasible, synthesize_faithful


def main() -> None:
    for name in catalog.names():
        g = catalog.get(name)
        d = max(t_of_g(genus(g)), 3)
        start = time.perf_counter()
        res = synthesize_faithful(g, d)
        ms = 1000 * (time.perf_counter() - start)
        if isinstance(res, Infeasible):
            print(f"{name:18s} d={d}  infeasible at {res.construction}: {res.reason}")
            continue
        cert = res.certificate
        print(
            f"{name:18s} d={d}  {cert.verdict:9s} {res.map.dimension:2d} coordinates, "
            f"{len(cert.cells):3d} cells, {ms:6.1f} ms"
        )
    below = synthesize_faithful(catalog.get("circle4"), 2)
    print("\ncircle4 at d=2:", below.construction, "-", below.reason)


if __name__ == "__main__":
    main()
