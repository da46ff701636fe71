"""Small named graphs used in tests, demos and the command line."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .graph import MetricGraph

__all__ = [
    "CATALOG",
    "CatalogEntry",
    "circle",
    "circle_two_rays",
    "circle_with_ray",
    "dumbbell",
    "get",
    "names",
    "path",
    "theta",
]


def circle(length=4, vertex: str = "v0", edge: str = "e") -> MetricGraph:
    """One vertex with a single loop."""
    return MetricGraph([vertex], [(edge, vertex, vertex, length)])


def theta(a=1, b=2, c=3) -> MetricGraph:
    """Two vertices ``u``, ``v`` joined by three parallel edges."""
    return MetricGraph(["u", "v"], [("e1", "u", "v", a), ("e2", "u", "v", b), ("e3", "u", "v", c)])


def dumbbell(loop1=2, bridge=1, loop2=2) -> MetricGraph:
    """Two loops joined by a bridge ``b`` from ``v1`` to ``v2``."""
    return MetricGraph(
        ["v1", "v2"],
        [("l1", "v1", "v1", loop1), ("b", "v1", "v2", bridge), ("l2", "v2", "v2", loop2)],
    )


def path(n: int = 3, length=1) -> MetricGraph:
    """A path with ``n`` edges ``e0 .. e{n-1}`` on vertices ``p0 .. pn``."""
    vs = [f"p{i}" for i in range(n + 1)]
    return MetricGraph(vs, [(f"e{i}", vs[i], vs[i + 1], length) for i in range(n)])


def circle_with_ray(length=4) -> MetricGraph:
    return MetricGraph(["v0"], [("e", "v0", "v0", length)], [("r", "v0")])


def circle_two_rays() -> MetricGraph:
    """A length-4 cycle on ``v0`` and ``w`` with a ray at each of them."""
    return MetricGraph(
        ["v0", "w"],
        [("a", "v0", "w", 2), ("b", "w", "v0", 2)],
        [("r1", "v0"), ("r2", "w")],
    )


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[[], MetricGraph]
    notes: str

    @property
    def graph(self) -> MetricGraph:
        return self.build()


CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry("circle4", lambda: circle(4), "single loop of length 4 on v0"),
        CatalogEntry("theta", lambda: theta(1, 2, 3), "theta graph with lengths 1, 2, 3"),
        CatalogEntry("unit-theta", lambda: theta(1, 1, 1), "theta graph with unit lengths"),
        CatalogEntry("dumbbell", lambda: dumbbell(2, 1, 2), "loops of length 2 joined by a unit bridge"),
        CatalogEntry("path3", lambda: path(3), "path with three unit edges"),
        CatalogEntry("circle-with-ray", circle_with_ray, "circle4 with one ray at v0"),
        CatalogEntry("circle4-two-rays", circle_two_rays, "length-4 cycle with rays at v0 and w"),
    ]
}

_ALIASES = {"circle-4": "circle4", "path-3": "path3", "theta123": "theta"}


def names() -> list[str]:
    return list(CATALOG)


def get(name: str) -> MetricGraph:
    key = _ALIASES.get(name, name)
    if key not in CATALOG:
        raise KeyError(f"unknown catalog graph {name!r}; known: {', '.join(CATALOG)}")
    return CATALOG[key].graph
