"""Weighted graphs, canonical structure, islands and good effective divisors.

The canonical vertices of a weighted graph are the points whose valence is
not 2 together with every positively weighted vertex.  A canonical edge is a
maximal chain of model edges whose inner vertices are not canonical.
Removing the open canonical bridges splits the graph into islands.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .divisors import Divisor
from .graph import EdgeType, GraphError, GraphPoint, MetricGraph, classify_edge, genus
from .reduction import ReductionError, effective_of_bounded_class, reduce_divisor

__all__ = [
    "CanonicalEdge",
    "GoodDivisorReport",
    "Island",
    "IslandDecomposition",
    "canonical_edge_of",
    "canonical_edges",
    "canonical_vertices",
    "check_good_divisor",
    "good_effective_divisor",
    "islands",
    "weighted_genus",
    "weighted_riemann",
]


def weighted_genus(g: MetricGraph) -> int:
    """Betti number plus total vertex weight."""
    return genus(g) + sum(g.weights.values())


def canonical_vertices(g: MetricGraph) -> list[str]:
    """Vertices of valence other than 2, positive weight, or carrying a ray.

    A graph that is a bare cycle has none of these; its smallest vertex is
    used so that the cycle still forms one canonical edge.
    """
    out = [v for v in g.vertices if g.valence(v) != 2 or g.weights[v] > 0 or g.rays_at(v)]
    return out or [g.vertices[0]]


@dataclass(frozen=True)
class CanonicalEdge:
    """A maximal chain of model edges between canonical vertices.

    ``steps`` lists ``(model edge, forward, start arc)`` in walking order from
    ``start`` to ``end``; ``inner`` holds the non-canonical vertices passed.
    """

    id: str
    start: str
    end: str
    steps: tuple[tuple[str, bool, Fraction], ...]
    inner: frozenset[str]
    length: Fraction
    kind: EdgeType

    @property
    def model_edges(self) -> frozenset[str]:
        return frozenset(s[0] for s in self.steps)

    def in_relin(self, p: GraphPoint) -> bool:
        """Whether ``p`` lies in the open chain."""
        if p.kind == "vertex":
            return p.ident in self.inner
        return p.kind == "edge" and p.ident in self.model_edges

    def arc(self, g: MetricGraph, p: GraphPoint) -> Fraction:
        """Arc-length position of a relin point measured from ``start``."""
        for eid, forward, a in self.steps:
            e = g.edges[eid]
            if p.kind == "edge" and p.ident == eid:
                return a + (p.offset if forward else e.length - p.offset)
            if p.kind == "vertex":
                tip = e.head if forward else e.tail
                if tip == p.ident and tip in self.inner:
                    return a + e.length
        raise GraphError(f"{p!r} is not inside canonical edge {self.id}")

    def point_at(self, g: MetricGraph, t: Fraction) -> GraphPoint:
        if t <= 0:
            return GraphPoint.vertex(self.start)
        if t >= self.length:
            return GraphPoint.vertex(self.end)
        for eid, forward, a in self.steps:
            e = g.edges[eid]
            if a <= t <= a + e.length:
                s = t - a
                return g.point(eid, s if forward else e.length - s)
        raise AssertionError("arc position not located")

    def middle(self, g: MetricGraph) -> GraphPoint:
        return self.point_at(g, self.length / 2)


def canonical_edge_of(g: MetricGraph, e: str) -> CanonicalEdge:
    """The canonical edge whose chain contains model edge ``e`` (or has id ``e``)."""
    for ce in canonical_edges(g):
        if e == ce.id or e in ce.model_edges:
            return ce
    raise GraphError(f"unknown edge {e!r}")


def canonical_edges(g: MetricGraph) -> list[CanonicalEdge]:
    canon = set(canonical_vertices(g))
    seen: set[str] = set()
    out = []
    for v in sorted(canon):
        # walk along the stored orientation when both half-edges are available
        for eid, side in sorted(g.incident(v), key=lambda h: (h[0], h[1] != "tail")):
            if eid in seen:
                continue
            steps = []
            inner = set()
            arc = Fraction(0)
            cur, cur_side = eid, side
            while True:
                e = g.edges[cur]
                forward = cur_side == "tail"
                steps.append((cur, forward, arc))
                seen.add(cur)
                arc += e.length
                nxt = e.head if forward else e.tail
                if nxt in canon:
                    break
                inner.add(nxt)
                cands = [h for h in g.incident(nxt) if h[0] != cur]
                cur, cur_side = cands[0]
            ids = sorted(s[0] for s in steps)
            out.append(
                CanonicalEdge(
                    ids[0], v, nxt, tuple(steps), frozenset(inner), arc, classify_edge(g, ids[0])
                )
            )
    return sorted(out, key=lambda c: c.id)


@dataclass(frozen=True)
class Island:
    vertices: frozenset[str]
    edges: frozenset[str]
    genus: int

    def contains(self, p: GraphPoint) -> bool:
        if p.kind == "vertex":
            return p.ident in self.vertices
        return p.kind == "edge" and p.ident in self.edges


@dataclass(frozen=True)
class IslandDecomposition:
    islands: tuple[Island, ...]
    bridges: tuple[CanonicalEdge, ...]

    def island_of(self, v: str) -> int:
        for i, isl in enumerate(self.islands):
            if v in isl.vertices:
                return i
        raise KeyError(v)


def _check_standing_assumption(g: MetricGraph) -> None:
    for v in g.vertices:
        if g.valence(v) == 1 and g.weights[v] == 0:
            raise GraphError(f"vertex {v!r} has valence 1 and weight 0")


def _components(vertices: Iterable[str], edges: Iterable[tuple[str, str, str]]):
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, a, b in edges:
        parent[find(a)] = find(b)
    groups: dict[str, set[str]] = defaultdict(set)
    for v in parent:
        groups[find(v)].add(v)
    return sorted((frozenset(s) for s in groups.values()), key=min)


def _sub_betti(g: MetricGraph, vs, es) -> int:
    return len(es) - len(vs) + 1


def islands(g: MetricGraph, check: bool = True) -> IslandDecomposition:
    """Components after deleting the open canonical bridges.

    Rays count towards valence but are not part of any island.  With
    ``check`` set, a weight-0 point of valence 1 is rejected.
    """
    if check:
        _check_standing_assumption(g)
    bridges = tuple(c for c in canonical_edges(g) if c.kind is EdgeType.DISCONNECTED)
    removed_edges = set().union(*(b.model_edges for b in bridges)) if bridges else set()
    removed_vertices = set().union(*(b.inner for b in bridges)) if bridges else set()
    vs = [v for v in g.vertices if v not in removed_vertices]
    es = [(e.id, e.tail, e.head) for e in g.edges.values() if e.id not in removed_edges]
    out = []
    for comp in _components(vs, es):
        ce = frozenset(eid for eid, a, _ in es if a in comp)
        gen = _sub_betti(g, comp, ce) + sum(g.weights[v] for v in comp)
        out.append(Island(comp, ce, gen))
    return IslandDecomposition(tuple(out), bridges)


def weighted_riemann(g: MetricGraph, d: Divisor) -> Divisor:
    """Effective representative of ``d``.

    Guaranteed to exist once the degree reaches the weighted genus; below it
    a :class:`ReductionError` is raised when the class is empty.
    """
    return effective_of_bounded_class(g, d)


# ---------------------------------------------------------------------------
# good effective divisors


def _subgraph(g: MetricGraph, vs: frozenset[str], es: frozenset[str]) -> MetricGraph:
    return MetricGraph(
        sorted(vs),
        [(e, g.edges[e].tail, g.edges[e].head, g.edges[e].length) for e in sorted(es)],
        (),
        {v: g.weights[v] for v in vs},
    )


def _in_part(p: GraphPoint, vs, es) -> bool:
    if p.kind == "vertex":
        return p.ident in vs
    return p.kind == "edge" and p.ident in es


def _split(g, d: Divisor, vs: frozenset[str], es: frozenset[str], bridges, log) -> Divisor:
    """Spread ``d`` (degree at least the weighted genus of the part) over its islands."""
    local = [b for b in bridges if b.model_edges <= es]
    if not local:
        return d
    b = local[0]
    rest_es = es - b.model_edges
    rest_vs = vs - b.inner
    es_list = [(e, g.edges[e].tail, g.edges[e].head) for e in rest_es]
    comps = _components(rest_vs, es_list)
    sides = []
    for comp in comps:
        ce = frozenset(e for e, a, _ in es_list if a in comp)
        gen = _sub_betti(g, comp, ce) + sum(g.weights[v] for v in comp)
        deg = d.restrict(lambda p, comp=comp, ce=ce: _in_part(p, comp, ce)).degree
        tip = b.start if b.start in comp else b.end
        sides.append({"vs": comp, "es": ce, "genus": gen, "deg": deg, "tip": tip})
    if len(sides) != 2:
        raise AssertionError("a bridge must split its part in two")
    rich = [s for s in sides if s["deg"] >= s["genus"]]
    if not rich:
        raise AssertionError("degree below genus on both sides of a bridge")
    big = min(rich, key=lambda s: s["tip"])
    small = sides[1] if big is sides[0] else sides[0]
    surplus = big["deg"] - big["genus"]
    in_big = d.restrict(lambda p: _in_part(p, big["vs"], big["es"]))
    in_small = d.restrict(lambda p: _in_part(p, small["vs"], small["es"]))
    v_big = GraphPoint.vertex(big["tip"])
    v_small = GraphPoint.vertex(small["tip"])
    sub = _subgraph(g, big["vs"], big["es"])
    reduced = reduce_divisor(sub, in_big - Divisor({v_big: surplus}), v_big).reduced
    if not reduced.is_effective():
        raise AssertionError("reduced divisor of degree at least the genus is not effective")
    log.append({"bridge": b.id, "surplus": surplus, "from": big["tip"], "to": small["tip"]})
    d_small = in_small + Divisor({v_small: surplus})
    return _split(g, reduced, big["vs"], big["es"], bridges, log) + _split(
        g, d_small, small["vs"], small["es"], bridges, log
    )


def _spread_on_edge(g: MetricGraph, ce: CanonicalEdge, chips: dict, log) -> None:
    """Push pairs of interior chips outward until at most one remains."""
    while True:
        inside = sorted(
            (ce.arc(g, p), p) for p, c in chips.items() if ce.in_relin(p) for _ in range(c)
        )
        if len(inside) < 2:
            return
        (t1, p1), (t2, p2) = inside[0], inside[-1]
        m = min(t1, ce.length - t2)
        for p, q in ((p1, ce.point_at(g, t1 - m)), (p2, ce.point_at(g, t2 + m))):
            chips[p] -= 1
            if not chips[p]:
                del chips[p]
            chips[q] = chips.get(q, 0) + 1
        log.append({"edge": ce.id, "t1": t1, "t2": t2, "m": m})


def good_effective_divisor(g: MetricGraph, d: Divisor, *, return_log: bool = False):
    """Effective ``E ~ d`` meeting every island and sparse on every canonical edge.

    The output is effective, has degree at least 1 on every island, has no
    chips inside canonical bridges and at most one chip inside every
    canonical edge.

    Parameters
    ----------
    g : MetricGraph
        Compact weighted graph with weighted genus at least 2 and no weight-0
        leaves.
    d : Divisor
        Class of degree at least the weighted genus.
    """
    if g.rays:
        raise GraphError("good divisors are built on compact graphs")
    wg = weighted_genus(g)
    if wg < 2:
        raise ValueError("weighted genus must be at least 2")
    if d.degree < wg:
        raise ValueError("degree below the weighted genus")
    dec = islands(g)
    flat = [i for i in dec.islands if i.genus == 0]
    if flat:
        raise ValueError(
            f"island {sorted(flat[0].vertices)} has weighted genus 0; "
            "meeting every island may need more chips than the degree"
        )
    log: list = []
    e1 = reduce_divisor(g, d, GraphPoint.vertex(g.vertices[0])).reduced
    if not e1.is_effective():
        raise ReductionError("class has no effective representative")

    chips = dict(e1)
    for b in dec.bridges:
        for p in [p for p in chips if b.in_relin(p)]:
            c = chips.pop(p)
            tip = GraphPoint.vertex(b.start)
            chips[tip] = chips.get(tip, 0) + c
            log.append({"slide": repr(p), "bridge": b.id, "to": b.start, "chips": c})
    e = _split(g, Divisor(chips), frozenset(g.vertices), frozenset(g.edges), dec.bridges, log)

    chips = dict(e)
    for ce in canonical_edges(g):
        if ce.kind is EdgeType.CONNECTED:
            _spread_on_edge(g, ce, chips, log)
    out = Divisor(chips)
    return (out, log) if return_log else out


@dataclass(frozen=True)
class GoodDivisorReport:
    effective: bool
    island_degrees: tuple[int, ...]
    bridge_degrees: dict
    edge_degrees: dict

    @property
    def condition_i(self) -> bool:
        return self.effective

    @property
    def condition_ii(self) -> bool:
        return all(x >= 1 for x in self.island_degrees)

    @property
    def condition_iii(self) -> bool:
        # bridges carry nothing, every other edge interior at most one chip
        return all(x == 0 for x in self.bridge_degrees.values()) and all(
            x <= 1 for x in self.edge_degrees.values()
        )

    @property
    def ok(self) -> bool:
        return self.condition_i and self.condition_ii and self.condition_iii


def check_good_divisor(g: MetricGraph, e: Divisor) -> GoodDivisorReport:
    """Measure the three conditions directly on ``e``."""
    dec = islands(g)
    isl = tuple(e.restrict(i.contains).degree for i in dec.islands)
    br = {b.id: e.restrict(b.in_relin).degree for b in dec.bridges}
    ed = {c.id: e.restrict(c.in_relin).degree for c in canonical_edges(g)}
    return GoodDivisorReport(e.is_effective(), isl, br, ed)
