"""Metric graphs with rational edge lengths, optional rays and vertex weights.

All lengths and offsets are :class:`fractions.Fraction`; nothing in this module
touches floating point.  A point of the graph is a :class:`GraphPoint`, which is
always stored in normal form: an offset of ``0`` or ``length`` on an edge is
rewritten to the corresponding vertex, so two descriptions of the same point
compare equal.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

from .rational import as_fraction

__all__ = [
    "Edge",
    "EdgeType",
    "GraphError",
    "GraphPoint",
    "MetricGraph",
    "Ray",
    "Subdivision",
    "build_graph",
    "classify_edge",
    "distance",
    "genus",
    "middle_point",
    "subdivide",
]


class GraphError(ValueError):
    """Raised for malformed graph descriptions and invalid graph queries."""


@dataclass(frozen=True, order=True)
class GraphPoint:
    """A location on a metric graph.

    ``kind`` is one of ``"vertex"``, ``"edge"``, ``"ray"`` or ``"end"``.  The
    last one is the point at infinity of a ray; it never carries an offset and
    only appears in divisors on graphs with rays.

    Use :meth:`MetricGraph.point` to build normalized points from raw offsets.
    """

    kind: str
    ident: str
    offset: Fraction = Fraction(0)

    @classmethod
    def vertex(cls, v) -> "GraphPoint":
        return cls("vertex", str(v))

    @classmethod
    def end(cls, ray) -> "GraphPoint":
        return cls("end", str(ray))

    @property
    def is_vertex(self) -> bool:
        return self.kind == "vertex"

    def __repr__(self) -> str:
        if self.kind in ("vertex", "end"):
            return f"{self.kind}:{self.ident}"
        return f"{self.kind}:{self.ident}@{self.offset}"


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Ray:
    id: str
    base: str


class EdgeType(enum.Enum):
    CONNECTED = "connected"
    DISCONNECTED = "disconnected"


class MetricGraph:
    """A connected finite metric graph, possibly with rays and vertex weights.

    Parameters
    ----------
    vertices : iterable of vertex ids
    edges : iterable of ``(id, tail, head, length)``
        Offsets along an edge are measured from ``tail``.  Loops have
        ``tail == head`` and keep this stored orientation.
    rays : iterable of ``(id, base)``
    weights : mapping vertex id -> non-negative int

    Ids are coerced to ``str``.  Instances are immutable and hashable.
    """

    def __init__(self, vertices, edges=(), rays=(), weights=None):
        verts = tuple(sorted({str(v) for v in vertices}))
        if not verts:
            raise GraphError("a graph needs at least one vertex")
        vset = set(verts)
        edge_map: dict[str, Edge] = {}
        for item in edges:
            eid, tail, head, length = item
            eid, tail, head = str(eid), str(tail), str(head)
            length = as_fraction(length)
            if eid in edge_map:
                raise GraphError(f"duplicate edge id {eid!r}")
            for end in (tail, head):
                if end not in vset:
                    raise GraphError(f"edge {eid!r} has dangling endpoint {end!r}")
            if length <= 0:
                raise GraphError(f"edge {eid!r} has non-positive length {length}")
            edge_map[eid] = Edge(eid, tail, head, length)
        ray_map: dict[str, Ray] = {}
        for rid, base in rays:
            rid, base = str(rid), str(base)
            if rid in ray_map or rid in edge_map:
                raise GraphError(f"duplicate ray id {rid!r}")
            if base not in vset:
                raise GraphError(f"ray {rid!r} has dangling base {base!r}")
            ray_map[rid] = Ray(rid, base)
        wts = {v: 0 for v in verts}
        for v, w in (weights or {}).items():
            v = str(v)
            if v not in vset:
                raise GraphError(f"weight given for unknown vertex {v!r}")
            if int(w) != w or w < 0:
                raise GraphError(f"weight of {v!r} must be a non-negative integer")
            wts[v] = int(w)

        self._vertices = verts
        self._edges = MappingProxyType(dict(sorted(edge_map.items())))
        self._rays = MappingProxyType(dict(sorted(ray_map.items())))
        self._weights = MappingProxyType(wts)
        inc: dict[str, list[tuple[str, str]]] = {v: [] for v in verts}
        for e in self._edges.values():
            inc[e.tail].append((e.id, "tail"))
            inc[e.head].append((e.id, "head"))
        self._incidence = MappingProxyType({v: tuple(h) for v, h in inc.items()})
        if not _connected(verts, self._edges.values()):
            raise GraphError("graph is disconnected")

    # -- basic accessors -------------------------------------------------
    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> Mapping[str, Edge]:
        return self._edges

    @property
    def rays(self) -> Mapping[str, Ray]:
        return self._rays

    @property
    def weights(self) -> Mapping[str, int]:
        return self._weights

    def incident(self, v: str) -> tuple[tuple[str, str], ...]:
        """Half-edges at ``v`` as ``(edge id, "tail" | "head")``; loops appear twice."""
        return self._incidence[str(v)]

    def rays_at(self, v: str) -> list[str]:
        return [r.id for r in self._rays.values() if r.base == v]

    def valence(self, v: str, *, with_rays: bool = True) -> int:
        val = len(self._incidence[str(v)])
        if with_rays:
            val += len(self.rays_at(str(v)))
        return val

    def total_length(self) -> Fraction:
        return sum((e.length for e in self._edges.values()), Fraction(0))

    def core(self) -> "MetricGraph":
        """The compact part: the same graph with all rays removed."""
        if not self._rays:
            return self
        return MetricGraph(self._vertices, self._edge_tuples(), (), self._weights)

    def with_weights(self, weights: Mapping[str, int]) -> "MetricGraph":
        rays = [(r.id, r.base) for r in self._rays.values()]
        return MetricGraph(self._vertices, self._edge_tuples(), rays, weights)

    def _edge_tuples(self):
        return [(e.id, e.tail, e.head, e.length) for e in self._edges.values()]

    # -- points ----------------------------------------------------------
    def point(self, where, offset=None) -> GraphPoint:
        """Normalized point: a vertex id, or an edge/ray id plus an offset.

        ``where`` may also be a :class:`GraphPoint`, which is re-normalized.
        """
        if isinstance(where, GraphPoint):
            if where.kind in ("vertex", "end"):
                self._check_point(where)
                return where
            return self.point(where.ident, where.offset)
        where = str(where)
        if offset is None:
            if where not in self._weights:
                raise GraphError(f"unknown vertex {where!r}")
            return GraphPoint.vertex(where)
        t = as_fraction(offset)
        if where in self._edges:
            e = self._edges[where]
            if t < 0 or t > e.length:
                raise GraphError(f"offset {t} outside edge {where!r} of length {e.length}")
            if t == 0:
                return GraphPoint.vertex(e.tail)
            if t == e.length:
                return GraphPoint.vertex(e.head)
            return GraphPoint("edge", where, t)
        if where in self._rays:
            if t < 0:
                raise GraphError(f"negative offset on ray {where!r}")
            if t == 0:
                return GraphPoint.vertex(self._rays[where].base)
            return GraphPoint("ray", where, t)
        raise GraphError(f"unknown edge or ray {where!r}")

    def _check_point(self, p: GraphPoint) -> None:
        if p.kind == "vertex" and p.ident not in self._weights:
            raise GraphError(f"unknown vertex {p.ident!r}")
        if p.kind == "end" and p.ident not in self._rays:
            raise GraphError(f"unknown ray {p.ident!r}")
        if p.kind == "edge":
            e = self._edges.get(p.ident)
            if e is None or not 0 < p.offset < e.length:
                raise GraphError(f"{p!r} is not an interior edge point")
        if p.kind == "ray" and (p.ident not in self._rays or p.offset <= 0):
            raise GraphError(f"{p!r} is not an interior ray point")

    def contains(self, p: GraphPoint) -> bool:
        try:
            self._check_point(p)
        except GraphError:
            return False
        return True

    # -- equality / serialization ----------------------------------------
    def _key(self):
        return (
            self._vertices,
            tuple((e.id, e.tail, e.head, e.length) for e in self._edges.values()),
            tuple((r.id, r.base) for r in self._rays.values()),
            tuple(sorted(self._weights.items())),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, MetricGraph) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (
            f"MetricGraph(vertices={list(self._vertices)}, edges={len(self._edges)}, "
            f"rays={len(self._rays)}, genus={genus(self)})"
        )

    def to_dict(self) -> dict:
        from .rational import fraction_to_str

        return {
            "vertices": [
                {"id": v, "weight": w} if w else {"id": v}
                for v, w in self._weights.items()
            ],
            "edges": [
                {"id": e.id, "ends": [e.tail, e.head], "length": fraction_to_str(e.length)}
                for e in self._edges.values()
            ],
            "rays": [{"id": r.id, "base": r.base} for r in self._rays.values()],
        }

    @classmethod
    def from_dict(cls, desc: Mapping) -> "MetricGraph":
        return build_graph(desc)


def _connected(vertices, edges) -> bool:
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in edges:
        parent[find(e.tail)] = find(e.head)
    return len({find(v) for v in vertices}) == 1


def build_graph(description: Mapping) -> MetricGraph:
    """Validate a JSON-style description and build the graph.

    >>> g = build_graph({"vertices": [{"id": "v0"}],
    ...                  "edges": [{"id": "e", "ends": ["v0", "v0"], "length": "4"}]})
    >>> genus(g)
    1
    """
    try:
        vertices = []
        weights = {}
        for item in description["vertices"]:
            if isinstance(item, Mapping):
                vertices.append(item["id"])
                if item.get("weight"):
                    weights[item["id"]] = item["weight"]
            else:
                vertices.append(item)
        edges = []
        for item in description.get("edges", []):
            a, b = item["ends"]
            edges.append((item["id"], a, b, item["length"]))
        rays = [(item["id"], item["base"]) for item in description.get("rays", [])]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph description: {exc}") from exc
    return MetricGraph(vertices, edges, rays, weights)


def genus(g: MetricGraph) -> int:
    """First Betti number ``#edges - #vertices + 1``; rays do not count."""
    return len(g.edges) - len(g.vertices) + 1


def classify_edge(g: MetricGraph, e: str) -> EdgeType:
    """Connected type iff removing the open edge leaves the graph connected."""
    e = str(e)
    if e not in g.edges:
        raise GraphError(f"unknown edge {e!r}")
    edge = g.edges[e]
    if edge.is_loop:
        return EdgeType.CONNECTED
    others = [f for f in g.edges.values() if f.id != e]
    if _connected(g.vertices, others):
        return EdgeType.CONNECTED
    return EdgeType.DISCONNECTED


def bridges(g: MetricGraph) -> list[str]:
    return [e for e in g.edges if classify_edge(g, e) is EdgeType.DISCONNECTED]


def middle_point(g: MetricGraph, e: str) -> GraphPoint:
    e = str(e)
    if e in g.rays:
        raise GraphError("a ray has no middle point")
    if e not in g.edges:
        raise GraphError(f"unknown edge {e!r}")
    return g.point(e, g.edges[e].length / 2)


def _vertex_distances(g: MetricGraph, sources: Mapping[str, Fraction]) -> dict[str, Fraction]:
    dist = dict(sources)
    heap = [(d, v) for v, d in sources.items()]
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for eid, side in g.incident(v):
            e = g.edges[eid]
            w = e.head if side == "tail" else e.tail
            nd = d + e.length
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def _anchors(g: MetricGraph, p: GraphPoint) -> dict[str, Fraction]:
    if p.kind == "vertex":
        return {p.ident: Fraction(0)}
    if p.kind == "edge":
        e = g.edges[p.ident]
        out = {e.tail: p.offset}
        out[e.head] = min(out.get(e.head, e.length), e.length - p.offset)
        return out
    if p.kind == "ray":
        return {g.rays[p.ident].base: p.offset}
    raise GraphError("distance to a ray end is infinite")


def distance(g: MetricGraph, x: GraphPoint, y: GraphPoint) -> Fraction:
    """Exact shortest-path distance between two points."""
    x, y = g.point(x), g.point(y)
    if x == y:
        return Fraction(0)
    dist = _vertex_distances(g, _anchors(g, x))
    best = None
    for v, d in _anchors(g, y).items():
        cand = dist[v] + d
        if best is None or cand < best:
            best = cand
    if x.kind == y.kind and x.kind in ("edge", "ray") and x.ident == y.ident:
        best = min(best, abs(x.offset - y.offset))
    return best


def distances_from(g: MetricGraph, x: GraphPoint) -> dict[str, Fraction]:
    """Distances from ``x`` to every vertex."""
    return _vertex_distances(g, _anchors(g, g.point(x)))


@dataclass(frozen=True)
class Subdivision:
    """Result of :func:`subdivide`.

    ``pieces[e]`` lists ``(new edge id, start offset, end offset)`` for every
    original edge ``e``, in order along ``e``.
    """

    original: MetricGraph
    graph: MetricGraph
    pieces: Mapping[str, tuple[tuple[str, Fraction, Fraction], ...]] = field(repr=False)

    def relocate(self, p: GraphPoint) -> GraphPoint:
        """Image of an original point in the subdivided graph."""
        p = self.original.point(p)
        if p.kind != "edge":
            return p
        for new_id, a, b in self.pieces[p.ident]:
            if a <= p.offset <= b:
                return self.graph.point(new_id, p.offset - a)
        raise AssertionError("offset not covered by pieces")

    def restore(self, p: GraphPoint) -> GraphPoint:
        """Inverse of :meth:`relocate`."""
        p = self.graph.point(p)
        if p.kind == "vertex":
            if p.ident in self.original.weights:
                return p
        for old, pieces in self.pieces.items():
            for new_id, a, b in pieces:
                if p.kind == "edge" and p.ident == new_id:
                    return self.original.point(old, a + p.offset)
                if p.kind == "vertex":
                    e = self.graph.edges[new_id]
                    if e.tail == p.ident:
                        return self.original.point(old, a)
                    if e.head == p.ident:
                        return self.original.point(old, b)
        return p


def subdivide(g: MetricGraph, pts: Iterable[GraphPoint]) -> Subdivision:
    """Insert the given edge-interior points as new vertices.

    New vertices are named ``"<edge>@<offset>"`` and new edges
    ``"<edge>.<i>"``; edges without inserted points keep their id.
    """
    cuts: dict[str, set[Fraction]] = {}
    for p in pts:
        p = g.point(p)
        if p.kind == "edge":
            cuts.setdefault(p.ident, set()).add(p.offset)
        elif p.kind in ("ray", "end"):
            raise GraphError("only edge-interior points can be inserted")
    used = set(g.vertices)
    vertices = list(g.vertices)
    edges = []
    pieces = {}
    for e in g.edges.values():
        offs = sorted(cuts.get(e.id, ()))
        if not offs:
            edges.append((e.id, e.tail, e.head, e.length))
            pieces[e.id] = ((e.id, Fraction(0), e.length),)
            continue
        names = []
        for t in offs:
            name = f"{e.id}@{t}"
            while name in used:
                name += "'"
            used.add(name)
            names.append(name)
            vertices.append(name)
        chain = [e.tail, *names, e.head]
        stops = [Fraction(0), *offs, e.length]
        plist = []
        for i in range(len(stops) - 1):
            new_id = f"{e.id}.{i}"
            edges.append((new_id, chain[i], chain[i + 1], stops[i + 1] - stops[i]))
            plist.append((new_id, stops[i], stops[i + 1]))
        pieces[e.id] = tuple(plist)
    rays = [(r.id, r.base) for r in g.rays.values()]
    new = MetricGraph(vertices, edges, rays, dict(g.weights))
    return Subdivision(g, new, MappingProxyType(pieces))
