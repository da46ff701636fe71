"""Divisors and piecewise-linear functions with integer slopes.

A :class:`Divisor` is a finite integer combination of :class:`GraphPoint`
values.  A :class:`PLFunction` stores, for every edge, the list of slope
changes along the edge measured from its tail, and for every ray the same data
plus a final slope that continues to infinity.

Orders follow the "sum of outgoing slopes" rule.  On graphs with rays the
point at infinity of ray ``r`` is given the order ``-final_slope(r)``, which
makes every principal divisor have degree zero once these end terms are
included.  By default :func:`principal_divisor` reports only the finite part;
pass ``ends=True`` to include the end terms.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .graph import GraphError, GraphPoint, MetricGraph
from .rational import as_fraction

__all__ = [
    "Divisor",
    "PLFunction",
    "circle_arc_position",
    "circle_class_invariant",
    "circle_function",
    "degree",
    "is_linearly_equivalent",
    "order_at",
    "pl_combine",
    "pl_sum",
    "principal_divisor",
    "restrict_degree",
]


class Divisor(Mapping):
    """Immutable finite map from :class:`GraphPoint` to non-zero integers.

    >>> d = Divisor({GraphPoint.vertex("v0"): 2})
    >>> d.degree
    2
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[GraphPoint, int] | Iterable = ()):
        acc: dict[GraphPoint, int] = defaultdict(int)
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for p, c in items:
            if not isinstance(p, GraphPoint):
                raise TypeError(f"divisor support must be GraphPoints, got {p!r}")
            if int(c) != c:
                raise ValueError("divisor coefficients must be integers")
            acc[p] += int(c)
        self._c = {p: c for p, c in sorted(acc.items()) if c}
        self._hash = None

    @classmethod
    def from_points(cls, points: Iterable[GraphPoint]) -> "Divisor":
        return cls((p, 1) for p in points)

    def __getitem__(self, p):
        return self._c.get(p, 0)

    def __iter__(self):
        return iter(self._c)

    def __len__(self):
        return len(self._c)

    def __contains__(self, p):
        return p in self._c

    def __eq__(self, other):
        if isinstance(other, Divisor):
            return self._c == other._c
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._c.items()))
        return self._hash

    def __repr__(self):
        if not self._c:
            return "Divisor(0)"
        return "Divisor(" + " + ".join(f"{c}*{p!r}" for p, c in self._c.items()) + ")"

    @property
    def degree(self) -> int:
        return sum(self._c.values())

    @property
    def support(self) -> tuple[GraphPoint, ...]:
        return tuple(self._c)

    def is_effective(self) -> bool:
        return all(c > 0 for c in self._c.values())

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(list(self._c.items()) + list(other._c.items()))

    def __neg__(self) -> "Divisor":
        return Divisor({p: -c for p, c in self._c.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        return Divisor({p: k * c for p, c in self._c.items()})

    __rmul__ = __mul__

    def positive_part(self) -> "Divisor":
        return Divisor({p: c for p, c in self._c.items() if c > 0})

    def negative_part(self) -> "Divisor":
        """``max(-D, 0)``, so that ``D = positive_part - negative_part``."""
        return Divisor({p: -c for p, c in self._c.items() if c < 0})

    def restrict(self, s) -> "Divisor":
        pred = _as_predicate(s)
        return Divisor({p: c for p, c in self._c.items() if pred(p)})

    def pointwise_max(self, other: "Divisor") -> "Divisor":
        keys = set(self._c) | set(other._c)
        return Divisor({p: max(self[p], other[p]) for p in keys})

    def finite_part(self) -> "Divisor":
        return Divisor({p: c for p, c in self._c.items() if p.kind != "end"})


def _as_predicate(s) -> Callable[[GraphPoint], bool]:
    if callable(s):
        return s
    members = set(s)
    return lambda p: p in members


def degree(d: Divisor) -> int:
    return d.degree


def restrict_degree(d: Divisor, s) -> int:
    """Degree of ``d`` restricted to a predicate or a set of points."""
    return d.restrict(s).degree


# ---------------------------------------------------------------------------
# piecewise-linear functions


def _normalize_breaks(breaks, length=None, where="") -> tuple[tuple[Fraction, int], ...]:
    out: list[tuple[Fraction, int]] = []
    for off, slope in breaks:
        off = as_fraction(off)
        if int(slope) != slope:
            raise ValueError(f"non-integer slope {slope} on {where}")
        slope = int(slope)
        if out and off <= out[-1][0]:
            raise ValueError(f"breakpoints on {where} must be strictly increasing")
        if length is not None and off >= length:
            raise ValueError(f"breakpoint {off} beyond the end of {where}")
        if out and out[-1][1] == slope:
            continue
        out.append((off, slope))
    if not out or out[0][0] != 0:
        raise ValueError(f"the first breakpoint on {where} must sit at offset 0")
    return tuple(out)


def _integrate(start: Fraction, breaks, t: Fraction) -> Fraction:
    val = start
    for i, (off, slope) in enumerate(breaks):
        if off >= t:
            break
        nxt = breaks[i + 1][0] if i + 1 < len(breaks) else None
        stop = t if nxt is None or nxt > t else nxt
        val += slope * (stop - off)
    return val


def _slope_right(breaks, t: Fraction) -> int:
    s = breaks[0][1]
    for off, slope in breaks:
        if off <= t:
            s = slope
        else:
            break
    return s


def _slope_left(breaks, t: Fraction) -> int:
    s = breaks[0][1]
    for off, slope in breaks:
        if off < t:
            s = slope
        else:
            break
    return s


class PLFunction:
    """A continuous piecewise-linear function with integer slopes.

    Parameters
    ----------
    graph : MetricGraph
    vertex_values : mapping vertex -> rational
        Values at every vertex.
    edge_breaks : mapping edge id -> sequence of ``(offset, slope)``
        The slope holds from ``offset`` to the next breakpoint.  The first
        offset must be ``0``.  Missing edges are rejected.
    ray_breaks : mapping ray id -> sequence of ``(offset, slope)``
        As for edges; the last slope continues to infinity.

    The end value of every edge is checked against its head vertex value.
    """

    __slots__ = ("graph", "_vv", "_edges", "_rays", "_hash")

    def __init__(self, graph: MetricGraph, vertex_values, edge_breaks=None, ray_breaks=None):
        self.graph = graph
        vv = {str(v): as_fraction(x) for v, x in vertex_values.items()}
        if set(vv) != set(graph.vertices):
            raise ValueError("vertex values must be given for exactly the graph's vertices")
        edge_breaks = dict(edge_breaks or {})
        ray_breaks = dict(ray_breaks or {})
        if set(map(str, edge_breaks)) != set(graph.edges):
            raise ValueError("slope data must be given for every edge")
        if set(map(str, ray_breaks)) != set(graph.rays):
            raise ValueError("slope data must be given for every ray")
        edges = {}
        for eid, e in graph.edges.items():
            br = _normalize_breaks(edge_breaks[eid], e.length, f"edge {eid}")
            end = _integrate(vv[e.tail], br, e.length)
            if end != vv[e.head]:
                raise ValueError(
                    f"discontinuity at {e.head!r} along edge {eid!r}: {end} != {vv[e.head]}"
                )
            edges[eid] = br
        rays = {rid: _normalize_breaks(ray_breaks[rid], None, f"ray {rid}") for rid in graph.rays}
        self._vv = vv
        self._edges = edges
        self._rays = rays
        self._hash = None

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, graph: MetricGraph, c=0) -> "PLFunction":
        c = as_fraction(c)
        return cls(
            graph,
            {v: c for v in graph.vertices},
            {e: [(0, 0)] for e in graph.edges},
            {r: [(0, 0)] for r in graph.rays},
        )

    @classmethod
    def from_knots(
        cls,
        graph: MetricGraph,
        vertex_values: Mapping | None = None,
        edge_knots: Mapping | None = None,
        ray_knots: Mapping | None = None,
        default=0,
    ) -> "PLFunction":
        """Build a function by linear interpolation between knots.

        ``edge_knots[e]`` lists ``(offset, value)`` pairs strictly inside the
        edge.  ``ray_knots[r]`` is ``(knots, final_slope)``.  Vertices missing
        from ``vertex_values`` take ``default``; edges and rays without knots
        interpolate linearly between their endpoints (rays stay constant).
        """
        vertex_values = {str(k): as_fraction(v) for k, v in (vertex_values or {}).items()}
        default = as_fraction(default)
        vv = {v: vertex_values.get(v, default) for v in graph.vertices}
        edge_knots = edge_knots or {}
        ray_knots = ray_knots or {}
        eb = {}
        for eid, e in graph.edges.items():
            pts = [(Fraction(0), vv[e.tail])]
            pts += sorted((as_fraction(o), as_fraction(x)) for o, x in edge_knots.get(eid, ()))
            pts.append((e.length, vv[e.head]))
            eb[eid] = _knots_to_breaks(pts, f"edge {eid}")
        rb = {}
        for rid, r in graph.rays.items():
            knots, final = ray_knots.get(rid, ((), 0))
            pts = [(Fraction(0), vv[r.base])]
            pts += sorted((as_fraction(o), as_fraction(x)) for o, x in knots)
            br = list(_knots_to_breaks(pts, f"ray {rid}")) if len(pts) > 1 else []
            br.append((pts[-1][0], final))
            rb[rid] = br
        return cls(graph, vv, eb, rb)

    # -- accessors -------------------------------------------------------
    def vertex_value(self, v: str) -> Fraction:
        return self._vv[str(v)]

    @property
    def vertex_values(self) -> Mapping[str, Fraction]:
        return dict(self._vv)

    def edge_breaks(self, eid: str) -> tuple[tuple[Fraction, int], ...]:
        return self._edges[eid]

    def ray_breaks(self, rid: str) -> tuple[tuple[Fraction, int], ...]:
        return self._rays[rid]

    def final_slope(self, rid: str) -> int:
        return self._rays[rid][-1][1]

    def breakpoints(self, ident: str) -> list[Fraction]:
        """Interior breakpoint offsets on an edge or ray."""
        br = self._edges.get(ident) or self._rays[ident]
        return [off for off, _ in br[1:]]

    def __call__(self, p) -> Fraction:
        return self.value(p)

    def value(self, p: GraphPoint) -> Fraction:
        p = self.graph.point(p)
        if p.kind == "vertex":
            return self._vv[p.ident]
        if p.kind == "edge":
            e = self.graph.edges[p.ident]
            return _integrate(self._vv[e.tail], self._edges[p.ident], p.offset)
        if p.kind == "ray":
            r = self.graph.rays[p.ident]
            return _integrate(self._vv[r.base], self._rays[p.ident], p.offset)
        raise GraphError("a function has no finite value at a ray end")

    def value_on(self, ident: str, t) -> Fraction:
        """Value at offset ``t`` along an edge or ray (endpoints allowed)."""
        return self.value(self.graph.point(ident, t))

    def slope_on(self, ident: str, t, side: str = "right") -> int:
        br = self._edges.get(ident) or self._rays[ident]
        t = as_fraction(t)
        return _slope_right(br, t) if side == "right" else _slope_left(br, t)

    # -- orders ----------------------------------------------------------
    def order_at(self, p: GraphPoint) -> int:
        """Sum of outgoing slopes at ``p``; for a ray end, minus the final slope."""
        g = self.graph
        p = g.point(p)
        if p.kind == "vertex":
            total = 0
            for eid, side in g.incident(p.ident):
                br = self._edges[eid]
                total += br[0][1] if side == "tail" else -br[-1][1]
            for rid in g.rays_at(p.ident):
                total += self._rays[rid][0][1]
            return total
        if p.kind == "end":
            return -self.final_slope(p.ident)
        br = self._edges[p.ident] if p.kind == "edge" else self._rays[p.ident]
        return _slope_right(br, p.offset) - _slope_left(br, p.offset)

    def principal_divisor(self, ends: bool = False) -> Divisor:
        g = self.graph
        coeffs: dict[GraphPoint, int] = {}
        for v in g.vertices:
            coeffs[GraphPoint.vertex(v)] = self.order_at(GraphPoint.vertex(v))
        for eid, br in self._edges.items():
            prev = br[0][1]
            for off, slope in br[1:]:
                coeffs[GraphPoint("edge", eid, off)] = slope - prev
                prev = slope
        for rid, br in self._rays.items():
            prev = br[0][1]
            for off, slope in br[1:]:
                coeffs[GraphPoint("ray", rid, off)] = slope - prev
                prev = slope
            if ends:
                coeffs[GraphPoint.end(rid)] = -br[-1][1]
        return Divisor(coeffs)

    def end_orders(self) -> dict[str, int]:
        """Per-ray end ledger ``-final_slope``; balances the finite degree."""
        return {rid: -br[-1][1] for rid, br in self._rays.items()}

    # -- arithmetic ------------------------------------------------------
    def _key(self):
        return (
            tuple(sorted(self._vv.items())),
            tuple(sorted(self._edges.items())),
            tuple(sorted(self._rays.items())),
        )

    def __eq__(self, other):
        if not isinstance(other, PLFunction):
            return NotImplemented
        return self.graph == other.graph and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"PLFunction(vertices={dict(self._vv)}, edges={self._edges}, rays={self._rays})"

    def __add__(self, other):
        if isinstance(other, PLFunction):
            return pl_combine(self, other, 1, 1)
        return self.shift(other)

    def __radd__(self, other):
        return self.shift(other)

    def __sub__(self, other):
        if isinstance(other, PLFunction):
            return pl_combine(self, other, 1, -1)
        return self.shift(-as_fraction(other))

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, k: int):
        return self.scale(k)

    __rmul__ = __mul__

    def scale(self, k: int) -> "PLFunction":
        if int(k) != k:
            raise ValueError("only integer multiples keep slopes integral")
        k = int(k)
        if k == 0:
            return PLFunction.constant(self.graph)
        return PLFunction(
            self.graph,
            {v: k * x for v, x in self._vv.items()},
            {e: [(o, k * s) for o, s in br] for e, br in self._edges.items()},
            {r: [(o, k * s) for o, s in br] for r, br in self._rays.items()},
        )

    def shift(self, c) -> "PLFunction":
        c = as_fraction(c)
        return PLFunction(
            self.graph, {v: x + c for v, x in self._vv.items()}, self._edges, self._rays
        )

    def max_abs_slope(self) -> int:
        return max(
            (abs(s) for br in [*self._edges.values(), *self._rays.values()] for _, s in br),
            default=0,
        )

    def on_graph(self, graph: MetricGraph, fill_rays: bool = True) -> "PLFunction":
        """Transport to a graph with the same core, extending by constants on new rays."""
        rays = {}
        for rid, r in graph.rays.items():
            if rid in self._rays and self.graph.rays[rid].base == r.base:
                rays[rid] = self._rays[rid]
            elif fill_rays:
                rays[rid] = ((Fraction(0), 0),)
        return PLFunction(graph, self._vv, self._edges, rays)


def _knots_to_breaks(pts, where) -> list[tuple[Fraction, int]]:
    out = []
    for (a, x), (b, y) in zip(pts, pts[1:]):
        if b <= a:
            raise ValueError(f"knots on {where} must be strictly increasing and interior")
        slope = (y - x) / (b - a)
        if slope.denominator != 1:
            raise ValueError(f"knots on {where} give non-integer slope {slope}")
        out.append((a, int(slope)))
    return out


def order_at(f: PLFunction, x: GraphPoint) -> int:
    return f.order_at(x)


def principal_divisor(f: PLFunction, ends: bool = False) -> Divisor:
    return f.principal_divisor(ends=ends)


def _combine_breaks(brs, coeffs):
    events: dict[Fraction, int] = defaultdict(int)
    for br, k in zip(brs, coeffs):
        prev = 0
        for off, s in br:
            events[off] += k * (s - prev)
            prev = s
    out = []
    s = 0
    for off in sorted(events):
        s += events[off]
        out.append((off, s))
    return out


def pl_sum(fs: Iterable[PLFunction], coeffs: Iterable[int] | None = None) -> PLFunction:
    """Integer linear combination of many functions on one graph.

    Slope changes are merged as events per edge, so the cost is linear in the
    total number of breakpoints.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one function")
    coeffs = [1] * len(fs) if coeffs is None else [int(k) for k in coeffs]
    g = fs[0].graph
    for f in fs[1:]:
        if f.graph != g:
            raise ValueError("functions live on different graphs")
    vv = {v: sum((k * f._vv[v] for f, k in zip(fs, coeffs)), Fraction(0)) for v in g.vertices}
    eb = {e: _combine_breaks([f._edges[e] for f in fs], coeffs) for e in g.edges}
    rb = {r: _combine_breaks([f._rays[r] for f in fs], coeffs) for r in g.rays}
    return PLFunction(g, vv, eb, rb)


def pl_combine(f: PLFunction, g: PLFunction, a: int = 1, b: int = 1) -> PLFunction:
    """``a*f + b*g``."""
    return pl_sum([f, g], [a, b])


# ---------------------------------------------------------------------------
# linear equivalence


def is_linearly_equivalent(g: MetricGraph, d1: Divisor, d2: Divisor):
    """Decide ``d1 ~ d2`` on a compact graph.

    Returns ``(True, w)`` with ``d1 - d2 = div(w)`` or ``(False, None)``.
    Both divisors are reduced at the smallest vertex and compared.
    """
    from .reduction import reduce_divisor

    if d1.degree != d2.degree:
        return False, None
    base = GraphPoint.vertex(g.vertices[0])
    r1 = reduce_divisor(g, d1, base)
    r2 = reduce_divisor(g, d2, base)
    if r1.reduced != r2.reduced:
        return False, None
    # r1 = d1 + div(w1), r2 = d2 + div(w2)  =>  d1 - d2 = div(w2 - w1)
    return True, pl_combine(r2.witness, r1.witness, 1, -1)


# ---------------------------------------------------------------------------
# circle oracle


def _circle_walk(g: MetricGraph):
    """Traverse a single cycle from its smallest vertex.

    Returns a list of ``(edge id, forward, start arc position)``; ``forward``
    tells whether the walk follows the edge's stored orientation.
    """
    if g.rays or len(g.edges) != len(g.vertices):
        raise GraphError("not a circle")
    if any(g.valence(v) != 2 for v in g.vertices):
        raise GraphError("not a circle")
    start = g.vertices[0]
    walk = []
    arc = Fraction(0)
    v = start
    used: set[str] = set()
    while True:
        cands = sorted(h for h in g.incident(v) if h[0] not in used)
        if not cands:
            break
        eid, side = cands[0]
        e = g.edges[eid]
        forward = side == "tail"
        walk.append((eid, forward, arc))
        used.add(eid)
        arc += e.length
        v = e.head if forward else e.tail
        if v == start:
            break
    if len(walk) != len(g.edges):
        raise GraphError("not a circle")
    return walk


def circle_arc_position(g: MetricGraph, p: GraphPoint) -> Fraction:
    p = g.point(p)
    walk = _circle_walk(g)
    if p.kind == "vertex":
        arc = Fraction(0)
        if p.ident == g.vertices[0]:
            return arc
        for eid, forward, a in walk:
            e = g.edges[eid]
            if (e.head if forward else e.tail) == p.ident:
                return a + e.length
    for eid, forward, a in walk:
        if eid == p.ident:
            e = g.edges[eid]
            return a + (p.offset if forward else e.length - p.offset)
    raise GraphError(f"{p!r} is not on the circle")


def circle_point(g: MetricGraph, arc) -> GraphPoint:
    """Inverse of :func:`circle_arc_position` (arc taken modulo the length)."""
    arc = as_fraction(arc) % g.total_length()
    for eid, forward, a in _circle_walk(g):
        e = g.edges[eid]
        if a <= arc <= a + e.length:
            t = arc - a
            return g.point(eid, t if forward else e.length - t)
    raise AssertionError("arc not located")


def circle_class_invariant(g: MetricGraph, d: Divisor) -> Fraction:
    """``sum(c * arc(p)) mod L`` on a circle of circumference ``L``."""
    _circle_walk(g)
    L = g.total_length()
    total = sum((c * circle_arc_position(g, p) for p, c in d.items()), Fraction(0))
    return total % L


def circle_function(g: MetricGraph, d: Divisor) -> PLFunction | None:
    """A function ``f`` with ``div(f) = d`` on a circle, or ``None``.

    Built directly from arc positions: the slope just after arc position 0 is
    ``s0 = sum(c * p) / L`` and each point ``p`` raises the slope by its
    coefficient.  Such an ``f`` exists iff ``d`` has degree 0 and ``s0`` is an
    integer, i.e. the class invariant vanishes.
    """
    if d.degree != 0:
        return None
    L = g.total_length()
    pos = sorted((circle_arc_position(g, p), c) for p, c in d.items())
    s0 = sum((c * a for a, c in pos), Fraction(0)) / L
    if s0.denominator != 1:
        return None
    c_at_zero = sum(c for a, c in pos if a == 0)
    # slope jumps by c at each point; closing the loop fixes the first slope
    s = c_at_zero + int(s0)
    knots: list[tuple[Fraction, Fraction]] = []
    val = Fraction(0)
    last = Fraction(0)
    for a, c in pos:
        if a == 0:
            continue
        val += s * (a - last)
        knots.append((a, val))
        last = a
        s += c
    val += s * (L - last)
    assert val == 0
    return _function_from_arc_knots(g, knots)


def _function_from_arc_knots(g: MetricGraph, knots) -> PLFunction:
    """Interpolate a function on a circle from ``(arc, value)`` knots (value 0 at arc 0)."""
    walk = _circle_walk(g)
    L = g.total_length()
    full = [(Fraction(0), Fraction(0)), *knots, (L, Fraction(0))]

    def val_at(arc):
        for (a, x), (b, y) in zip(full, full[1:]):
            if a <= arc <= b:
                return x if a == b else x + (y - x) * (arc - a) / (b - a)
        raise AssertionError

    vv = {}
    ek = {}
    for eid, forward, a in walk:
        e = g.edges[eid]
        start_v = e.tail if forward else e.head
        vv[start_v] = val_at(a)
        inner = [(arc, x) for arc, x in knots if a < arc < a + e.length]
        ek[eid] = [((arc - a) if forward else e.length - (arc - a), x) for arc, x in inner]
    return PLFunction.from_knots(g, vv, ek)
