"""Reduced divisors on compact metric graphs.

:func:`reduce_divisor` runs in two phases.

1. Every negative coefficient away from the base point is paid off by a
   "borrow": for a point ``p`` the divisor ``(g+1)[v0] - [p]`` is reduced at
   ``p``; the result is effective, so adding it repeatedly moves chips from
   ``v0`` onto ``p`` without creating new negative coefficients.
2. Metric burning.  Fire spreads from ``v0`` through the segments cut out by
   the vertices and the current support.  A point burns once the number of
   burning directions reaching it exceeds its chip count.  If something stays
   unburnt, the unburnt region is fired outward by the length of its shortest
   outgoing segment, as many times at once as every boundary point can afford.

Every firing is recorded in the transcript and its firing function is added
to the witness, so ``reduced == d + div(witness)`` holds exactly.

:func:`dhar_oracle` is an independent check that only works on integral data:
it subdivides every edge into unit pieces and runs the classical finite
burning algorithm there.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .divisors import Divisor, PLFunction, pl_sum
from .graph import GraphError, GraphPoint, MetricGraph, genus
from .rational import ceil_div, lcm_denominators

__all__ = [
    "ReductionError",
    "ReductionResult",
    "dhar_oracle",
    "equivalence_witness",
    "effective_of_bounded_class",
    "has_effective_representative",
    "is_reduced",
    "push_ends",
    "ray_pushing_function",
    "reduce_divisor",
    "rescaled_oracle",
]

MAX_FIRINGS = 200_000


class ReductionError(RuntimeError):
    """Raised when a reduction cannot be carried out."""


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of :func:`reduce_divisor`.

    Attributes
    ----------
    reduced : Divisor
        The unique ``base``-reduced divisor equivalent to the input.
    witness : PLFunction
        ``reduced == input + div(witness)``.
    transcript : tuple of dict
        Elementary moves in the order they were applied.
    """

    reduced: Divisor
    witness: PLFunction
    transcript: tuple = field(default=(), repr=False)
    base: GraphPoint | None = None


# ---------------------------------------------------------------------------
# segment model


def _segments(g: MetricGraph, pts):
    """Cut every edge at the given points.

    Returns ``(segs, inc)`` where ``segs[i] = (edge, a, b, P_a, P_b)`` and
    ``inc[P]`` lists ``(i, side)`` with ``side`` 0 for the ``a`` end.
    """
    on_edge: dict[str, list[Fraction]] = defaultdict(list)
    for p in pts:
        if p.kind == "edge":
            on_edge[p.ident].append(p.offset)
    segs = []
    inc: dict[GraphPoint, list[tuple[int, int]]] = defaultdict(list)
    for eid, e in g.edges.items():
        offs = sorted(set(on_edge.get(eid, ())))
        stops = [Fraction(0), *offs, e.length]
        chain = [GraphPoint.vertex(e.tail)]
        chain += [GraphPoint("edge", eid, t) for t in offs]
        chain.append(GraphPoint.vertex(e.head))
        for i in range(len(stops) - 1):
            idx = len(segs)
            segs.append((eid, stops[i], stops[i + 1], chain[i], chain[i + 1]))
            inc[chain[i]].append((idx, 0))
            inc[chain[i + 1]].append((idx, 1))
    return segs, inc


def _burn(model_pts, segs, inc, chips: Mapping[GraphPoint, int], base: GraphPoint):
    """Return the set of burnt model points and the per-point burning counts."""
    burnt = {base}
    count: dict[GraphPoint, int] = defaultdict(int)
    queue = deque([base])
    while queue:
        b = queue.popleft()
        for idx, side in inc.get(b, ()):
            seg = segs[idx]
            other = seg[4] if side == 0 else seg[3]
            if other in burnt:
                continue
            count[other] += 1
            if count[other] > chips.get(other, 0):
                burnt.add(other)
                queue.append(other)
    return burnt, count


def _firing_function(g, segs, unburnt, delta, m) -> PLFunction:
    """``m * max(0, delta - dist(x, A))`` for the closed unburnt region ``A``."""
    top = m * delta
    vv = {v: (top if GraphPoint.vertex(v) in unburnt else 0) for v in g.vertices}
    knots: dict[str, list] = defaultdict(list)
    for eid, a, b, pa, pb in segs:
        ua, ub = pa in unburnt, pb in unburnt
        if a > 0:
            knots[eid].append((a, top if ua else 0))
        if ua and not ub and a + delta < b:
            knots[eid].append((a + delta, 0))
        if ub and not ua and b - delta > a:
            knots[eid].append((b - delta, 0))
    return PLFunction.from_knots(g, vv, knots)


def _burning_phase(g: MetricGraph, chips: dict, base: GraphPoint, moves: list, pieces: list):
    """Fire unburnt regions until everything burns.  Mutates ``chips``."""
    for _ in range(MAX_FIRINGS):
        pts = {GraphPoint.vertex(v) for v in g.vertices} | set(chips) | {base}
        segs, inc = _segments(g, pts)
        burnt, count = _burn(pts, segs, inc, chips, base)
        unburnt = pts - burnt
        if not unburnt:
            return
        boundary = sorted(u for u in unburnt if count.get(u, 0) > 0)
        out_segs = []
        for u in boundary:
            for idx, side in inc[u]:
                seg = segs[idx]
                other = seg[4] if side == 0 else seg[3]
                if other in burnt:
                    out_segs.append((u, idx, side))
        delta = min(segs[idx][2] - segs[idx][1] for _, idx, _ in out_segs)
        m = min(chips.get(u, 0) // count[u] for u in boundary)
        if m < 1:
            raise AssertionError("boundary point of an unburnt region is not saturated")
        for u, idx, side in out_segs:
            eid, a, b, _, _ = segs[idx]
            chips[u] -= m
            land = g.point(eid, a + delta if side == 0 else b - delta)
            chips[land] = chips.get(land, 0) + m
        for p in [p for p, c in chips.items() if c == 0]:
            del chips[p]
        pieces.append(_firing_function(g, segs, unburnt, delta, m))
        moves.append(
            {"kind": "fire", "region": sorted(unburnt), "delta": delta, "multiplicity": m}
        )
    raise ReductionError(f"no convergence after {MAX_FIRINGS} firings")


def _check_input(g: MetricGraph, d: Divisor, base) -> GraphPoint:
    if g.rays:
        raise GraphError("reduction works on compact graphs; reduce on g.core() instead")
    base = g.point(base)
    for p in d:
        if not g.contains(p):
            raise GraphError(f"{p!r} is not a point of the graph")
    return base


def _burning_only(g, d: Divisor, base: GraphPoint):
    chips = dict(d)
    moves: list = []
    pieces: list = []
    _burning_phase(g, chips, base, moves, pieces)
    witness = pl_sum(pieces) if pieces else PLFunction.constant(g)
    return Divisor(chips), witness, moves


def reduce_divisor(g: MetricGraph, d: Divisor, v0) -> ReductionResult:
    """The ``v0``-reduced divisor equivalent to ``d``, with witness and transcript.

    Examples
    --------
    >>> from tropskel.catalog import circle
    >>> g = circle(4)
    >>> w = g.point("e", 2)
    >>> reduce_divisor(g, Divisor({w: 3}), g.point("v0")).reduced
    Divisor(1*edge:e@2 + 2*vertex:v0)
    """
    base = _check_input(g, d, v0)
    moves: list = []
    pieces: list = []
    coeffs: list[int] = []
    chips = dict(d)
    negatives = sorted(p for p, c in chips.items() if c < 0 and p != base)
    if negatives:
        gg = genus(g)
        for p in negatives:
            a = -chips.get(p, 0)
            if a <= 0:
                continue
            loan = Divisor({base: gg + 1, p: -1})
            r, w, _ = _burning_only(g, loan, p)
            for q, c in (a * (r - loan)).items():
                chips[q] = chips.get(q, 0) + c
            pieces.append(w)
            coeffs.append(a)
            moves.append({"kind": "borrow", "at": p, "times": a})
        chips = {p: c for p, c in chips.items() if c}
    fire_pieces: list = []
    _burning_phase(g, chips, base, moves, fire_pieces)
    pieces += fire_pieces
    coeffs += [1] * len(fire_pieces)
    witness = pl_sum(pieces, coeffs) if pieces else PLFunction.constant(g)
    return ReductionResult(Divisor(chips), witness, tuple(moves), base)


def is_reduced(g: MetricGraph, d: Divisor, v0) -> bool:
    """Check the defining property directly by one burning pass."""
    base = _check_input(g, d, v0)
    if any(c < 0 for p, c in d.items() if p != base):
        return False
    pts = {GraphPoint.vertex(v) for v in g.vertices} | set(d) | {base}
    segs, inc = _segments(g, pts)
    burnt, _ = _burn(pts, segs, inc, dict(d), base)
    return burnt == pts


def push_ends(g: MetricGraph, d: Divisor) -> Divisor:
    """Move every chip on a ray (ends included) to the ray's base vertex.

    Each ray is a tree hanging off the core, so this stays in the same class.
    """
    out: dict[GraphPoint, int] = defaultdict(int)
    for p, c in d.items():
        if p.kind in ("ray", "end"):
            out[GraphPoint.vertex(g.rays[p.ident].base)] += c
        else:
            out[p] += c
    return Divisor(out)


def has_effective_representative(g: MetricGraph, d: Divisor) -> bool:
    """Whether ``|d|`` is non-empty, decided at the smallest vertex."""
    core = g.core()
    d = push_ends(g, d)
    r = reduce_divisor(core, d, GraphPoint.vertex(core.vertices[0]))
    return r.reduced.is_effective()


def effective_of_bounded_class(g: MetricGraph, d: Divisor) -> Divisor:
    """An effective divisor equivalent to ``d`` (the reduced form at the smallest vertex)."""
    core = g.core()
    d = push_ends(g, d)
    r = reduce_divisor(core, d, GraphPoint.vertex(core.vertices[0]))
    if not r.reduced.is_effective():
        if d.degree >= genus(core):
            raise AssertionError("degree at least the genus but no effective representative")
        raise ReductionError("the class has no effective representative")
    return r.reduced


def ray_pushing_function(g: MetricGraph, d: Divisor) -> PLFunction:
    """``phi`` with ``d - push_ends(g, d) == div(phi)`` (end terms included).

    A chip at offset ``s`` on a ray is matched by ``-min(t, s)`` on that ray;
    a chip at the ray's end by ``-t``.
    """
    pieces = []
    coeffs = []
    for p, c in d.items():
        if p.kind == "ray":
            pieces.append(PLFunction.from_knots(g, ray_knots={p.ident: ([(p.offset, -p.offset)], 0)}))
        elif p.kind == "end":
            pieces.append(PLFunction.from_knots(g, ray_knots={p.ident: ((), -1)}))
        else:
            continue
        coeffs.append(c)
    return pl_sum(pieces, coeffs) if pieces else PLFunction.constant(g)


def equivalence_witness(g: MetricGraph, x: Divisor, y: Divisor) -> PLFunction | None:
    """``w`` with ``x - y == div(w)`` counting ray ends, or ``None`` if inequivalent."""
    from .divisors import is_linearly_equivalent

    core = g.core()
    ok, wc = is_linearly_equivalent(core, push_ends(g, x), push_ends(g, y))
    if not ok:
        return None
    if not g.rays:
        return wc
    return pl_sum([wc.on_graph(g), ray_pushing_function(g, x), ray_pushing_function(g, y)], [1, 1, -1])


# ---------------------------------------------------------------------------
# finite-graph oracle


def _unit_model(g: MetricGraph):
    """Unit subdivision as an adjacency multigraph.

    Nodes are original vertex ids or ``(edge, k)`` for interior integer
    offsets ``k``.
    """
    adj: dict = defaultdict(list)
    for v in g.vertices:
        adj[v]
    for eid, e in g.edges.items():
        if e.length.denominator != 1:
            raise ValueError("oracle needs integral edge lengths")
        n = int(e.length)
        chain = [e.tail, *[(eid, k) for k in range(1, n)], e.head]
        for a, b in zip(chain, chain[1:]):
            adj[a].append(b)
            adj[b].append(a)
    return adj


def _node_of(g: MetricGraph, p: GraphPoint):
    if p.kind == "vertex":
        return p.ident
    if p.kind == "edge" and p.offset.denominator == 1:
        return (p.ident, int(p.offset))
    raise ValueError(f"oracle needs lattice points, got {p!r}")


def _point_of(g: MetricGraph, node) -> GraphPoint:
    if isinstance(node, tuple):
        return g.point(node[0], node[1])
    return GraphPoint.vertex(node)


def dhar_oracle(g: MetricGraph, d: Divisor, v0) -> Divisor:
    """Reduced divisor by finite burning on the unit subdivision.

    Requires integral lengths and support on integer offsets.  Negative
    coefficients are cleared first by firing BFS balls around ``v0``, from the
    outermost level inwards.
    """
    if g.rays:
        raise GraphError("oracle works on compact graphs")
    adj = _unit_model(g)
    q = _node_of(g, g.point(v0))
    chips: dict = defaultdict(int)
    for p, c in d.items():
        chips[_node_of(g, p)] += c

    level = {q: 0}
    order = [q]
    queue = deque([q])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in level:
                level[y] = level[x] + 1
                order.append(y)
                queue.append(y)
    depth = max(level.values())
    for lv in range(depth, 0, -1):
        ball = {x for x in order if level[x] < lv}
        need = 0
        for x in order:
            if level[x] == lv and chips[x] < 0:
                gain = sum(1 for y in adj[x] if y in ball)
                need = max(need, ceil_div(-chips[x], gain))
        if need:
            _fire_set(adj, chips, ball, need)

    for _ in range(MAX_FIRINGS):
        burnt = {q}
        cnt: dict = defaultdict(int)
        queue = deque([q])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y in burnt:
                    continue
                cnt[y] += 1
                if cnt[y] > chips[y]:
                    burnt.add(y)
                    queue.append(y)
        unburnt = {x for x in adj if x not in burnt}
        if not unburnt:
            break
        m = min(chips[x] // cnt[x] for x in unburnt if cnt[x] > 0)
        _fire_set(adj, chips, unburnt, m)
    else:
        raise ReductionError("oracle did not converge")
    return Divisor({_point_of(g, x): c for x, c in chips.items() if c})


def _fire_set(adj, chips, s, times):
    for x in s:
        for y in adj[x]:
            if y not in s:
                chips[x] -= times
                chips[y] += times


def rescaled_oracle(g: MetricGraph, d: Divisor, v0) -> Divisor:
    """Run :func:`dhar_oracle` after scaling all data to integers."""
    base = g.point(v0)
    vals = [e.length for e in g.edges.values()]
    vals += [p.offset for p in [*d, base] if p.kind == "edge"]
    q = lcm_denominators(vals)
    big = MetricGraph(
        g.vertices,
        [(e.id, e.tail, e.head, e.length * q) for e in g.edges.values()],
        (),
        dict(g.weights),
    )

    def up(p):
        return big.point(p.ident, p.offset * q) if p.kind == "edge" else p

    def down(p):
        return g.point(p.ident, p.offset / q) if p.kind == "edge" else p

    red = dhar_oracle(big, Divisor({up(p): c for p, c in d.items()}), up(base))
    return Divisor({down(p): c for p, c in red.items()})
