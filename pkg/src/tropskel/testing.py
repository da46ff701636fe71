"""Seeded random generators for graphs, divisors and PL functions.

Shared by the test-suite and the ``selftest`` command so both exercise the
same distributions.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .divisors import Divisor, PLFunction
from .graph import GraphPoint, MetricGraph, genus

__all__ = [
    "random_divisor",
    "random_graph",
    "random_lattice_point",
    "random_pl_function",
    "random_point",
    "random_weighted_graph",
]


def random_graph(
    rng: random.Random,
    max_vertices: int = 6,
    max_edges: int = 9,
    lengths=(1, 2, 3),
    min_genus: int = 0,
    loops: bool = True,
) -> MetricGraph:
    """A connected multigraph: a random spanning tree plus extra edges."""
    n = rng.randint(1, max_vertices)
    vs = [f"x{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        edges.append((vs[rng.randrange(i)], vs[i]))
    lo = max(len(edges), len(edges) + min_genus)
    hi = max(lo, max_edges)
    total = rng.randint(lo, hi)
    while len(edges) < total:
        a, b = rng.choice(vs), rng.choice(vs)
        if a == b and not loops:
            continue
        edges.append((a, b))
    return MetricGraph(
        vs, [(f"e{i}", a, b, Fraction(rng.choice(lengths))) for i, (a, b) in enumerate(edges)]
    )


def random_weighted_graph(rng: random.Random, min_weighted_genus: int = 2, **kw) -> MetricGraph:
    """Random graph with no weight-0 leaf and no island of weighted genus 0.

    Leaves get weight 1 or 2; a weight-0 island gets one unit of weight at a
    random vertex; extra weight is sprinkled until the weighted genus reaches
    the target.
    """
    from .islands import islands

    g = random_graph(rng, **kw)
    weights = {v: 0 for v in g.vertices}
    for v in g.vertices:
        if g.valence(v) <= 1:
            weights[v] = rng.randint(1, 2)
    while genus(g) + sum(weights.values()) < min_weighted_genus:
        weights[rng.choice(g.vertices)] += 1
    g = g.with_weights(weights)
    while True:
        flat = [i for i in islands(g).islands if i.genus == 0]
        if not flat:
            return g
        weights[rng.choice(sorted(flat[0].vertices))] += 1
        g = g.with_weights(weights)


def random_lattice_point(rng: random.Random, g: MetricGraph, step: Fraction = Fraction(1)):
    """A vertex or an edge point at a multiple of ``step``."""
    choices = [GraphPoint.vertex(v) for v in g.vertices]
    for eid, e in g.edges.items():
        k = int(e.length / step)
        choices += [g.point(eid, i * step) for i in range(1, k) if i * step < e.length]
    return rng.choice(choices)


def random_point(rng: random.Random, g: MetricGraph, denominator: int = 4) -> GraphPoint:
    if not g.edges or rng.random() < 0.3:
        return GraphPoint.vertex(rng.choice(g.vertices))
    eid = rng.choice(list(g.edges))
    e = g.edges[eid]
    t = Fraction(rng.randrange(0, int(e.length * denominator) + 1), denominator)
    return g.point(eid, min(t, e.length))


def random_divisor(
    rng: random.Random,
    g: MetricGraph,
    terms: int = 4,
    max_coeff: int = 5,
    degree: int | None = None,
    lattice: Fraction | None = Fraction(1),
    effective: bool = False,
) -> Divisor:
    """Random divisor; ``degree`` is enforced by adjusting one coefficient."""
    pick = (
        (lambda: random_lattice_point(rng, g, lattice))
        if lattice is not None
        else (lambda: random_point(rng, g))
    )
    lo = 0 if effective else -max_coeff
    coeffs: dict[GraphPoint, int] = {}
    for _ in range(rng.randint(0, terms)):
        p = pick()
        coeffs[p] = coeffs.get(p, 0) + rng.randint(lo, max_coeff)
    d = Divisor(coeffs)
    if degree is not None:
        p = pick()
        d = d + Divisor({p: degree - d.degree})
        if effective and not d.is_effective():
            return random_divisor(rng, g, terms, max_coeff, degree, lattice, effective)
    return d


def random_pl_function(
    rng: random.Random, g: MetricGraph, max_slope: int = 3, max_breaks: int = 3, denominator: int = 2
) -> PLFunction:
    """Random function: random vertex values along a spanning tree, random slopes elsewhere.

    Each edge gets random interior breakpoints; the last slope is solved so
    that the edge closes up at its head value, after which a correction
    breakpoint is placed if that slope is not an integer.  Rays get random
    breakpoints and a random final slope.
    """
    vv: dict[str, Fraction] = {}
    start = g.vertices[0]
    vv[start] = Fraction(rng.randint(-3, 3))
    tree_edges: set[str] = set()
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for eid, side in g.incident(v):
            e = g.edges[eid]
            w = e.head if side == "tail" else e.tail
            if w in vv:
                continue
            # value change along a tree edge: integer slope times length
            s = rng.randint(-max_slope, max_slope)
            vv[w] = vv[v] + (s * e.length if side == "tail" else -s * e.length)
            tree_edges.add(eid)
            frontier.append(w)
    eb = {}
    for eid, e in g.edges.items():
        eb[eid] = _random_edge_breaks(rng, e.length, vv[e.tail], vv[e.head], max_slope, max_breaks, denominator)
    rb = {}
    for rid in g.rays:
        offs = sorted({Fraction(rng.randint(1, 6), denominator) for _ in range(rng.randint(0, max_breaks))})
        rb[rid] = [(Fraction(0), rng.randint(-max_slope, max_slope))]
        rb[rid] += [(o, rng.randint(-max_slope, max_slope)) for o in offs]
    return PLFunction(g, vv, eb, rb)


def _random_edge_breaks(rng, length, a, b, max_slope, max_breaks, denominator):
    """Integer-slope profile from value ``a`` at 0 to ``b`` at ``length``.

    Random slopes on a random grid partition; then an adjustment segment
    pair fixes the total rise exactly.
    """
    grid = Fraction(1, denominator)
    n = int(length / grid)
    cuts = sorted(rng.sample(range(1, n), min(max_breaks, n - 1))) if n > 1 else []
    stops = [Fraction(0)] + [c * grid for c in cuts] + [length]
    slopes = [rng.randint(-max_slope, max_slope) for _ in range(len(stops) - 1)]
    rise = sum(s * (y - x) for s, x, y in zip(slopes, stops, stops[1:]))
    need = b - a - rise
    # spread the needed correction over the last segment as a two-slope piece
    x, y = stops[-2], stops[-1]
    seg = y - x
    s0 = slopes[-1]
    # choose integer k so that slope s0+k on part and s0+k+1 on rest fits need
    k = need // seg  # floor in Fractions gives an integer
    rem = need - k * seg  # 0 <= rem < seg
    # first part slope s0+k+1 for length rem, rest slope s0+k
    breaks = [(x0, s) for x0, s in zip(stops[:-2], slopes[:-1])]
    if rem:
        breaks.append((x, s0 + int(k) + 1))
        breaks.append((x + rem, s0 + int(k)))
    else:
        breaks.append((x, s0 + int(k)))
    return breaks
