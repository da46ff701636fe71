from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from tropskel.catalog import circle, dumbbell, theta
from tropskel.divisors import Divisor, is_linearly_equivalent
from tropskel.graph import EdgeType, GraphError, GraphPoint, MetricGraph
from tropskel.islands import (
    _spread_on_edge,
    canonical_edges,
    canonical_vertices,
    check_good_divisor,
    good_effective_divisor,
    islands,
    weighted_genus,
    weighted_riemann,
)
from tropskel.testing import random_divisor, random_weighted_graph

V = GraphPoint.vertex


def loop_bridge_vertex() -> MetricGraph:
    return MetricGraph(["a", "b"], [("l", "a", "a", 3), ("br", "a", "b", 2)], weights={"b": 1})


def test_weighted_genus_examples():
    assert weighted_genus(circle(4)) == 1
    assert weighted_genus(MetricGraph(["v"], weights={"v": 2})) == 2
    assert weighted_genus(dumbbell(2, 1, 2)) == 2


def test_islands_examples():
    dec = islands(dumbbell(2, 1, 2))
    assert len(dec.islands) == 2 and [b.id for b in dec.bridges] == ["b"]
    assert sorted(sorted(i.edges) for i in dec.islands) == [["l1"], ["l2"]]
    dec = islands(theta(1, 2, 3))
    assert len(dec.islands) == 1 and not dec.bridges
    dec = islands(loop_bridge_vertex())
    assert len(dec.islands) == 2
    assert sorted(i.genus for i in dec.islands) == [1, 1]


def test_standing_assumption_enforced():
    g = MetricGraph(["a", "b"], [("l", "a", "a", 1), ("br", "a", "b", 1)])
    with pytest.raises(GraphError):
        islands(g)


def test_canonical_structure_merges_chains():
    # a loop drawn with three model edges through two valence-2 vertices
    g = MetricGraph(
        ["a", "x", "y"], [("p", "a", "x", 1), ("q", "x", "y", 1), ("r", "y", "a", 2)]
    )
    assert canonical_vertices(g) == ["a"]
    (ce,) = canonical_edges(g)
    assert ce.length == 4 and ce.model_edges == {"p", "q", "r"}
    assert ce.kind is EdgeType.CONNECTED


def test_weighted_riemann_examples():
    db = dumbbell(2, 1, 2)
    d = Divisor({db.point("b", F(1, 2)): 3, V("v2"): -1})
    e = weighted_riemann(db, d)
    assert e.is_effective() and is_linearly_equivalent(db, d, e)[0]
    lone = MetricGraph(["v"], weights={"v": 3})
    assert weighted_riemann(lone, Divisor({V("v"): 3})) == Divisor({V("v"): 3})
    th = theta(1, 2, 3)
    assert weighted_riemann(th, Divisor({th.point("e3", 1): 3, V("u"): -1})).is_effective()


def test_good_divisor_dumbbell():
    db = dumbbell(2, 1, 2)
    for d in (Divisor({V("v1"): 2}), Divisor({db.point("l2", 1): 2}), Divisor({db.point("b", F(1, 2)): 2})):
        e = good_effective_divisor(db, d)
        rep = check_good_divisor(db, e)
        assert rep.ok
        assert rep.island_degrees == (1, 1)
        assert rep.bridge_degrees == {"b": 0}
        assert is_linearly_equivalent(db, d, e)[0]


def test_good_divisor_theta():
    th = theta(1, 2, 3)
    d = Divisor({th.point("e3", F(3, 2)): 2})
    e = good_effective_divisor(th, d)
    rep = check_good_divisor(th, e)
    assert rep.ok and all(x <= 1 for x in rep.edge_degrees.values())
    assert is_linearly_equivalent(th, d, e)[0]


def test_good_divisor_no_bridges_spreads_chips():
    # a chain-subdivided theta: interior chips must be spread to at most one per edge
    g = MetricGraph(["u", "v", "m"], [("a", "u", "m", 2), ("a2", "m", "v", 2), ("b", "u", "v", 1), ("c", "u", "v", 3)])
    d = Divisor({V("m"): 2})
    e = good_effective_divisor(g, d)
    assert check_good_divisor(g, e).ok
    assert is_linearly_equivalent(g, d, e)[0]


def test_genus_zero_island_counterexample():
    # weight-0 centre with three weight-1 leaves: four islands, degree 3
    g = MetricGraph(
        ["c", "x", "y", "z"],
        [("ex", "c", "x", 1), ("ey", "c", "y", 1), ("ez", "c", "z", 1)],
        weights={"x": 1, "y": 1, "z": 1},
    )
    dec = islands(g)
    assert len(dec.islands) == 4
    assert sorted(i.genus for i in dec.islands) == [0, 1, 1, 1]
    # meeting four islands needs four chips but the class has degree 3
    with pytest.raises(ValueError):
        good_effective_divisor(g, Divisor({V("c"): 3}))


def test_genus_additivity_random():
    rng = random.Random(31)
    for _ in range(100):
        g = random_weighted_graph(rng)
        dec = islands(g)
        assert sum(i.genus for i in dec.islands) == weighted_genus(g)


def test_good_divisor_random_equivalence():
    rng = random.Random(32)
    for _ in range(40):
        g = random_weighted_graph(rng)
        d = random_divisor(rng, g, degree=weighted_genus(g) + rng.randint(0, 1))
        e = good_effective_divisor(g, d)
        assert check_good_divisor(g, e).ok
        assert is_linearly_equivalent(g, d, e)[0]


def test_spreading_keeps_island_degrees():
    rng = random.Random(33)
    for _ in range(60):
        g = random_weighted_graph(rng)
        dec = islands(g)
        d = random_divisor(rng, g, terms=6, degree=weighted_genus(g) + 2, lattice=F(1, 2), effective=True)
        chips = dict(d)
        for ce in canonical_edges(g):
            if ce.kind is EdgeType.CONNECTED:
                _spread_on_edge(g, ce, chips, [])
        out = Divisor(chips)
        before = [d.restrict(i.contains).degree for i in dec.islands]
        after = [out.restrict(i.contains).degree for i in dec.islands]
        assert before == after
        assert is_linearly_equivalent(g, d, out)[0]
        for ce in canonical_edges(g):
            if ce.kind is EdgeType.CONNECTED:
                assert out.restrict(ce.in_relin).degree <= 1
