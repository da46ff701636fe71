from __future__ import annotations

import itertools
import random
from fractions import Fraction as F

import pytest

from tropskel.catalog import circle, circle_with_ray, dumbbell, path, theta
from tropskel.graph import (
    EdgeType,
    GraphError,
    GraphPoint,
    MetricGraph,
    build_graph,
    classify_edge,
    distance,
    genus,
    middle_point,
    subdivide,
)
from tropskel.testing import random_graph, random_point

V = GraphPoint.vertex


def test_build_circle_and_theta():
    c4 = build_graph({"vertices": [{"id": "v0"}], "edges": [{"id": "e", "ends": ["v0", "v0"], "length": "4"}]})
    assert genus(c4) == 1
    th = build_graph(
        {
            "vertices": [{"id": "u"}, {"id": "v"}],
            "edges": [
                {"id": "e1", "ends": ["u", "v"], "length": "1"},
                {"id": "e2", "ends": ["u", "v"], "length": "2"},
                {"id": "e3", "ends": ["u", "v"], "length": "3"},
            ],
        }
    )
    assert genus(th) == 2


@pytest.mark.parametrize(
    "desc",
    [
        # two disjoint loops
        {"vertices": ["a", "b"], "edges": [{"id": "x", "ends": ["a", "a"], "length": "1"},
                                          {"id": "y", "ends": ["b", "b"], "length": "1"}]},
        {"vertices": ["a"], "edges": [{"id": "x", "ends": ["a", "a"], "length": "0"}]},
        {"vertices": ["a"], "edges": [{"id": "x", "ends": ["a", "a"], "length": "-1/2"}]},
        {"vertices": ["a"], "edges": [{"id": "x", "ends": ["a", "zz"], "length": "1"}]},
        {"vertices": ["a"], "rays": [{"id": "r", "base": "zz"}]},
        {"edges": []},
    ],
)
def test_build_rejects_bad_input(desc):
    with pytest.raises(GraphError):
        build_graph(desc)


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        MetricGraph(["a"], [("x", "a", "a", 0.5)])


def test_genus_examples():
    assert genus(circle(4)) == 1
    assert genus(theta(1, 2, 3)) == 2
    assert genus(path(2)) == 0
    assert genus(circle_with_ray()) == 1


def test_classify_edge_examples():
    db = dumbbell(2, 1, 2)
    assert classify_edge(db, "b") is EdgeType.DISCONNECTED
    assert classify_edge(db, "l1") is EdgeType.CONNECTED
    assert classify_edge(db, "l2") is EdgeType.CONNECTED
    th = theta(1, 2, 3)
    assert all(classify_edge(th, e) is EdgeType.CONNECTED for e in th.edges)
    with pytest.raises(GraphError):
        classify_edge(th, "nope")


def test_distance_examples():
    c4 = circle(4)
    assert distance(c4, V("v0"), c4.point("e", 3)) == 1
    th = theta(1, 2, 3)
    assert distance(th, V("u"), V("v")) == 1
    p = th.point("e3", F(5, 2))
    assert distance(th, p, p) == 0


def test_distance_along_ray_and_between_rays():
    from tropskel.catalog import circle_two_rays

    g = circle_two_rays()
    a, b = g.point("r1", 3), g.point("r1", F(1, 2))
    assert distance(g, a, b) == F(5, 2)
    # between rays the path runs through both bases
    assert distance(g, g.point("r1", 1), g.point("r2", 1)) == 4


def test_point_normalization():
    c4 = circle(4)
    assert c4.point("e", 0) == V("v0") == c4.point("e", 4)
    assert c4.point("e", F(6, 3)) == GraphPoint("edge", "e", F(2))
    with pytest.raises(GraphError):
        c4.point("e", 5)


def test_subdivide_examples():
    c4 = circle(4)
    s = subdivide(c4, [c4.point("e", 2)])
    assert len(s.graph.vertices) == 2
    assert sorted(e.length for e in s.graph.edges.values()) == [2, 2]
    th = theta(1, 2, 3)
    s = subdivide(th, [th.point("e2", 1)])
    assert len(s.graph.edges) == 4 and genus(s.graph) == 2
    assert subdivide(th, []).graph == th


def test_middle_point_examples():
    assert middle_point(circle(4), "e") == GraphPoint("edge", "e", F(2))
    assert middle_point(theta(1, 2, 3), "e3").offset == F(3, 2)
    assert middle_point(dumbbell(2, 1, 2), "b").offset == F(1, 2)
    with pytest.raises(GraphError):
        middle_point(circle_with_ray(), "r")


def _sample_points(g, den=2):
    pts = [V(v) for v in g.vertices]
    for eid, e in g.edges.items():
        k = int(e.length * den)
        pts += [g.point(eid, F(i, den)) for i in range(1, k)]
    return pts


@pytest.mark.parametrize("g", [circle(4), theta(1, 2, 3), dumbbell(2, 1, 2), path(3)], ids=repr)
def test_distance_is_a_metric(g):
    pts = _sample_points(g)
    for x, y in itertools.product(pts, repeat=2):
        dxy = distance(g, x, y)
        assert dxy == distance(g, y, x)
        assert (dxy == 0) == (x == y)
    for x, y, z in itertools.islice(itertools.product(pts, repeat=3), 0, None, 7):
        assert distance(g, x, z) <= distance(g, x, y) + distance(g, y, z)


def test_subdivision_invariance_random():
    rng = random.Random(11)
    for _ in range(40):
        g = random_graph(rng)
        cut = [random_point(rng, g) for _ in range(3)]
        cut = [p for p in cut if p.kind == "edge"]
        s = subdivide(g, cut)
        assert genus(s.graph) == genus(g)
        assert s.graph.total_length() == g.total_length()
        pts = [random_point(rng, g) for _ in range(5)]
        for x, y in itertools.combinations(pts, 2):
            assert distance(s.graph, s.relocate(x), s.relocate(y)) == distance(g, x, y)
        for x in pts:
            assert s.restore(s.relocate(x)) == x
        for eid in g.edges:
            kinds = {classify_edge(s.graph, new) for new, _, _ in s.pieces[eid]}
            assert kinds == {classify_edge(g, eid)}


def test_bridge_removal_gives_two_components():
    rng = random.Random(5)
    for _ in range(40):
        g = random_graph(rng)
        for eid, e in g.edges.items():
            if classify_edge(g, eid) is EdgeType.DISCONNECTED:
                others = [(f.id, f.tail, f.head, f.length) for f in g.edges.values() if f.id != eid]
                # count components with a tiny union-find
                parent = {v: v for v in g.vertices}

                def find(v):
                    while parent[v] != v:
                        v = parent[v]
                    return v

                for _, a, b, _ in others:
                    parent[find(a)] = find(b)
                assert len({find(v) for v in g.vertices}) == 2


def test_round_trip_dict():
    g = dumbbell(2, 1, 2).with_weights({"v1": 1})
    assert build_graph(g.to_dict()) == g
