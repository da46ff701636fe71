from __future__ import annotations

import itertools
from fractions import Fraction as F

import pytest

from tropskel.catalog import circle, circle_two_rays, circle_with_ray, dumbbell, theta
from tropskel.divisors import Divisor, PLFunction
from tropskel.graph import GraphError, GraphPoint, MetricGraph
from tropskel.rational import vector_gcd
from tropskel.reduction import has_effective_representative
from tropskel.synthesis import (
    Infeasible,
    minimal_core,
    synth_edge_connected,
    synth_edge_disconnected,
    synth_edge_pair_separator,
    synth_end_function,
    synth_half_separator,
    synth_point_separator,
    synth_vertex_separator,
    synthesize_faithful,
)
from tropskel.tropical import cell_decomposition

V = GraphPoint.vertex
C4 = circle(4)
W = C4.point("e", 2)


# -- edge functions -----------------------------------------------------------


def test_bridge_function_dumbbell():
    db = dumbbell(2, 1, 2)
    f = synth_edge_disconnected(db, "b", head="v1")
    assert f.value(V("v1")) == 0 and f.value(db.point("l1", 1)) == 0
    assert f.value(db.point("b", F(1, 3))) == F(1, 3)
    assert f.value(db.point("l2", 1)) == 1
    assert f.principal_divisor() == Divisor({V("v1"): 1, V("v2"): -1})
    g = synth_edge_disconnected(db, "b", head="v2")
    assert g.principal_divisor() == Divisor({V("v2"): 1, V("v1"): -1})
    assert g.value(db.point("l2", 1)) == 0 and g.value(db.point("l1", 1)) == 1


def test_bridge_function_rejects_loops():
    with pytest.raises(GraphError):
        synth_edge_disconnected(dumbbell(), "l1")


def test_tent_on_circle_and_theta():
    f = synth_edge_connected(C4, "e")
    assert f == PLFunction.from_knots(C4, {"v0": 0}, {"e": [(2, 2)]})
    assert f.principal_divisor() == Divisor({V("v0"): 2, W: -2})
    th = theta(1, 2, 3)
    t = synth_edge_connected(th, "e2")
    mid = th.point("e2", 1)
    assert t.value(mid) == 1
    assert all(t.value(th.point(e, F(1, 2))) == 0 for e in ("e1", "e3"))
    assert t.principal_divisor() == Divisor({V("u"): 1, V("v"): 1, mid: -2})
    with pytest.raises(GraphError):
        synth_edge_connected(dumbbell(), "b")


def test_half_separator_worked_variant():
    f = synth_half_separator(C4, "e", "second", -1)
    for k in range(0, 9):
        t = F(k, 2)
        want = 0 if t <= 2 else -min(t - 2, 4 - t)
        assert f.value_on("e", t) == want
    d2 = Divisor({V("v0"): 1, W: 2}) + f.principal_divisor()
    assert d2.is_effective()


def test_half_separator_theta_first_half():
    th = theta(1, 2, 3)
    f = synth_half_separator(th, "e2", "first")
    assert f.value(th.point("e2", F(1, 2))) == F(1, 2)
    assert f.value(th.point("e2", F(3, 2))) == 0
    assert f.value(th.point("e2", 1)) == 0 == f.value(V("u")) == f.value(V("v"))
    assert f.breakpoints("e2") == [F(1, 2), 1]


def test_half_separator_separates_halves():
    th = theta(1, 2, 3)
    for e, half in itertools.product(th.edges, ("first", "second")):
        L = th.edges[e].length
        f = synth_half_separator(th, e, half)
        lo, hi = (0, L / 2) if half == "first" else (L / 2, L)
        for k in range(1, 16):
            t = L * F(k, 16)
            inside = lo < t < hi
            assert (f.value_on(e, t) > 0) == inside
    with pytest.raises(GraphError):
        synth_half_separator(dumbbell(), "b")


def test_pair_separator():
    th = theta(1, 2, 3)
    f = synth_edge_pair_separator(th, "e1", "e3")
    assert all(f.value_on("e1", F(k, 8)) > 0 for k in range(1, 8))
    assert all(f.value_on("e3", F(k, 4)) == 0 for k in range(0, 13))
    assert f.value(V("u")) == 0 == f.value(V("v"))
    db = dumbbell(2, 1, 2)
    g = synth_edge_pair_separator(db, "l1", "l2")
    assert g.value(db.point("l1", 1)) > 0 and g.value(db.point("l2", 1)) == 0
    with pytest.raises(ValueError):
        synth_edge_pair_separator(th, "e1", "e1")


# -- vertex separators --------------------------------------------------------


def test_vertex_separator_theta():
    th = theta(1, 2, 3)
    d = Divisor({V("u"): 5})
    sep = synth_vertex_separator(th, "u", "v", d)
    assert sep
    f = sep.function
    assert f.value(V("u")) > 0 == f.value(V("v"))
    assert sep.base.is_effective()
    assert (sep.base + f.principal_divisor()).is_effective()
    assert has_effective_representative(th, sep.base - d) and (sep.base - d).degree == 0


def test_vertex_separator_across_bridge_uses_bridge_function():
    db = dumbbell(2, 1, 2)
    f = synth_edge_disconnected(db, "b")
    assert f.value(V("v1")) != f.value(V("v2"))


def test_vertex_separator_requires_distinct():
    with pytest.raises(ValueError):
        synth_vertex_separator(theta(), "u", "u", Divisor({V("u"): 5}))


def test_point_separator_reports_infeasible_values():
    res = synth_point_separator(C4, C4.point("e", 1), C4.point("e", 3), Divisor({V("v0"): 1}))
    assert isinstance(res, Infeasible) and not res


# -- ends ---------------------------------------------------------------------


def test_end_function_circle_with_ray():
    g = circle_with_ray()
    f = synth_end_function(g, "r")
    assert all(f.value_on("e", F(k, 3)) == 0 for k in range(13))
    assert all(f.value_on("r", F(k, 3)) == F(k, 3) for k in range(30))
    assert f.ray_breaks("r") == ((0, 1),)
    assert f.principal_divisor(ends=True) == Divisor({V("v0"): 1, GraphPoint.end("r"): -1})


def test_end_functions_two_rays():
    g = circle_two_rays()
    f = synth_end_function(g, "r1")
    assert all(f.value_on("r2", F(k, 2)) == 0 for k in range(20))
    assert f.final_slope("r2") == 0 and f.final_slope("r1") == 1
    assert f.value(V("v0")) == 0 == f.value(V("w"))
    with pytest.raises(GraphError):
        synth_end_function(g, "nope")


def test_end_function_on_a_hanging_tree():
    # core loop at a, path a - b - c, ray at c and a second ray at b
    g = MetricGraph(
        ["a", "b", "c"],
        [("l", "a", "a", 2), ("ab", "a", "b", 1), ("bc", "b", "c", 2)],
        [("r", "c"), ("s", "b")],
    )
    assert minimal_core(g) == {"a"}
    f = synth_end_function(g, "r")
    assert f.value(V("b")) == 1 and f.value(V("c")) == 3
    assert f.value_on("r", 5) == 8
    assert f.value_on("s", 5) == 1  # constant on the branch leaving the path
    assert f.value_on("l", 1) == 0


# -- pipeline -----------------------------------------------------------------


def test_synthesize_circle_degree_three():
    res = synthesize_faithful(C4, 3)
    assert res.faithful and res.map.dimension == 2
    assert all(d.is_effective() and d.degree == 3 for d in res.map.induced_divisors())


def test_synthesize_theta_degree_five():
    res = synthesize_faithful(theta(1, 2, 3), 5)
    assert res.faithful


def test_synthesize_circle_degree_two_infeasible():
    res = synthesize_faithful(C4, 2)
    assert isinstance(res, Infeasible)
    assert res.construction.startswith("half:")


@pytest.mark.parametrize(
    "g, d",
    [(circle(4), 3), (theta(1, 2, 3), 5), (dumbbell(2, 1, 2), 5), (theta(1, 1, 1), 5), (circle_two_rays(), 3)],
    ids=["c4", "theta", "dumbbell", "unit-theta", "c4-rays"],
)
def test_augmentation_keeps_primitive_vectors(g, d):
    res = synthesize_faithful(g, d)
    m = res.map
    cells = cell_decomposition(m)
    for c in cells:
        full = c.vector
        for k in range(1, len(full) + 1):
            prefix = full[:k]
            if vector_gcd(prefix) == 1:
                assert vector_gcd(full) == 1
    for di in m.induced_divisors():
        assert di.is_effective() and di.degree == d
