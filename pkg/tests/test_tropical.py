from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from tropskel.catalog import circle, path, theta
from tropskel.divisors import Divisor, PLFunction
from tropskel.graph import GraphPoint, distance
from tropskel.rational import vector_gcd
from tropskel.tropical import (
    MapError,
    TropPoint,
    assemble_map,
    cell_decomposition,
    certify_faithful,
    chart,
    lattice_length,
    verify_injective,
    verify_unimodular,
)

V = GraphPoint.vertex
C4 = circle(4)
W = C4.point("e", 2)
X3 = C4.point("e", 3)


def f1():
    return PLFunction.from_knots(C4, {"v0": 0}, {"e": [(2, 2)]})


def f2():
    return PLFunction.from_knots(C4, {"v0": 0}, {"e": [(2, 0), (3, -1)]})


D0 = Divisor({V("v0"): 1, W: 2})


# -- charts -------------------------------------------------------------------


def test_chart_examples():
    p = TropPoint((0, 1, 2))
    assert chart(p, 0) == (1, 2)
    assert chart(p, 1) == (-1, 1)
    with pytest.raises(ValueError):
        chart(TropPoint((None, 0, 0)), 0)


def test_trop_point_shift_invariance():
    assert TropPoint((0, 1, 2)) == TropPoint((F(5, 2), F(7, 2), F(9, 2)))
    assert TropPoint((None, 0, 1)) == TropPoint((None, 3, 4))
    with pytest.raises(ValueError):
        TropPoint((None, None))


def test_chart_independence_random():
    rng = random.Random(41)
    for _ in range(300):
        n = rng.randint(1, 5)
        p = TropPoint(tuple(F(rng.randint(-20, 20), rng.randint(1, 6)) for _ in range(n + 1)))
        v = [rng.randint(-4, 4) for _ in range(n + 1)]
        t = F(rng.randint(0, 12), rng.randint(1, 5))
        q = TropPoint(tuple(a + t * b for a, b in zip(p.coords, v)))
        lengths = {lattice_length(p, q, i) for i in range(n + 1)}
        assert len(lengths) == 1
        # the chart-0 direction is v minus its first entry; its gcd scales the length
        w = [b - v[0] for b in v[1:]]
        assert lengths.pop() == t * vector_gcd(w)


# -- assembly -----------------------------------------------------------------


def test_assemble_worked_family():
    m = assemble_map(C4, D0, [f1(), f2()])
    d1, d2 = m.induced_divisors()
    assert d1 == Divisor({V("v0"): 3})
    assert d2 == Divisor({W: 1, X3: 2})
    assert f2().principal_divisor() == Divisor({V("v0"): -1, W: -1, X3: 2})


def test_assemble_rejects_budget_violation():
    with pytest.raises(MapError):
        assemble_map(C4, Divisor({V("v0"): 1}), [f1()])
    with pytest.raises(MapError):
        assemble_map(C4, Divisor({V("v0"): -1, W: 2}), [])


# -- unimodularity ------------------------------------------------------------


def test_unimodular_worked_family():
    m = assemble_map(C4, D0, [f1(), f2()])
    rep = verify_unimodular(m)
    assert [(c.start, c.stop, c.vector) for c in rep.cells] == [
        (0, 1, (1, 0)),
        (1, 2, (1, 0)),
        (2, 3, (-1, -1)),
        (3, 4, (-1, 1)),
    ]
    assert rep.ok


def test_constant_function_is_not_unimodular():
    m = assemble_map(C4, Divisor({V("v0"): 1}), [PLFunction.constant(C4)])
    assert not verify_unimodular(m).ok


def test_slope_two_is_not_unimodular():
    g = path(1, length=2)
    f = PLFunction(g, {"p0": 0, "p1": 4}, {"e0": [(0, 2)]})
    m = assemble_map(g, Divisor({V("p1"): 2}), [f])
    rep = verify_unimodular(m)
    assert not rep.ok
    assert {c.vector for c in rep.cells} == {(2,)}


def test_cells_are_isometric_onto_images():
    rng = random.Random(42)
    m = assemble_map(C4, D0, [f1(), f2()])
    for c in cell_decomposition(m):
        for _ in range(5):
            s, t = sorted(F(rng.randint(0, 12), 12) * c.length for _ in range(2))
            x, y = c.point(C4, s), c.point(C4, t)
            assert lattice_length(m(x), m(y)) == t - s


def test_breakpoint_mode_matches_lattice_verdict():
    m = assemble_map(C4, D0, [f1(), f2()])
    assert certify_faithful(m, "breakpoints").verdict == certify_faithful(m).verdict == "faithful"


# -- injectivity --------------------------------------------------------------


def test_single_tent_is_not_injective():
    m = assemble_map(C4, D0, [f1()])
    rep = verify_injective(m)
    assert not rep.injective
    x, y, image = rep.witness
    assert {x, y} == {C4.point("e", 1), C4.point("e", 3)}
    assert image == (1,)
    assert m(x) == m(y)


def test_worked_family_is_injective():
    assert verify_injective(assemble_map(C4, D0, [f1(), f2()])).injective


def test_identity_segment_is_injective():
    g = path(1, length=3)
    f = PLFunction(g, {"p0": 0, "p1": 3}, {"e0": [(0, 1)]})
    m = assemble_map(g, Divisor({V("p1"): 1}), [f])
    assert certify_faithful(m).faithful


# -- certificates -------------------------------------------------------------


def test_certificate_worked_family():
    cert = certify_faithful(assemble_map(C4, D0, [f1(), f2()]))
    assert cert.verdict == "faithful" and cert.witness is None


def test_certificate_single_tent_has_witness():
    cert = certify_faithful(assemble_map(C4, D0, [f1()]))
    assert not cert.faithful
    assert cert.verdict == "unimodular-only"
    x, y, _ = cert.witness
    assert {x, y} == {C4.point("e", 1), C4.point("e", 3)}


def test_certificate_empty_family_fails():
    g = path(1)
    cert = certify_faithful(assemble_map(g, Divisor({V("p0"): 1}), []))
    assert cert.verdict == "fails"
    assert not cert.injective


def test_faithful_map_preserves_distances_on_cells():
    th = theta(1, 2, 3)
    from tropskel.synthesis import synthesize_faithful

    res = synthesize_faithful(th, 5)
    m = res.map
    rng = random.Random(43)
    cells = cell_decomposition(m)
    for _ in range(300):
        c = rng.choice(cells)
        s, t = (F(rng.randint(0, 24), 24) * c.length for _ in range(2))
        x, y = c.point(th, s), c.point(th, t)
        if x != y:
            assert m(x) != m(y)
        assert lattice_length(m(x), m(y)) == abs(t - s)
        assert abs(t - s) >= distance(th, x, y)
