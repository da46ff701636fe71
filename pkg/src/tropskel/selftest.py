"""Randomized property suites behind ``tropskel selftest``."""

from __future__ import annotations

import random
from fractions import Fraction

from .bounds import check_bound_consistency
from .graph import GraphPoint, genus
from .islands import check_good_divisor, good_effective_divisor, weighted_genus
from .reduction import effective_of_bounded_class, is_reduced, reduce_divisor, rescaled_oracle
from .testing import random_divisor, random_graph, random_pl_function, random_weighted_graph
from .tropical import TropPoint, lattice_length

__all__ = ["SUITES", "run_suites"]


def _oracle(rng):
    g = random_graph(rng)
    d = random_divisor(rng, g)
    v0 = GraphPoint.vertex(g.vertices[0])
    return reduce_divisor(g, d, v0).reduced == rescaled_oracle(g, d, v0)


def _idempotent(rng):
    g = random_graph(rng)
    v0 = GraphPoint.vertex(rng.choice(g.vertices))
    r = reduce_divisor(g, random_divisor(rng, g, lattice=None), v0)
    return is_reduced(g, r.reduced, v0) and reduce_divisor(g, r.reduced, v0).reduced == r.reduced


def _div_additive(rng):
    g = random_graph(rng)
    f, h = random_pl_function(rng, g), random_pl_function(rng, g)
    return (f + h).principal_divisor() == f.principal_divisor() + h.principal_divisor()


def _riemann(rng):
    g = random_graph(rng)
    k = genus(g)
    d = random_divisor(rng, g, degree=k)
    v0 = GraphPoint.vertex(g.vertices[0])
    red = reduce_divisor(g, d, v0).reduced
    e = effective_of_bounded_class(g, d)
    return e.is_effective() and e.degree == k and red[v0] >= d.degree - k


def _good(rng):
    g = random_weighted_graph(rng)
    d = random_divisor(rng, g, degree=weighted_genus(g))
    return check_good_divisor(g, good_effective_divisor(g, d)).ok


def _charts(rng):
    n = rng.randint(1, 4)
    p = TropPoint(tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n + 1)))
    v = [rng.randint(-3, 3) for _ in range(n + 1)]
    t = Fraction(rng.randint(1, 8), rng.randint(1, 3))
    q = TropPoint(tuple(a + t * b for a, b in zip(p.coords, v)))
    lengths = {lattice_length(p, q, i) for i in range(n + 1)}
    return len(lengths) == 1


def _bounds(rng):
    d = rng.randint(3, 50)
    return check_bound_consistency(d, rng.randint(3, d))


SUITES = {
    "reduction-oracle": _oracle,
    "reduction-idempotent": _idempotent,
    "div-additive": _div_additive,
    "riemann": _riemann,
    "good-divisor": _good,
    "chart-invariance": _charts,
    "bound-consistency": _bounds,
}


def run_suites(cases: int = 50, seed: int = 0, names=None) -> list[dict]:
    """Run each suite ``cases`` times; exceptions count as failures."""
    out = []
    for name, check in SUITES.items():
        if names and name not in names:
            continue
        rng = random.Random(f"{seed}:{name}")
        passed = failed = 0
        first = None
        for i in range(cases):
            try:
                ok = bool(check(rng))
            except Exception as exc:  # reported, not raised
                ok = False
                first = first or f"case {i}: {type(exc).__name__}: {exc}"
            if ok:
                passed += 1
            else:
                failed += 1
                first = first or f"case {i}: property violated"
        out.append({"suite": name, "passed": passed, "failed": failed, "first_failure": first})
    return out
