"""Tropical projective space, PL maps and their exact verification.

A :class:`TropMap` sends a graph point ``x`` to ``(0 : f_1(x) : ... : f_N(x))``.
Verification cuts the graph into cells on which every coordinate is affine,
reads off the integer slope vector of each cell and then

* checks that every vector is primitive (the map is a local isometry for
  lattice length), and
* intersects the images of every pair of cells exactly in ``Q^N`` to decide
  injectivity.

No floating point is used anywhere.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .divisors import Divisor, PLFunction
from .graph import GraphPoint, MetricGraph
from .rational import lcm_denominators, vector_gcd

__all__ = [
    "Cell",
    "FaithfulnessCertificate",
    "MapError",
    "TropMap",
    "TropPoint",
    "assemble_map",
    "cell_decomposition",
    "certify_faithful",
    "chart",
    "lattice_length",
    "verify_injective",
    "verify_unimodular",
]


class MapError(ValueError):
    """A function family that does not define a valid map."""


@dataclass(frozen=True)
class TropPoint:
    """A point of tropical projective space; ``None`` stands for ``+inf``.

    Equality ignores a common additive shift.

    >>> TropPoint((0, 1, 2)) == TropPoint((5, 6, 7))
    True
    """

    coords: tuple

    def __init__(self, coords):
        cs = tuple(None if c is None else Fraction(c) for c in coords)
        if all(c is None for c in cs):
            raise ValueError("a tropical point needs a finite coordinate")
        object.__setattr__(self, "coords", cs)

    def _normal(self):
        ref = next(c for c in self.coords if c is not None)
        return tuple(None if c is None else c - ref for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, TropPoint):
            return NotImplemented
        return len(self.coords) == len(other.coords) and self._normal() == other._normal()

    def __hash__(self):
        return hash(self._normal())

    def __len__(self):
        return len(self.coords)


def chart(p: TropPoint, i: int) -> tuple[Fraction, ...]:
    """Affine coordinates in chart ``i``: subtract coordinate ``i`` and drop it."""
    ci = p.coords[i]
    if ci is None:
        raise ValueError(f"coordinate {i} is infinite; point is outside chart {i}")
    out = []
    for k, c in enumerate(p.coords):
        if k == i:
            continue
        if c is None:
            raise ValueError("point lies on the boundary of the chart")
        out.append(c - ci)
    return tuple(out)


def lattice_length(p: TropPoint, q: TropPoint, i: int = 0) -> Fraction:
    """Lattice length of the segment from ``p`` to ``q`` computed in chart ``i``.

    For a rational direction ``w`` this is the largest ``lam`` such that
    ``w / lam`` is an integer vector.
    """
    a, b = chart(p, i), chart(q, i)
    w = [y - x for x, y in zip(a, b)]
    den = lcm_denominators(w)
    ints = [int(x * den) for x in w]
    return Fraction(vector_gcd(ints), den)


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class TropMap:
    """A base divisor ``D0`` and functions ``f_1 .. f_N``; ``f_0 = 0`` is implicit."""

    graph: MetricGraph
    base: Divisor
    functions: tuple[PLFunction, ...]
    labels: tuple[str, ...] = field(default=(), compare=False)

    @property
    def degree(self) -> int:
        return self.base.degree

    @property
    def dimension(self) -> int:
        return len(self.functions)

    def induced_divisors(self) -> list[Divisor]:
        return [self.base + f.principal_divisor(ends=True) for f in self.functions]

    def __call__(self, x) -> TropPoint:
        return TropPoint((0, *(f.value(x) for f in self.functions)))

    def affine(self, x) -> tuple[Fraction, ...]:
        """Chart-0 coordinates of the image of ``x``."""
        return tuple(f.value(x) for f in self.functions)


def assemble_map(g: MetricGraph, d0: Divisor, fs: Sequence[PLFunction], labels=()) -> TropMap:
    """Validate a family: ``D0`` effective and every ``D0 + div(f_i)`` effective."""
    if not d0.is_effective():
        raise MapError("base divisor is not effective")
    for p in d0:
        if not g.contains(p):
            raise MapError(f"base divisor point {p!r} is not on the graph")
    fs = tuple(fs)
    for i, f in enumerate(fs, 1):
        if f.graph != g:
            raise MapError(f"function {i} lives on a different graph")
        di = d0 + f.principal_divisor(ends=True)
        if not di.is_effective():
            neg = di.negative_part()
            raise MapError(f"D{i} = D0 + div(f{i}) is not effective; negative part {neg!r}")
    return TropMap(g, d0, fs, tuple(labels))


# ---------------------------------------------------------------------------
# cells


@dataclass(frozen=True)
class Cell:
    """A piece of an edge or ray on which every coordinate is affine.

    ``stop`` is ``None`` for the unbounded last cell of a ray.
    """

    ident: str
    start: Fraction
    stop: Fraction | None
    vector: tuple[int, ...]
    origin: tuple[Fraction, ...]

    @property
    def primitive(self) -> bool:
        return vector_gcd(self.vector) == 1

    @property
    def length(self) -> Fraction | None:
        return None if self.stop is None else self.stop - self.start

    def point(self, g: MetricGraph, s: Fraction) -> GraphPoint:
        return g.point(self.ident, self.start + s)

    def image(self, s: Fraction) -> tuple[Fraction, ...]:
        return tuple(o + s * v for o, v in zip(self.origin, self.vector))


def _grid(m: TropMap) -> int:
    vals: list[Fraction] = [e.length for e in m.graph.edges.values()]
    for f in m.functions:
        for ident in [*m.graph.edges, *m.graph.rays]:
            vals += f.breakpoints(ident)
    return lcm_denominators(vals)


def cell_decomposition(m: TropMap, mode: str = "lattice") -> list[Cell]:
    """Cells on which every coordinate is affine.

    ``mode="lattice"`` uses the uniform grid of step ``1/q`` with ``q`` the
    common denominator of all lengths and breakpoints.  ``mode="breakpoints"``
    uses the coarsest common refinement of the breakpoints instead.
    """
    g = m.graph
    q = _grid(m)
    cells = []

    def stops_for(ident, length):
        bps = sorted({b for f in m.functions for b in f.breakpoints(ident)})
        if mode == "breakpoints":
            inner = [b for b in bps if length is None or b < length]
            end = [] if length is None else [length]
            return [Fraction(0), *inner, *end]
        if mode != "lattice":
            raise ValueError(f"unknown cell mode {mode!r}")
        top = length if length is not None else (max(bps) if bps else Fraction(0))
        n = int(top * q)
        return [Fraction(k, q) for k in range(n + 1)]

    for eid, e in g.edges.items():
        st = stops_for(eid, e.length)
        for a, b in zip(st, st[1:]):
            cells.append(_make_cell(m, eid, a, b))
    for rid in g.rays:
        st = stops_for(rid, None)
        for a, b in zip(st, st[1:]):
            cells.append(_make_cell(m, rid, a, b))
        cells.append(_make_cell(m, rid, st[-1], None))
    return cells


def _make_cell(m: TropMap, ident: str, a: Fraction, b: Fraction | None) -> Cell:
    vec = tuple(f.slope_on(ident, a, "right") for f in m.functions)
    origin = tuple(f.value_on(ident, a) for f in m.functions)
    return Cell(ident, a, b, vec, origin)


@dataclass(frozen=True)
class UnimodularReport:
    cells: tuple[Cell, ...]

    @property
    def ok(self) -> bool:
        return all(c.primitive for c in self.cells)

    @property
    def failing(self) -> list[Cell]:
        return [c for c in self.cells if not c.primitive]


def verify_unimodular(m: TropMap, mode: str = "lattice") -> UnimodularReport:
    return UnimodularReport(tuple(cell_decomposition(m, mode)))


# ---------------------------------------------------------------------------
# injectivity


def _box(c: Cell):
    lo, hi = [], []
    for o, v in zip(c.origin, c.vector):
        if c.stop is None:
            if v > 0:
                lo.append(o), hi.append(None)
            elif v < 0:
                lo.append(None), hi.append(o)
            else:
                lo.append(o), hi.append(o)
        else:
            e = o + v * c.length
            lo.append(min(o, e)), hi.append(max(o, e))
    return lo, hi


def _boxes_meet(b1, b2) -> bool:
    for lo1, hi1, lo2, hi2 in zip(b1[0], b1[1], b2[0], b2[1]):
        if hi1 is not None and lo2 is not None and hi1 < lo2:
            return False
        if hi2 is not None and lo1 is not None and hi2 < lo1:
            return False
    return True


def _in_range(s: Fraction, c: Cell) -> bool:
    return s >= 0 and (c.stop is None or s <= c.length)


def _collision(g: MetricGraph, c1: Cell, c2: Cell):
    """A pair of distinct graph points in ``c1``, ``c2`` with equal images, or None."""
    v1, v2 = c1.vector, c2.vector
    diff = [b - a for a, b in zip(c1.origin, c2.origin)]
    n = len(v1)
    # try to find a non-singular 2x2 minor of [v1 | -v2]
    for i in range(n):
        for j in range(i + 1, n):
            det = v1[i] * (-v2[j]) - v1[j] * (-v2[i])
            if det:
                s = Fraction(diff[i] * (-v2[j]) - diff[j] * (-v2[i]), det)
                t = Fraction(v1[i] * diff[j] - v1[j] * diff[i], det)
                if all(c1.origin[k] + s * v1[k] == c2.origin[k] + t * v2[k] for k in range(n)):
                    if _in_range(s, c1) and _in_range(t, c2):
                        x, y = c1.point(g, s), c2.point(g, t)
                        if x != y:
                            return x, y, c1.image(s)
                return None
    # parallel directions (or one dimension): project on a non-zero coordinate
    k = next((i for i in range(n) if v1[i]), None)
    if k is None:
        return None
    if not v2[k]:
        return None
    lam = Fraction(v2[k], v1[k])
    if any(v2[i] != lam * v1[i] for i in range(n)):
        return None
    sigma = Fraction(diff[k], v1[k])
    if any(diff[i] != sigma * v1[i] for i in range(n)):
        return None
    # cell 2 at parameter t sits at s = sigma + lam * t on cell 1
    lo1, hi1 = Fraction(0), c1.length
    ends2 = [sigma] + ([] if c2.stop is None else [sigma + lam * c2.length])
    if c2.stop is None:
        lo2, hi2 = (sigma, None) if lam > 0 else (None, sigma)
    else:
        lo2, hi2 = min(ends2), max(ends2)
    lo = lo1 if lo2 is None else max(lo1, lo2)
    if hi1 is None:
        hi = hi2
    elif hi2 is None:
        hi = hi1
    else:
        hi = min(hi1, hi2)
    if hi is not None and lo > hi:
        return None
    cands = [lo] + ([] if hi is None else [hi])
    cands.append(lo + 1 if hi is None else (lo + hi) / 2)
    for s in cands:
        t = (s - sigma) / lam
        x, y = c1.point(g, s), c2.point(g, t)
        if x != y:
            return x, y, c1.image(s)
    return None


def _scan(args):
    g, cells, pairs = args
    for i, j in pairs:
        hit = _collision(g, cells[i], cells[j])
        if hit:
            return i, j, hit
    return None


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    witness: tuple | None = None
    pairs_checked: int = 0


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("TROPSKEL_THREADS", "1")))
    except ValueError:
        return 1


def verify_injective(m: TropMap, mode: str = "lattice", cells=None) -> InjectivityReport:
    """Exact pairwise test of cell images.

    The witness is ``(x, y, image)`` with ``x != y`` and equal images.  The
    first witness in cell-pair order is reported, whatever the number of
    workers set by ``TROPSKEL_THREADS``.
    """
    g = m.graph
    cells = cells if cells is not None else cell_decomposition(m, mode)
    for c in cells:
        if not any(c.vector) and (c.stop is None or c.length > 0):
            far = c.start + (1 if c.stop is None else c.length)
            return InjectivityReport(
                False, (c.point(g, Fraction(0)), g.point(c.ident, far), c.origin), 0
            )
    boxes = [_box(c) for c in cells]
    pairs = [(i, j) for i, j in combinations(range(len(cells)), 2) if _boxes_meet(boxes[i], boxes[j])]
    workers = _thread_cap()
    if workers > 1 and len(pairs) > 4000:
        size = -(-len(pairs) // workers)
        chunks = [pairs[k : k + size] for k in range(0, len(pairs), size)]
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_scan, [(g, cells, ch) for ch in chunks]))
        hits = [r for r in results if r]
        if hits:
            i, j, hit = min(hits, key=lambda r: (r[0], r[1]))
            return InjectivityReport(False, hit, len(pairs))
        return InjectivityReport(True, None, len(pairs))
    hit = _scan((g, cells, pairs))
    if hit:
        return InjectivityReport(False, hit[2], len(pairs))
    return InjectivityReport(True, None, len(pairs))


@dataclass(frozen=True)
class FaithfulnessCertificate:
    """Evidence for or against faithfulness.

    ``verdict`` is ``"faithful"``, ``"unimodular-only"`` (isometric on cells
    but not injective) or ``"fails"``.
    """

    cells: tuple[Cell, ...]
    unimodular: bool
    injective: bool
    witness: tuple | None
    pairs_checked: int
    mode: str = "lattice"

    @property
    def verdict(self) -> str:
        if self.unimodular and self.injective:
            return "faithful"
        if self.unimodular:
            return "unimodular-only"
        return "fails"

    @property
    def faithful(self) -> bool:
        return self.verdict == "faithful"


def certify_faithful(m: TropMap, mode: str = "lattice") -> FaithfulnessCertificate:
    uni = verify_unimodular(m, mode)
    inj = verify_injective(m, mode, cells=list(uni.cells))
    witness = inj.witness
    if witness is None and not uni.ok:
        c = uni.failing[0]
        witness = ("cell", c.ident, c.start, c.stop, c.vector)
    return FaithfulnessCertificate(
        uni.cells, uni.ok, inj.injective, witness, inj.pairs_checked, mode
    )
