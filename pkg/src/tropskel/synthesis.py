"""Building blocks for faithful maps and the end-to-end synthesizer.

Every building block is a PL function with a fixed order profile:

========================  =====================================================
``synth_edge_disconnected``  0 on one side of a bridge, slope 1 across it
``synth_edge_connected``     tent of height ``l/2`` over a non-bridge edge
``synth_half_separator``     tent of height ``l/4`` over one half of an edge
``synth_edge_pair_separator``  tent over ``e``, zero on another edge
``synth_vertex_separator``   positive at ``v1``, not positive at ``v2``
``synth_end_function``       0 on the minimal core, slope 1 out to a ray's end
========================  =====================================================

A function ``f`` can serve as a coordinate for a class ``D`` when some
effective ``D0 ~ D`` satisfies ``D0 + div(f) >= 0``, that is when the class
``D - N`` is effective for ``N`` the negative part of ``div(f)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .divisors import Divisor, PLFunction, pl_sum
from .graph import EdgeType, GraphError, GraphPoint, MetricGraph, distance, genus
from .islands import CanonicalEdge, canonical_edge_of, canonical_edges, canonical_vertices, islands
from .reduction import (
    equivalence_witness,
    has_effective_representative,
    push_ends,
    reduce_divisor,
)
from .rational import as_fraction
from .tropical import FaithfulnessCertificate, TropMap, assemble_map, certify_faithful

__all__ = [
    "Infeasible",
    "Separator",
    "SynthesisResult",
    "minimal_core",
    "synth_edge_connected",
    "synth_edge_disconnected",
    "synth_edge_pair_separator",
    "synth_end_function",
    "synth_half_separator",
    "synth_point_separator",
    "synth_vertex_separator",
    "synthesize_faithful",
]


# ---------------------------------------------------------------------------
# chain profiles


def _chain_function(g: MetricGraph, ce: CanonicalEdge, knots, start_value, end_value) -> PLFunction:
    """Function following ``knots`` (arc, value) along ``ce``.

    Outside the chain it is ``start_value`` on the component of ``ce.start``
    and ``end_value`` on the component of ``ce.end`` (the same component
    unless ``ce`` is a bridge).
    """
    start_value, end_value = as_fraction(start_value), as_fraction(end_value)
    if ce.kind is EdgeType.CONNECTED and start_value != end_value:
        raise ValueError("a connected-type chain needs equal end values")
    side = _side_of(g, ce)
    vv = {}
    for v in g.vertices:
        if v in ce.inner:
            vv[v] = _profile(knots, ce.length, start_value, end_value, ce.arc(g, GraphPoint.vertex(v)))
        else:
            vv[v] = start_value if side.get(v, "start") == "start" else end_value
    ek: dict[str, list] = {}
    for eid, forward, a in ce.steps:
        e = g.edges[eid]
        inner = [(t, x) for t, x in knots if a < t < a + e.length]
        ek[eid] = [((t - a) if forward else e.length - (t - a), x) for t, x in inner]
    return PLFunction.from_knots(g, vv, ek)


def _profile(knots, length, v0, v1, t):
    pts = [(Fraction(0), v0), *knots, (length, v1)]
    for (a, x), (b, y) in zip(pts, pts[1:]):
        if a <= t <= b:
            return x if a == b else x + (y - x) * (t - a) / (b - a)
    raise AssertionError("arc outside chain")


def _side_of(g: MetricGraph, ce: CanonicalEdge) -> dict[str, str]:
    """Label each vertex off the chain by the chain end it is attached to."""
    if ce.kind is EdgeType.CONNECTED:
        return {}
    cut = ce.model_edges
    label = {ce.start: "start", ce.end: "end"}
    stack = [ce.start, ce.end]
    while stack:
        v = stack.pop()
        for eid, side in g.incident(v):
            if eid in cut:
                continue
            e = g.edges[eid]
            w = e.head if side == "tail" else e.tail
            if w not in label:
                label[w] = label[v]
                stack.append(w)
    return label


def _require_kind(ce: CanonicalEdge, kind: EdgeType, what: str) -> None:
    if ce.kind is not kind:
        raise GraphError(f"edge {ce.id} is of {ce.kind.value} type; {what} needs {kind.value}")


def synth_edge_disconnected(g: MetricGraph, e: str, head: str | None = None) -> PLFunction:
    """Stepwise function across a bridge.

    ``f`` is 0 on the component containing ``head`` (default: the start of
    the chain, which is the stored tail for a single model edge), rises with
    slope 1 across the bridge and is constant ``length`` beyond it, so
    ``div(f) = [head] - [other end]``.
    """
    if e in g.rays:
        raise GraphError("rays are handled by synth_end_function")
    ce = canonical_edge_of(g, e)
    _require_kind(ce, EdgeType.DISCONNECTED, "a stepwise function")
    head = ce.start if head is None else str(head)
    if head == ce.start:
        return _chain_function(g, ce, [], 0, ce.length)
    if head == ce.end:
        return _chain_function(g, ce, [], ce.length, 0)
    raise GraphError(f"{head!r} is not an endpoint of bridge {ce.id}")


def synth_edge_connected(g: MetricGraph, e: str) -> PLFunction:
    """Distance to the nearer chain end on ``e``, zero elsewhere.

    ``div(f) = [v1] + [v2] - 2[mid]``.
    """
    ce = canonical_edge_of(g, e)
    _require_kind(ce, EdgeType.CONNECTED, "a tent")
    half = ce.length / 2
    return _chain_function(g, ce, [(half, half)], 0, 0)


def synth_half_separator(g: MetricGraph, e: str, half: str = "first", sign: int = 1) -> PLFunction:
    """Tent of height ``length/4`` over one half of ``e``, zero elsewhere.

    With ``sign=-1`` the tent points downwards.  Values at the middle point
    and at both ends are 0.
    """
    ce = canonical_edge_of(g, e)
    _require_kind(ce, EdgeType.CONNECTED, "a half separator")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    q = ce.length / 4
    if half == "first":
        knots = [(q, sign * q), (2 * q, 0)]
    elif half == "second":
        knots = [(2 * q, 0), (3 * q, sign * q)]
    else:
        raise ValueError("half must be 'first' or 'second'")
    return _chain_function(g, ce, knots, 0, 0)


def synth_edge_pair_separator(g: MetricGraph, e: str, other: str) -> PLFunction:
    """Tent over ``e``: positive exactly on its interior, zero on ``other``."""
    ce = canonical_edge_of(g, e)
    co = canonical_edge_of(g, other)
    if ce.id == co.id:
        raise ValueError("the two edges must differ")
    return synth_edge_connected(g, e)


# ---------------------------------------------------------------------------
# point separators


@dataclass(frozen=True)
class Separator:
    """A separating function together with a base divisor that supports it."""

    function: PLFunction
    base: Divisor
    route: str


@dataclass(frozen=True)
class Infeasible:
    """No admissible function was found for ``construction``."""

    construction: str
    reason: str
    needed: Divisor | None = None

    def __bool__(self) -> bool:
        return False


def _local_radius(g: MetricGraph, x: GraphPoint) -> Fraction:
    if x.kind == "vertex":
        lens = [g.edges[eid].length / 2 for eid, _ in g.incident(x.ident)]
        return min(lens) if lens else Fraction(1)
    if x.kind == "edge":
        e = g.edges[x.ident]
        return min(x.offset, e.length - x.offset)
    if x.kind == "ray":
        return x.offset
    raise GraphError("no neighbourhood at a ray end")


def small_tent(g: MetricGraph, x: GraphPoint, eps) -> PLFunction:
    """``max(0, eps - dist(., x))`` for ``eps`` within the local radius of ``x``."""
    eps = as_fraction(eps)
    x = g.point(x)
    if eps <= 0 or eps > _local_radius(g, x):
        raise ValueError("radius outside the star of the point")
    vv: dict[str, Fraction] = {}
    ek: dict[str, list] = {}
    rk: dict[str, tuple] = {}
    if x.kind == "vertex":
        vv[x.ident] = eps
        for eid, side in g.incident(x.ident):
            e = g.edges[eid]
            t = eps if side == "tail" else e.length - eps
            if 0 < t < e.length:
                ek.setdefault(eid, []).append((t, 0))
        for rid in g.rays_at(x.ident):
            rk[rid] = ([(eps, 0)], 0)
    elif x.kind == "edge":
        e = g.edges[x.ident]
        ek[x.ident] = [(t, v) for t, v in ((x.offset - eps, 0), (x.offset, eps), (x.offset + eps, 0)) if 0 < t < e.length]
    else:
        ks = [(t, v) for t, v in ((x.offset - eps, 0), (x.offset, eps), (x.offset + eps, 0)) if t > 0]
        rk[x.ident] = (ks, 0)
    return PLFunction.from_knots(g, vv, ek, rk)


def _base_for(g: MetricGraph, d: Divisor, f: PLFunction) -> Divisor | None:
    """Effective ``D0 ~ d`` with ``D0 + div(f) >= 0``, or ``None``."""
    need = f.principal_divisor(ends=True).negative_part()
    rest = d - need
    if not has_effective_representative(g, rest):
        return None
    core = g.core()
    red = reduce_divisor(core, push_ends(g, rest), GraphPoint.vertex(core.vertices[0])).reduced
    return need + red


def synth_point_separator(g: MetricGraph, x, y, d: Divisor) -> Separator | Infeasible:
    """Find ``f`` with ``f(x) > 0 >= f(y)`` supported by an effective member of ``|d|``.

    Routes, in order: an upward tent at ``x``; a downward tent at ``y``
    shifted up; and the reduced-pair route, which compares the reductions of
    ``d - F`` at ``x`` and at ``y`` for small corrections ``F``.
    """
    x, y = g.point(x), g.point(y)
    if x == y:
        raise ValueError("the two points must differ")
    label = f"separate {x!r} | {y!r}"
    dxy = distance(g, x, y) if x.kind != "ray" and y.kind != "ray" else None
    for route, centre, sgn in (("tent-up", x, 1), ("tent-down", y, -1)):
        eps = _local_radius(g, centre)
        if dxy is not None:
            eps = min(eps, dxy / 2)
        elif x.kind == y.kind == "ray" and x.ident == y.ident:
            eps = min(eps, abs(x.offset - y.offset) / 2)
        tent = small_tent(g, centre, eps)
        f = tent if sgn > 0 else tent.scale(-1).shift(eps)
        if f.value(x) > 0 >= f.value(y):
            base = _base_for(g, d, f)
            if base is not None:
                return Separator(f, base, route)
    if g.rays or x.kind == "ray" or y.kind == "ray":
        return Infeasible(label, "no small tent fits the divisor budget")
    corrections = [Divisor()]
    for j in range(1, max(d.degree, 1) + 1):
        corrections += [Divisor({x: j}), Divisor({y: j})]
    for F in corrections:
        r1 = reduce_divisor(g, d - F, x)
        r2 = reduce_divisor(g, d - F, y)
        if not (r1.reduced.is_effective() and r2.reduced.is_effective()):
            continue
        h = pl_sum([r2.witness, r1.witness], [1, -1])
        f = h.shift(-h.value(y))
        if f.value(x) > 0:
            return Separator(f, r1.reduced + F, "reduced-pair")
    return Infeasible(label, "no route produced an admissible separating function")


def synth_vertex_separator(g: MetricGraph, v1: str, v2: str, d: Divisor) -> Separator | Infeasible:
    """Separator for two distinct vertices; see :func:`synth_point_separator`."""
    if str(v1) == str(v2):
        raise ValueError("v1 and v2 must differ")
    return synth_point_separator(g, GraphPoint.vertex(v1), GraphPoint.vertex(v2), d)


# ---------------------------------------------------------------------------
# ends


def minimal_core(g: MetricGraph) -> frozenset[str]:
    """Vertices left after repeatedly pruning weight-0 leaves of the compact part.

    A compact tree of weight 0 shrinks to its smallest vertex.
    """
    alive = set(g.vertices)
    live_edges = set(g.edges)
    while len(alive) > 1:
        deg = {v: 0 for v in alive}
        for eid in live_edges:
            e = g.edges[eid]
            deg[e.tail] += 1
            deg[e.head] += 1
        leaves = sorted(v for v in alive if deg[v] <= 1 and g.weights[v] == 0)
        if not leaves:
            break
        if len(leaves) == len(alive):
            leaves = leaves[1:]
        v = leaves[-1]
        alive.discard(v)
        live_edges = {eid for eid in live_edges if v not in (g.edges[eid].tail, g.edges[eid].head)}
    return frozenset(alive)


def synth_end_function(g: MetricGraph, r: str, core: frozenset[str] | None = None) -> PLFunction:
    """0 on the minimal core, slope 1 along the path to ray ``r`` and out along it.

    Every branch leaving that path, and every other ray, carries the constant
    value of its attaching point.  ``div(f) = [attach] - [end of r]`` once
    the end term is counted.
    """
    if r not in g.rays:
        raise GraphError(f"unknown ray {r!r}")
    core = minimal_core(g) if core is None else core
    # tree distances from the core, recording parents
    parent: dict[str, tuple[str, str] | None] = {v: None for v in core}
    depth = {v: Fraction(0) for v in core}
    stack = sorted(core)
    while stack:
        v = stack.pop()
        for eid, side in g.incident(v):
            e = g.edges[eid]
            w = e.head if side == "tail" else e.tail
            if w in parent:
                continue
            parent[w] = (v, eid)
            depth[w] = depth[v] + e.length
            stack.append(w)
    base = g.rays[r].base
    on_path = set()
    v = base
    while parent[v] is not None:
        on_path.add(v)
        v = parent[v][0]

    def value(u):
        # depth of the last path vertex on the way from the core to u
        chain = []
        while u is not None:
            chain.append(u)
            u = parent[u][0] if parent[u] is not None else None
        for x in chain:
            if x in on_path:
                return depth[x]
        return Fraction(0)

    vv = {u: value(u) for u in g.vertices}
    rk = {r: ((), 1)}
    return PLFunction.from_knots(g, vv, ray_knots=rk)


# ---------------------------------------------------------------------------
# the pipeline


@dataclass(frozen=True)
class Construction:
    label: str
    variants: tuple[tuple[str, PLFunction], ...]
    base: Divisor | None = None


@dataclass(frozen=True)
class SynthesisResult:
    map: TropMap
    certificate: FaithfulnessCertificate
    constructions: tuple[str, ...]
    shared_base: bool
    repairs: tuple[str, ...] = field(default=())

    @property
    def faithful(self) -> bool:
        return self.certificate.faithful


HALF_VARIANTS = (("second", -1), ("second", 1), ("first", -1), ("first", 1))


def _needed(f: PLFunction) -> Divisor:
    return f.principal_divisor(ends=True).negative_part()


def _separated(fs, a: GraphPoint, b: GraphPoint) -> bool:
    return any(f.value(a) != f.value(b) for f in fs)


def _collect(g: MetricGraph) -> list[Construction]:
    out = []
    for ce in canonical_edges(g):
        if ce.kind is EdgeType.DISCONNECTED:
            out.append(Construction(f"bridge:{ce.id}", ((f"bridge:{ce.id}", synth_edge_disconnected(g, ce.id)),)))
        else:
            out.append(Construction(f"tent:{ce.id}", ((f"tent:{ce.id}", synth_edge_connected(g, ce.id)),)))
            vs = tuple(
                (f"half:{ce.id}:{h}:{s:+d}", synth_half_separator(g, ce.id, h, s)) for h, s in HALF_VARIANTS
            )
            out.append(Construction(f"half:{ce.id}", vs))
    core = minimal_core(g)
    for rid in g.rays:
        out.append(Construction(f"end:{rid}", ((f"end:{rid}", synth_end_function(g, rid, core)),)))
    return out


def synthesize_faithful(
    g: MetricGraph, d: int, divisor_class: Divisor | None = None, max_repairs: int = 40
) -> SynthesisResult | Infeasible:
    """Build and certify a faithful map whose coordinates live in one class of degree ``d``.

    Parameters
    ----------
    g : MetricGraph
        Weighted graph, possibly with rays.
    d : int
        Degree of the class.
    divisor_class : Divisor, optional
        A member of the class; defaults to ``d`` times the smallest vertex.

    Returns
    -------
    SynthesisResult or Infeasible
        ``Infeasible`` names the first construction without an admissible
        base divisor.  It is evidence for this class only, not a proof that
        no faithful map of degree ``d`` exists.
    """
    if d < 1:
        raise ValueError("degree must be at least 1")
    D = divisor_class if divisor_class is not None else Divisor({GraphPoint.vertex(g.vertices[0]): d})
    if D.degree != d:
        raise ValueError("divisor class has the wrong degree")
    if not has_effective_representative(g, D):
        return Infeasible("class", "the class has no effective member", D)

    cons = _collect(g)
    fixed = [c.variants[0][1] for c in cons if len(c.variants) == 1]
    dec = islands(g, check=False)
    for isl in dec.islands:
        canon = sorted(v for v in isl.vertices if v in set(canonical_vertices(g)))
        for a, b in combinations(canon, 2):
            pa, pb = GraphPoint.vertex(a), GraphPoint.vertex(b)
            if _separated(fixed, pa, pb):
                continue
            sep = synth_vertex_separator(g, a, b, D)
            if not sep:
                return Infeasible(f"vertex:{a}|{b}", sep.reason)
            cons.append(Construction(f"vertex:{a}|{b}", ((f"vertex:{a}|{b}", sep.function),), sep.base))
            fixed.append(sep.function)

    shared = _try_shared(g, D, cons)
    if shared is not None:
        d0, chosen = shared
        labels = [lab for lab, _ in chosen]
        fs = [f for _, f in chosen]
    else:
        picked = _per_construction(g, D, cons)
        if isinstance(picked, Infeasible):
            return picked
        d0 = _reference_base(g, D)
        labels, fs = [], []
        for lab, f, base in picked:
            _append_rebased(g, d0, base, lab, f, labels, fs)

    m = assemble_map(g, d0, fs, labels)
    cert = certify_faithful(m)
    repairs: list[str] = []
    while not cert.faithful:
        if len(repairs) >= max_repairs:
            return Infeasible("repair", f"still not faithful after {max_repairs} repairs")
        if not cert.unimodular:
            return Infeasible("unimodular", f"cell {cert.witness!r} has no primitive slope vector")
        x, y, _ = cert.witness
        sep = synth_point_separator(g, x, y, D)
        if not sep:
            return Infeasible(sep.construction, sep.reason)
        lab = f"repair:{x!r}|{y!r}"
        repairs.append(lab)
        _append_rebased(g, d0, sep.base, lab, sep.function, labels, fs)
        m = assemble_map(g, d0, fs, labels)
        cert = certify_faithful(m)
    return SynthesisResult(m, cert, tuple(c.label for c in cons), shared is not None, tuple(repairs))


def _reference_base(g: MetricGraph, D: Divisor) -> Divisor:
    core = g.core()
    return reduce_divisor(core, push_ends(g, D), GraphPoint.vertex(core.vertices[0])).reduced


def _append_rebased(g, d0, base, lab, f, labels, fs):
    """Add ``f`` as a coordinate over ``d0`` given that ``base + div(f) >= 0``."""
    if base == d0:
        labels.append(lab)
        fs.append(f)
        return
    b = equivalence_witness(g, base, d0)
    if b is None:
        raise AssertionError("construction base is not in the class")
    labels += [f"{lab}:shift", lab]
    fs += [b, pl_sum([b, f])]


def _try_shared(g, D, cons):
    """One base divisor for every construction, picking variants greedily."""
    need = Divisor()
    chosen: list = []
    for c in cons:
        if len(c.variants) == 1:
            need = need.pointwise_max(_needed(c.variants[0][1]))
            chosen.append(c.variants[0])
    if need.degree > D.degree or not has_effective_representative(g, D - need):
        return None
    for c in cons:
        if len(c.variants) == 1:
            continue
        for lab, f in c.variants:
            trial = need.pointwise_max(_needed(f))
            if trial.degree <= D.degree and has_effective_representative(g, D - trial):
                need = trial
                chosen.append((lab, f))
                break
        else:
            return None
    core = g.core()
    rest = reduce_divisor(core, push_ends(g, D - need), GraphPoint.vertex(core.vertices[0])).reduced
    order = {c.label: i for i, c in enumerate(cons)}
    chosen.sort(key=lambda lf: order[_owner(lf[0], cons)])
    return need + rest, chosen


def _owner(label: str, cons) -> str:
    for c in cons:
        if any(lab == label for lab, _ in c.variants):
            return c.label
    raise KeyError(label)


def _per_construction(g, D, cons):
    out = []
    for c in cons:
        for lab, f in c.variants:
            base = c.base if c.base is not None else _base_for(g, D, f)
            if base is not None:
                out.append((lab, f, base))
                break
        else:
            return Infeasible(c.label, "no variant fits an effective member of the class", _needed(c.variants[0][1]))
    return out
