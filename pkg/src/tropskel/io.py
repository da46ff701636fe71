"""JSON encoding of graphs, divisors, functions, maps and certificates.

Every top-level document carries ``"schema": SCHEMA_VERSION`` and a
``"kind"`` tag.  Rationals are strings ``"p/q"``; integers stay integers.

Point locators are objects:

* ``{"vertex": "v0"}``
* ``{"edge": "e", "offset": "1/2"}`` and ``{"ray": "r", "offset": "3/1"}``
* ``{"end": "r"}`` for the point at infinity of a ray.

:func:`parse_point` also accepts the short text forms ``v0``, ``e@1/2`` and
``end:r``.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path

from .divisors import Divisor, PLFunction
from .graph import GraphError, GraphPoint, MetricGraph, build_graph
from .rational import as_fraction, fraction_to_str
from .tropical import Cell, FaithfulnessCertificate, TropMap, assemble_map

__all__ = [
    "SCHEMA_VERSION",
    "FormatError",
    "certificate_to_dict",
    "divisor_from_dict",
    "divisor_to_dict",
    "dumps",
    "function_from_dict",
    "function_to_dict",
    "graph_from_dict",
    "graph_to_dict",
    "load_json",
    "map_from_dict",
    "map_to_dict",
    "parse_point",
    "point_from_dict",
    "point_to_dict",
    "reduction_to_dict",
    "to_jsonable",
]

SCHEMA_VERSION = 1


class FormatError(ValueError):
    """A document does not match the expected schema."""


def _doc(kind: str, body: dict) -> dict:
    return {"schema": SCHEMA_VERSION, "kind": kind, **body}


def _expect(doc, kind: str) -> Mapping:
    if not isinstance(doc, Mapping):
        raise FormatError(f"expected a JSON object for {kind}")
    if "kind" in doc and doc["kind"] != kind:
        raise FormatError(f"expected kind {kind!r}, found {doc['kind']!r}")
    if "schema" in doc and doc["schema"] != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema version {doc['schema']!r}")
    return doc


def _rat(x, where: str) -> Fraction:
    try:
        return as_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"{where}: not an exact rational: {x!r}") from exc


# -- graphs -----------------------------------------------------------------


def graph_to_dict(g: MetricGraph) -> dict:
    return _doc("graph", g.to_dict())


def graph_from_dict(doc) -> MetricGraph:
    doc = _expect(doc, "graph")
    try:
        return build_graph(doc)
    except (GraphError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"graph: {exc}") from exc


# -- points -----------------------------------------------------------------


def point_to_dict(p: GraphPoint) -> dict:
    if p.kind in ("vertex", "end"):
        return {p.kind: p.ident}
    return {p.kind: p.ident, "offset": fraction_to_str(p.offset)}


def point_from_dict(g: MetricGraph, loc) -> GraphPoint:
    if isinstance(loc, str):
        return parse_point(g, loc)
    if not isinstance(loc, Mapping):
        raise FormatError(f"bad point locator {loc!r}")
    try:
        if "vertex" in loc:
            return g.point(loc["vertex"])
        if "end" in loc:
            return g.point(GraphPoint.end(loc["end"]))
        for key in ("edge", "ray"):
            if key in loc:
                p = g.point(loc[key], _rat(loc["offset"], f"{key} {loc[key]}"))
                return p
    except (GraphError, KeyError) as exc:
        raise FormatError(f"bad point locator {dict(loc)!r}: {exc}") from exc
    raise FormatError(f"bad point locator {dict(loc)!r}")


def parse_point(g: MetricGraph, text: str) -> GraphPoint:
    """Parse ``v0``, ``e@1/2`` or ``end:r``.

    >>> from tropskel.catalog import circle
    >>> parse_point(circle(4), "e@2")
    edge:e@2
    """
    text = text.strip()
    try:
        if text in g.weights:
            return GraphPoint.vertex(text)
        if text.startswith("end:"):
            return g.point(GraphPoint.end(text[4:]))
        if "@" in text:
            ident, off = text.rsplit("@", 1)
            return g.point(ident, _rat(off, text))
    except GraphError as exc:
        raise FormatError(f"bad point {text!r}: {exc}") from exc
    raise FormatError(f"bad point {text!r}")


# -- divisors ---------------------------------------------------------------


def divisor_to_dict(d: Divisor) -> dict:
    return _doc("divisor", {"terms": [{"at": point_to_dict(p), "coeff": c} for p, c in d.items()]})


def divisor_from_dict(g: MetricGraph, doc) -> Divisor:
    doc = _expect(doc, "divisor")
    try:
        terms = doc["terms"]
        out = []
        for t in terms:
            c = t["coeff"]
            if isinstance(c, bool) or not isinstance(c, int):
                raise FormatError(f"divisor coefficient must be an integer, got {c!r}")
            out.append((point_from_dict(g, t["at"]), c))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed divisor: {exc}") from exc
    return Divisor(out)


# -- functions --------------------------------------------------------------


def _profile_to_dict(start: Fraction, br) -> dict:
    return {
        "start": fraction_to_str(start),
        "breaks": [{"off": fraction_to_str(o), "slope": s} for o, s in br],
    }


def _profile_from_dict(item, where: str) -> tuple[Fraction, list]:
    if not isinstance(item, Mapping):
        raise FormatError(f"{where}: expected an object with 'start' and 'breaks'")
    try:
        start = _rat(item["start"], where)
        out = []
        for b in item["breaks"]:
            s = b["slope"]
            if isinstance(s, bool) or not isinstance(s, int):
                raise FormatError(f"{where}: slope must be an integer, got {s!r}")
            out.append((_rat(b["off"], where), s))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{where}: malformed profile: {exc}") from exc
    return start, out


def _end_value(start: Fraction, br, length: Fraction) -> Fraction:
    val = start
    stops = [o for o, _ in br[1:]] + [length]
    for (o, s), stop in zip(br, stops):
        val += s * (stop - o)
    return val


def function_to_dict(f: PLFunction) -> dict:
    g = f.graph
    vv = f.vertex_values
    return _doc(
        "function",
        {
            "vertex_values": {v: fraction_to_str(x) for v, x in vv.items()},
            "edges": {e: _profile_to_dict(vv[x.tail], f.edge_breaks(e)) for e, x in g.edges.items()},
            "rays": {r: _profile_to_dict(vv[x.base], f.ray_breaks(r)) for r, x in g.rays.items()},
        },
    )


def function_from_dict(g: MetricGraph, doc) -> PLFunction:
    """Rebuild a function; ``vertex_values`` may be omitted when every vertex has an edge.

    Each start value must match the value at the tail (or ray base); the
    constructor then checks continuity at every head.
    """
    doc = _expect(doc, "function")
    try:
        edges = {e: _profile_from_dict(item, f"edge {e}") for e, item in doc["edges"].items()}
        rays = {r: _profile_from_dict(item, f"ray {r}") for r, item in doc.get("rays", {}).items()}
        vv = {v: _rat(x, f"vertex {v}") for v, x in doc.get("vertex_values", {}).items()}
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"malformed function: {exc}") from exc
    unknown = (set(edges) - set(g.edges)) | (set(rays) - set(g.rays))
    if unknown:
        raise FormatError(f"function mentions unknown edges or rays {sorted(unknown)}")
    for eid, e in g.edges.items():
        if eid not in edges:
            raise FormatError(f"function has no profile for edge {eid!r}")
        start, br = edges[eid]
        vv.setdefault(e.tail, start)
        if vv[e.tail] != start:
            raise FormatError(f"edge {eid}: start {start} does not match value at {e.tail!r}")
        vv.setdefault(e.head, _end_value(start, br, e.length))
    for rid, r in g.rays.items():
        if rid not in rays:
            raise FormatError(f"function has no profile for ray {rid!r}")
        if vv.setdefault(r.base, rays[rid][0]) != rays[rid][0]:
            raise FormatError(f"ray {rid}: start does not match value at {r.base!r}")
    try:
        return PLFunction(
            g, vv, {e: br for e, (_, br) in edges.items()}, {r: br for r, (_, br) in rays.items()}
        )
    except ValueError as exc:
        raise FormatError(f"invalid function: {exc}") from exc


# -- maps and certificates --------------------------------------------------


def map_to_dict(m: TropMap) -> dict:
    labels = list(m.labels) + [""] * (len(m.functions) - len(m.labels))
    return _doc(
        "map",
        {
            "graph": graph_to_dict(m.graph),
            "base": divisor_to_dict(m.base),
            "functions": [
                {"label": lab, "function": function_to_dict(f)} for lab, f in zip(labels, m.functions)
            ],
        },
    )


def map_from_dict(doc, graph: MetricGraph | None = None) -> TropMap:
    """Rebuild and re-validate a map; ``graph`` overrides the embedded one."""
    doc = _expect(doc, "map")
    try:
        g = graph if graph is not None else graph_from_dict(doc["graph"])
        if graph is not None and "graph" in doc and graph_from_dict(doc["graph"]) != graph:
            raise FormatError("map was built on a different graph")
        base = divisor_from_dict(g, doc["base"])
        fs = [function_from_dict(g, item["function"]) for item in doc["functions"]]
        labels = [item.get("label", "") for item in doc["functions"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed map: {exc}") from exc
    try:
        return assemble_map(g, base, fs, labels)
    except ValueError as exc:
        raise FormatError(f"invalid map: {exc}") from exc


def cell_to_dict(c: Cell) -> dict:
    return {
        "edge": c.ident,
        "from": fraction_to_str(c.start),
        "to": None if c.stop is None else fraction_to_str(c.stop),
        "vector": list(c.vector),
        "primitive": c.primitive,
    }


def certificate_to_dict(cert: FaithfulnessCertificate) -> dict:
    body = {
        "verdict": cert.verdict,
        "unimodular": cert.unimodular,
        "injective": cert.injective,
        "mode": cert.mode,
        "pairs_checked": cert.pairs_checked,
        "cells": [cell_to_dict(c) for c in cert.cells],
        "witness": None,
    }
    w = cert.witness
    if w is not None:
        if w[0] == "cell":
            body["witness"] = {"cell": cell_to_dict(Cell(w[1], w[2], w[3], w[4], ()))}
        else:
            x, y, image = w
            body["witness"] = {
                "x": point_to_dict(x),
                "y": point_to_dict(y),
                "image": [fraction_to_str(v) for v in image],
            }
    return _doc("certificate", body)


def reduction_to_dict(res) -> dict:
    return _doc(
        "reduction",
        {
            "base": to_jsonable(res.base),
            "reduced": divisor_to_dict(res.reduced),
            "witness": function_to_dict(res.witness),
            "transcript": to_jsonable(list(res.transcript)),
        },
    )


# -- generic ----------------------------------------------------------------


def to_jsonable(obj):
    """Recursively convert library values into JSON-ready data."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fraction_to_str(obj)
    if isinstance(obj, GraphPoint):
        return point_to_dict(obj)
    if isinstance(obj, Divisor):
        return divisor_to_dict(obj)
    if isinstance(obj, PLFunction):
        return function_to_dict(obj)
    if isinstance(obj, MetricGraph):
        return graph_to_dict(obj)
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj, key=repr)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
