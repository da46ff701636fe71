"""Command-line front end.

Every subcommand prints one JSON document on stdout.  Exit status is 0 on
success, 1 when a verification fails or a construction is infeasible, and 2
for usage or input-format errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog
from .bounds import bound_report
from .divisors import Divisor
from .graph import GraphError, GraphPoint, MetricGraph, genus
from .io import (
    SCHEMA_VERSION,
    FormatError,
    certificate_to_dict,
    divisor_from_dict,
    divisor_to_dict,
    graph_from_dict,
    graph_to_dict,
    load_json,
    map_from_dict,
    map_to_dict,
    parse_point,
    reduction_to_dict,
    to_jsonable,
)
from .islands import (
    canonical_edges,
    canonical_vertices,
    check_good_divisor,
    good_effective_divisor,
    islands,
    weighted_genus,
)
from .reduction import ReductionError, effective_of_bounded_class, has_effective_representative, push_ends, reduce_divisor
from .synthesis import Infeasible, synthesize_faithful
from .tropical import certify_faithful, chart

__all__ = ["main", "run"]


class UsageError(Exception):
    pass


def _load_graph(source: str) -> MetricGraph:
    """A JSON file path or a catalog name."""
    if Path(source).is_file():
        return graph_from_dict(load_json(source))
    try:
        return catalog.get(source)
    except KeyError as exc:
        raise FormatError(f"{source!r} is neither a readable graph file nor a catalog name") from exc


def _load_divisor(g: MetricGraph, source: str) -> Divisor:
    """A JSON file, or inline text such as ``"2*v0 + e@1/2 - w"``."""
    if Path(source).is_file():
        return divisor_from_dict(g, load_json(source))
    terms = []
    text = source.replace("-", "+-").split("+")
    for raw in text:
        raw = raw.strip()
        if not raw:
            continue
        sign = -1 if raw.startswith("-") else 1
        raw = raw.lstrip("-").strip()
        coeff = 1
        if "*" in raw:
            c, raw = raw.split("*", 1)
            try:
                coeff = int(c)
            except ValueError as exc:
                raise FormatError(f"bad coefficient {c!r} in divisor {source!r}") from exc
        terms.append((parse_point(g, raw), sign * coeff))
    return Divisor(terms)


def _emit(out, doc) -> None:
    out.write(json.dumps(to_jsonable(doc), indent=2) + "\n")


def _wrap(kind: str, body: dict) -> dict:
    return {"schema": SCHEMA_VERSION, "kind": kind, **body}


# -- subcommands ------------------------------------------------------------


def cmd_genus(a, out) -> int:
    g = _load_graph(a.graph)
    _emit(out, _wrap("genus", {"genus": genus(g), "weighted_genus": weighted_genus(g)}))
    return 0


def cmd_reduce(a, out) -> int:
    g = _load_graph(a.graph)
    d = _load_divisor(g, a.divisor)
    base = parse_point(g, a.base)
    if g.rays:
        d = push_ends(g, d)
        g = g.core()
    res = reduce_divisor(g, d, base)
    _emit(out, reduction_to_dict(res))
    return 0


def cmd_effective(a, out) -> int:
    g = _load_graph(a.graph)
    d = _load_divisor(g, a.divisor)
    core = g.core()
    pushed = push_ends(g, d) if g.rays else d
    ok = has_effective_representative(core, pushed)
    body = {"effective_class": ok, "representative": None}
    if ok:
        body["representative"] = divisor_to_dict(effective_of_bounded_class(core, pushed))
    _emit(out, _wrap("effective", body))
    return 0 if ok else 1


def cmd_islands(a, out) -> int:
    g = _load_graph(a.graph)
    dec = islands(g, check=not a.no_check)
    _emit(
        out,
        _wrap(
            "islands",
            {
                "canonical_vertices": canonical_vertices(g),
                "canonical_edges": [
                    {"id": c.id, "start": c.start, "end": c.end, "length": c.length, "type": c.kind.value,
                     "model_edges": sorted(c.model_edges)}
                    for c in canonical_edges(g)
                ],
                "islands": [
                    {"vertices": sorted(i.vertices), "edges": sorted(i.edges), "genus": i.genus}
                    for i in dec.islands
                ],
                "bridges": [b.id for b in dec.bridges],
            },
        ),
    )
    return 0


def cmd_gooddiv(a, out) -> int:
    g = _load_graph(a.graph)
    d = _load_divisor(g, a.divisor_class)
    e = good_effective_divisor(g, d)
    rep = check_good_divisor(g, e)
    _emit(
        out,
        _wrap(
            "good-divisor",
            {
                "divisor": divisor_to_dict(e),
                "conditions": {"i": rep.condition_i, "ii": rep.condition_ii, "iii": rep.condition_iii},
                "island_degrees": list(rep.island_degrees),
                "bridge_degrees": rep.bridge_degrees,
                "edge_degrees": rep.edge_degrees,
            },
        ),
    )
    return 0 if rep.ok else 1


def cmd_synth(a, out) -> int:
    g = _load_graph(a.graph)
    if g.rays and not a.rays:
        raise UsageError("the graph has rays; pass --rays to tropicalize them as ends")
    cls = _load_divisor(g, a.divisor_class) if a.divisor_class else None
    res = synthesize_faithful(g, a.degree, cls)
    if isinstance(res, Infeasible):
        body = {"status": "infeasible", "construction": res.construction, "reason": res.reason}
        if res.needed is not None:
            body["needed"] = divisor_to_dict(res.needed)
        _emit(out, _wrap("synthesis", body))
        return 1
    mdoc = map_to_dict(res.map)
    cdoc = certificate_to_dict(res.certificate)
    if a.map_out:
        Path(a.map_out).write_text(json.dumps(mdoc, indent=2) + "\n")
    if a.certificate_out:
        Path(a.certificate_out).write_text(json.dumps(cdoc, indent=2) + "\n")
    body = {
        "status": res.certificate.verdict,
        "constructions": list(res.constructions),
        "shared_base": res.shared_base,
        "repairs": list(res.repairs),
        "map": mdoc,
        "certificate": cdoc,
    }
    _emit(out, _wrap("synthesis", body))
    return 0 if res.faithful else 1


def _load_map(a):
    g = _load_graph(a.graph) if a.graph else None
    return map_from_dict(load_json(a.map), g)


def cmd_verify(a, out) -> int:
    m = _load_map(a)
    cert = certify_faithful(m, a.mode)
    _emit(out, certificate_to_dict(cert))
    return 0 if cert.faithful else 1


def cmd_plotdata(a, out) -> int:
    """Polylines of the image in chart ``--chart`` for every edge and ray."""
    m = _load_map(a)
    g = m.graph
    lines = []
    if not 0 <= a.chart <= m.dimension:
        raise UsageError(f"chart must lie in 0..{m.dimension}")
    for ident, length in [*((e, x.length) for e, x in g.edges.items()), *((r, None) for r in g.rays)]:
        stops = {Fraction(0)}
        for f in m.functions:
            stops.update(f.breakpoints(ident))
        stop = length if length is not None else max(stops) + a.ray_length
        stops.add(stop)
        ts = sorted(t for t in stops if t <= stop)
        pts = [chart(m(g.point(ident, t)), a.chart) for t in ts]
        lines.append({"edge": ident, "params": ts, "points": pts, "unbounded": length is None})
    _emit(out, _wrap("plotdata", {"chart": a.chart, "polylines": lines}))
    return 0


def cmd_bounds(a, out) -> int:
    if a.g is None and a.d is None:
        raise UsageError("give --g, or --d with --n")
    if (a.d is None) != (a.n is None):
        raise UsageError("--d and --n must be given together")
    rep = bound_report(a.g, a.d, a.n, a.planar)
    _emit(out, _wrap("bounds", rep.to_dict()))
    return 0 if rep.consistent in (None, True) else 1


def cmd_catalog(a, out) -> int:
    if a.name:
        try:
            g = catalog.get(a.name)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from exc
        _emit(out, graph_to_dict(g))
        return 0
    entries = [{"name": e.name, "notes": e.notes, "genus": genus(e.graph)} for e in catalog.CATALOG.values()]
    _emit(out, _wrap("catalog", {"entries": entries}))
    return 0


def cmd_selftest(a, out) -> int:
    from .selftest import run_suites

    results = run_suites(cases=a.cases, seed=a.seed)
    failed = sum(r["failed"] for r in results)
    _emit(out, _wrap("selftest", {"suites": results, "failed": failed,
                                  "passed": sum(r["passed"] for r in results)}))
    return 0 if failed == 0 else 1


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropskel", description="Divisors and faithful tropicalization of metric graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_arg(sp, required=True):
        sp.add_argument("--graph", required=required, help="graph JSON file or catalog name")

    sp = sub.add_parser("genus", help="first Betti number and weighted genus")
    graph_arg(sp)
    sp.set_defaults(func=cmd_genus)

    sp = sub.add_parser("reduce", help="reduced representative of a divisor")
    graph_arg(sp)
    sp.add_argument("--divisor", required=True, help="divisor JSON file or text like '2*v0 - e@1/2'")
    sp.add_argument("--base", required=True, help="base point, e.g. v0 or e@1/2")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("effective", help="decide whether a class has an effective member")
    graph_arg(sp)
    sp.add_argument("--divisor", required=True)
    sp.set_defaults(func=cmd_effective)

    sp = sub.add_parser("islands", help="canonical structure and island decomposition")
    graph_arg(sp)
    sp.add_argument("--no-check", action="store_true", help="skip the weight-0 leaf check")
    sp.set_defaults(func=cmd_islands)

    sp = sub.add_parser("gooddiv", help="good effective divisor of a class")
    graph_arg(sp)
    sp.add_argument("--class", dest="divisor_class", required=True)
    sp.set_defaults(func=cmd_gooddiv)

    sp = sub.add_parser("synth", help="synthesize and certify a faithful tropical map")
    graph_arg(sp)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--rays", action="store_true", help="allow graphs with rays")
    sp.add_argument("--class", dest="divisor_class", help="member of the class to use")
    sp.add_argument("--map-out", help="also write the map document here")
    sp.add_argument("--certificate-out", help="also write the certificate here")
    sp.set_defaults(func=cmd_synth)

    for name, func, helptext in [
        ("verify", cmd_verify, "certify a map file"),
        ("plotdata", cmd_plotdata, "chart polylines of a map file"),
    ]:
        sp = sub.add_parser(name, help=helptext)
        graph_arg(sp, required=False)
        sp.add_argument("--map", required=True)
        if name == "verify":
            sp.add_argument("--mode", choices=["lattice", "breakpoints"], default="lattice")
        else:
            sp.add_argument("--chart", type=int, default=0)
            sp.add_argument("--ray-length", type=int, default=2, help="how far to draw rays past the last break")
        sp.set_defaults(func=func)

    sp = sub.add_parser("bounds", help="closed-form degree bounds")
    sp.add_argument("--g", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--planar", action="store_true")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("catalog", help="list catalog graphs or print one")
    sp.add_argument("--name")
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("selftest", help="run randomized property suites")
    sp.add_argument("--cases", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_selftest)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (FormatError, GraphError, UsageError) as exc:
        err.write(f"tropskel {args.command}: {exc}\n")
        return 2
    except (ValueError, ReductionError) as exc:
        err.write(f"tropskel {args.command}: {exc}\n")
        return 1


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
