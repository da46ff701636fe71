from __future__ import annotations

import io
import json
import random
import subprocess
import sys

import pytest

from tropskel import catalog
from tropskel.cli import run
from tropskel.divisors import Divisor
from tropskel.graph import GraphPoint
from tropskel.io import (
    SCHEMA_VERSION,
    FormatError,
    divisor_from_dict,
    divisor_to_dict,
    function_from_dict,
    function_to_dict,
    graph_from_dict,
    graph_to_dict,
    map_from_dict,
    map_to_dict,
    parse_point,
)
from tropskel.synthesis import synthesize_faithful
from tropskel.testing import random_divisor, random_pl_function


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None), err.getvalue()


# -- round trips --------------------------------------------------------------


@pytest.mark.parametrize("name", catalog.names())
def test_graph_round_trip(name):
    g = catalog.get(name)
    doc = json.loads(json.dumps(graph_to_dict(g)))
    assert doc["schema"] == SCHEMA_VERSION
    assert graph_from_dict(doc) == g


@pytest.mark.parametrize("name", catalog.names())
def test_divisor_and_function_round_trip(name):
    g = catalog.get(name)
    rng = random.Random(name)
    for _ in range(10):
        d = random_divisor(rng, g, lattice=None)
        if g.rays:
            d = d + Divisor({GraphPoint.end(rng.choice(list(g.rays))): 1, g.point(rng.choice(list(g.rays)), "5/2"): 2})
        assert divisor_from_dict(g, json.loads(json.dumps(divisor_to_dict(d)))) == d
        f = random_pl_function(rng, g)
        assert function_from_dict(g, json.loads(json.dumps(function_to_dict(f)))) == f


def test_map_round_trip():
    res = synthesize_faithful(catalog.get("dumbbell"), 5)
    doc = json.loads(json.dumps(map_to_dict(res.map)))
    m = map_from_dict(doc)
    assert m == res.map and m.labels == res.map.labels


def test_rationals_are_p_over_q():
    g = catalog.get("theta")
    doc = function_to_dict(random_pl_function(random.Random(0), g))
    offs = [b["off"] for prof in doc["edges"].values() for b in prof["breaks"]]
    assert all("/" in o for o in offs)


def test_format_errors():
    g = catalog.get("circle4")
    with pytest.raises(FormatError):
        divisor_from_dict(g, {"terms": [{"at": {"vertex": "zz"}, "coeff": 1}]})
    with pytest.raises(FormatError):
        divisor_from_dict(g, {"terms": [{"at": {"vertex": "v0"}, "coeff": 1.5}]})
    with pytest.raises(FormatError):
        graph_from_dict({"kind": "divisor"})
    with pytest.raises(FormatError):
        function_from_dict(g, {"edges": {"e": {"start": "0", "breaks": [{"off": "0", "slope": 1}]}}})
    with pytest.raises(FormatError):
        parse_point(g, "e@9")
    with pytest.raises(FormatError):
        graph_from_dict({"schema": 99, "vertices": []})


# -- command line -------------------------------------------------------------


def test_catalog_theta():
    code, doc, _ = cli("catalog", "--name", "theta")
    assert code == 0 and graph_from_dict(doc) == catalog.get("theta")


def test_synth_circle_three(tmp_path):
    mp = tmp_path / "m.json"
    code, doc, _ = cli("synth", "--graph", "circle4", "--degree", "3", "--map-out", str(mp))
    assert code == 0 and doc["status"] == "faithful"
    cert = doc["certificate"]
    assert cert["verdict"] == "faithful"
    assert set(cert["cells"][0]) == {"edge", "from", "to", "vector", "primitive"}
    code, doc, _ = cli("verify", "--map", str(mp))
    assert code == 0 and doc["verdict"] == "faithful"
    code, doc, _ = cli("plotdata", "--map", str(mp))
    assert code == 0 and doc["polylines"][0]["edge"] == "e"


def test_synth_circle_two_is_infeasible():
    code, doc, _ = cli("synth", "--graph", "circle4", "--degree", "2")
    assert code == 1 and doc["status"] == "infeasible"


def test_verify_failing_map(tmp_path):
    g = catalog.get("circle4")
    from tropskel.divisors import PLFunction
    from tropskel.tropical import assemble_map

    f1 = PLFunction.from_knots(g, {"v0": 0}, {"e": [(2, 2)]})
    m = assemble_map(g, Divisor({GraphPoint.vertex("v0"): 1, g.point("e", 2): 2}), [f1])
    p = tmp_path / "m.json"
    p.write_text(json.dumps(map_to_dict(m)))
    code, doc, _ = cli("verify", "--map", str(p))
    assert code == 1 and doc["verdict"] == "unimodular-only"
    assert doc["witness"]["x"] and doc["witness"]["y"]


def test_reduce_and_effective():
    code, doc, _ = cli("reduce", "--graph", "circle4", "--divisor", "3*e@2", "--base", "v0")
    assert code == 0
    g = catalog.get("circle4")
    assert divisor_from_dict(g, doc["reduced"]) == Divisor({GraphPoint.vertex("v0"): 2, g.point("e", 2): 1})
    assert doc["transcript"]
    code, doc, _ = cli("effective", "--graph", "circle4", "--divisor", "e@1 - e@2")
    assert code == 1 and doc["effective_class"] is False


def test_islands_gooddiv_genus():
    code, doc, _ = cli("islands", "--graph", "dumbbell")
    assert code == 0 and doc["bridges"] == ["b"] and len(doc["islands"]) == 2
    code, doc, _ = cli("gooddiv", "--graph", "dumbbell", "--class", "2*v1")
    assert code == 0 and doc["conditions"] == {"i": True, "ii": True, "iii": True}
    code, doc, _ = cli("genus", "--graph", "theta")
    assert doc["genus"] == 2


def test_bounds_command():
    code, doc, _ = cli("bounds", "--g", "10")
    assert code == 0 and doc["t_g"] == 29
    code, doc, _ = cli("bounds", "--d", "4", "--n", "2", "--planar")
    assert doc["D_bound"] == 2
    code, _, err = cli("bounds", "--d", "4")
    assert code == 2 and "--n" in err


def test_usage_and_format_errors(tmp_path):
    assert cli("nonsense")[0] == 2
    assert cli("genus", "--graph", "no-such-graph")[0] == 2
    bad = tmp_path / "g.json"
    bad.write_text("{ not json")
    code, _, err = cli("genus", "--graph", str(bad))
    assert code == 2 and "1:3" in err
    assert cli("synth", "--graph", "circle4-two-rays", "--degree", "3")[0] == 2


def test_graph_file_input(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps(graph_to_dict(catalog.get("unit-theta"))))
    code, doc, _ = cli("genus", "--graph", str(p))
    assert code == 0 and doc["genus"] == 2


def test_selftest_command():
    code, doc, _ = cli("selftest", "--cases", "5")
    assert code == 0 and doc["failed"] == 0 and doc["passed"] == 5 * len(doc["suites"])


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-c", "from tropskel.cli import main; main()", "bounds", "--g", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["t_g"] == 5
