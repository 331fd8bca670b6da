import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given

from conftest import colourings, hypergraphs
from qramsey import formats
from qramsey.cli import main, parse_values
from qramsey.discrepancy import constructive_disc_search, max_bounded_discrepancy_exact
from qramsey.hypercore import InputError
from qramsey.quasiramsey import extract_witness
from qramsey.randgen import Seed, random_colouring, random_hypergraph

HALF = Fraction(1, 2)


def run(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


@given(hypergraphs())
def test_hypergraph_roundtrip(H):
    doc = formats.hypergraph_to_json(H)
    assert formats.hypergraph_from_json(json.loads(formats.dumps(doc))) == H


@given(colourings(max_n=7))
def test_colouring_roundtrip(col):
    for compact in (False, True):
        doc = json.loads(formats.dumps(formats.colouring_to_json(col, compact)))
        assert formats.colouring_from_json(doc) == col


def test_rational_format():
    assert formats.rat(Fraction(3, 6)) == "1/2"
    assert formats.parse_rat("2/4") == HALF
    with pytest.raises(InputError):
        formats.parse_rat(0.5)
    with pytest.raises(InputError):
        formats.parse_rat("1/0")


def test_colouring_rejects_duplicates():
    doc = {"r": 2, "n": 3, "q": 2, "colours": [[1, [0, 1]], [2, [1, 0]], [1, [0, 2]], [1, [1, 2]]]}
    with pytest.raises(InputError):
        formats.colouring_from_json(doc)


def test_witness_roundtrip():
    H = random_hypergraph(10, 2, HALF, Seed(1))
    w = max_bounded_discrepancy_exact(H, HALF, 4)
    back = formats.discrepancy_witness_from_json(json.loads(formats.dumps(formats.discrepancy_witness_to_json(w))))
    assert back == w
    _, part = constructive_disc_search(H, HALF, 4, seed=1, samples=10)
    assert formats.discrepancy_witness_from_json(formats.partite_witness_to_json(part)) == part


def test_certificate_and_trace_roundtrip():
    col = random_colouring(10, 2, (HALF, HALF), Seed(3))
    w, trace = extract_witness(col, (HALF, HALF), 0.25)
    doc = json.loads(formats.dumps(formats.certificate_to_json(w, (HALF, HALF), 0.0)))
    assert formats.certificate_from_json(doc) == w
    tdoc = json.loads(formats.dumps(formats.trace_to_json(trace)))
    assert formats.trace_from_json(tdoc) == trace


def test_parse_values():
    assert parse_values("64..512", doubling=True) == [64, 128, 256, 512]
    assert parse_values("1..4") == [1, 2, 3, 4]
    assert parse_values("0..10:5") == [0, 5, 10]
    assert parse_values("3,5") == [3, 5]
    with pytest.raises(InputError):
        parse_values("5..2")


# ---------------------------------------------------------------- CLI

def test_gen_roundtrip(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, meta, _ = run(["gen", "--r", 2, "--n", 10, "--rho", "1/2", "--seed", 7, "--out", out], capsys)
    assert code == 0 and json.loads(meta)["seed"] == 7
    text = out.read_text()
    H = formats.load_instance(out)
    assert formats.dumps(formats.hypergraph_to_json(H)) == text


def test_gen_colouring_partition(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run(["gen", "colouring", "--q", 3, "--rho", "1/2,1/4,1/4", "--n", 9, "--seed", 1,
                      "--out", out], capsys)
    assert code == 0
    col = formats.load_instance(out)
    assert col.q == 3 and sum(len(H) for H in col.classes) == 36


def test_gen_lower_bound(tmp_path, capsys):
    out = tmp_path / "lb.json"
    code, meta, _ = run(["gen", "lower-bound", "--k", 6, "--nu", 0.5, "--seed", 2, "--out", out], capsys)
    meta = json.loads(meta)
    assert code == 0 and meta["found"] and meta["n"] == 3 and meta["mode"] == "vacuous"


def test_seed_drawn_and_printed(capsys):
    code, out, err = run(["gen", "--n", 5], capsys)
    assert code == 0 and err.startswith("seed: ")


def test_disc_cycle_fixture(capsys):
    code, out, _ = run(["disc", "fixture:cycle5", "--exact", "--t", 5], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["value"] == "1/2" and doc["set"] == [0, 1]


def test_disc_budget_exit(capsys):
    code, _, err = run(["disc", "fixture:cycle5", "--exact", "--t", 3, "--budget", 3], capsys)
    assert code == 3


def test_disc_heuristic_and_constructive(capsys):
    for flag in ("--heuristic", "--constructive"):
        code, out, _ = run(["disc", "fixture:cycle5", flag, "--t", 3, "--seed", 1], capsys)
        assert code == 0 and json.loads(out)["method"] == flag[2:]


def test_search_then_verify(tmp_path, capsys):
    inst = tmp_path / "c.json"
    cert = tmp_path / "cert.json"
    run(["gen", "colouring", "--n", 9, "--seed", 4, "--out", inst], capsys)
    code, _, _ = run(["search", inst, "--rho", "1/2,1/2", "--nu", 0.2, "--seed", 1, "--out", cert,
                      "--trace", tmp_path / "t.json"], capsys)
    assert code == 0
    code, out, _ = run(["verify", inst, cert], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_verify_failure_exit(tmp_path, capsys):
    cert = tmp_path / "bad.json"
    cert.write_text(json.dumps({"set": [0, 1, 2, 3], "colour": 1, "nu": 0.0, "mode": "min",
                                "rho": ["1/2", "1/2"]}))
    code, out, _ = run(["verify", "fixture:triangle_plus_isolated", cert], capsys)
    assert code == 2 and not json.loads(out)["passed"]


def test_verify_discrepancy_witness(tmp_path, capsys):
    w = tmp_path / "w.json"
    _, out, _ = run(["disc", "fixture:cycle5", "--t", 3], capsys)
    w.write_text(out)
    assert run(["verify", "fixture:cycle5", w], capsys)[0] == 0
    doc = json.loads(out)
    doc["value"] = "3/2"
    w.write_text(json.dumps(doc))
    assert run(["verify", "fixture:cycle5", w], capsys)[0] == 2


def test_search_full_subgraph(capsys):
    code, out, _ = run(["search", "fixture:cycle5", "--seed", 0], capsys)
    assert code == 0 and json.loads(out)["kind"] in ("full", "co-full")


def test_linear_cli(tmp_path, capsys):
    inst = tmp_path / "c.json"
    run(["gen", "colouring", "--n", 40, "--seed", 2, "--out", inst], capsys)
    code, out, _ = run(["linear", inst, "--rho", "3/10,3/10", "--k", 6, "--seed", 3], capsys)
    assert code == 0 and len(json.loads(out)["set"]) == 6
    code, _, _ = run(["linear", inst, "--rho", "3/10,3/10", "--k", 40, "--retries", 2, "--seed", 3],
                     capsys)
    assert code == 2


def test_usage_errors(tmp_path, capsys):
    assert run(["nope"], capsys)[0] == 1
    assert run(["gen", "--n", "x"], capsys)[0] == 1
    assert run(["bounds", "thm3"], capsys)[0] == 1
    assert run(["disc", tmp_path / "missing.json"], capsys)[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["disc", bad], capsys)[0] == 1
    assert run(["disc", "fixture:nosuch"], capsys)[0] == 1
    assert run(["gen", "colouring", "--n", 5, "--rho", "1/2,1/3", "--seed", 1], capsys)[0] == 1


def test_bounds_cli(capsys):
    code, out, _ = run(["bounds", "density-tail", "--k", 4, "--t-deg", 2], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["exact"] == 22 / 64 and doc["bound"] == pytest.approx(729 / 1024)
    assert json.loads(run(["bounds", "lb-size", "--k", 10, "--nu", 1], capsys)[1])["n"] == 33
    for kind, extra in [("constants", []), ("thm3", ["--n", 1000, "--t", 10]), ("rate", ["--x", "2/3"]),
                        ("sampling-tail", ["--n", 100]), ("avg-threshold", ["--ell", 5]),
                        ("ub-size", ["--k", 10, "--nu", 1])]:
        code, out, _ = run(["bounds", kind] + extra, capsys)
        assert code == 0 and json.loads(out)


def test_experiment_schema(tmp_path, capsys):
    out = tmp_path / "ds.csv"
    code, _, _ = run(["experiment", "disc-scaling", "--n", "16..32", "--t", "4,8", "--seeds", "0",
                      "--budget", 2, "--out", out], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4
    for col in ("n", "t", "p", "measured_max", "thm3_bound", "ratio", "wall_time"):
        assert col in rows[0]
    assert (tmp_path / "ds.png").stat().st_size > 0


@pytest.mark.parametrize("kind,args", [
    ("extraction", ["--n", "8,10"]),
    ("linear", ["--n", 32, "--k", 6, "--retries", 50]),
    ("lower-bound", ["--k", "5,6"]),
    ("tail-bounds", []),
])
def test_experiment_kinds(tmp_path, capsys, kind, args):
    out = tmp_path / f"{kind}.csv"
    code, _, _ = run(["experiment", kind, "--seeds", "0..1", "--out", out] + args, capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert rows and "wall_time" in rows[0]
    assert (tmp_path / f"{kind}.png").exists()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qramsey", "bounds", "lb-size", "--k", "10", "--nu", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["n"] == 33
