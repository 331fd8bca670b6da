"""JSON wire formats for instances, witnesses, certificates and traces.

Rationals are written as "num/den" strings; vertex sets as sorted lists.
``dumps`` produces the canonical byte form used by the CLI.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path

from .discrepancy import DiscrepancyWitness, PartiteWitness
from .hypercore import EdgeColouring, Hypergraph, InputError, as_mask, mask_vertices
from .quasiramsey import ExtractionStep, ExtractionTrace, QuasiRamseyWitness


def rat(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        raise InputError("rationals must be serialised as 'num/den' strings")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=None, separators=(", ", ": ")) + "\n"


def _require(doc: dict, *keys):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise InputError(f"missing field(s) {', '.join(missing)}")


# ---------------------------------------------------------------- instances

def hypergraph_to_json(H: Hypergraph) -> dict:
    return {"r": H.r, "n": H.n, "edges": [list(e) for e in H.sorted_edges()]}


def hypergraph_from_json(doc: dict) -> Hypergraph:
    _require(doc, "r", "n", "edges")
    return Hypergraph.from_edges(int(doc["r"]), int(doc["n"]), doc["edges"])


def colouring_to_json(col: EdgeColouring, compact: bool = False) -> dict:
    listed = [[c, list(e)] for e, c in zip(combinations(range(col.n), col.r), col.colours)
              if not compact or c != 1]
    doc = {"r": col.r, "n": col.n, "q": col.q, "colours": listed}
    if compact:
        doc["compact"] = True
    return doc


def colouring_from_json(doc: dict) -> EdgeColouring:
    _require(doc, "r", "n", "q", "colours")
    r, n, q = int(doc["r"]), int(doc["n"]), int(doc["q"])
    colour_of = {}
    for entry in doc["colours"]:
        c, e = entry
        key = tuple(sorted(int(v) for v in e))
        if len(key) != r or len(set(key)) != r or key[0] < 0 or key[-1] >= n:
            raise InputError(f"bad edge {e!r}")
        if key in colour_of:
            raise InputError(f"edge {key} listed twice")
        colour_of[key] = int(c)
    compact = doc.get("compact", len(colour_of) != comb(n, r))
    if compact and any(c == 1 for c in colour_of.values()):
        raise InputError("compact colourings list only colours 2..q")
    return EdgeColouring.from_map(r, n, q, colour_of, default=1 if compact else None)


def load_instance(path) -> Hypergraph | EdgeColouring:
    doc = json.loads(Path(path).read_text())
    if "colours" in doc:
        return colouring_from_json(doc)
    if "edges" in doc:
        return hypergraph_from_json(doc)
    raise InputError(f"{path}: neither a hypergraph nor a colouring")


# ---------------------------------------------------------------- witnesses

def discrepancy_witness_to_json(w: DiscrepancyWitness, partite: PartiteWitness | None = None) -> dict:
    doc = {"set": w.vertices, "p": rat(w.p), "value": rat(w.value), "kind": "single",
           "size_bound": w.size_bound}
    if partite is not None:
        doc["parts"] = [mask_vertices(m) for m in partite.parts]
        doc["partite_value"] = rat(partite.value)
    return doc


def partite_witness_to_json(w: PartiteWitness) -> dict:
    union = 0
    for m in w.parts:
        union |= m
    return {"set": mask_vertices(union), "p": rat(w.p), "value": rat(w.value),
            "kind": "partite", "parts": [mask_vertices(m) for m in w.parts]}


def discrepancy_witness_from_json(doc: dict):
    _require(doc, "set", "p", "value")
    p, value = parse_rat(doc["p"]), parse_rat(doc["value"])
    if doc.get("kind", "single") == "partite":
        return PartiteWitness(tuple(as_mask(P) for P in doc["parts"]), p, value)
    S = as_mask(doc["set"])
    return DiscrepancyWitness(S, p, value, int(doc.get("size_bound", S.bit_count())))


def certificate_to_json(w: QuasiRamseyWitness, rho=None, slack: float | None = None) -> dict:
    doc = {"set": w.vertices, "colour": w.colour, "nu": w.nu, "mode": w.mode,
           "threshold": w.threshold_text(), "slack": slack, "variant": w.variant,
           "r": w.r, "rho_j": rat(w.rho_j)}
    if rho is not None:
        doc["rho"] = [rat(x) for x in rho]
    return doc


def certificate_from_json(doc: dict) -> QuasiRamseyWitness:
    _require(doc, "set", "colour", "nu", "mode")
    from .quasiramsey import make_witness

    S = as_mask(doc["set"])
    r = int(doc.get("r", 2))
    variant = doc.get("variant", "graph" if r == 2 else "hypergraph")
    rho_j = parse_rat(doc.get("rho_j", "0/1"))
    return make_witness(S, int(doc["colour"]), float(doc["nu"]), doc["mode"], variant, r, rho_j)


def trace_to_json(trace: ExtractionTrace) -> dict:
    return {
        "n": trace.n, "q": trace.q, "nu": trace.nu, "variant": trace.variant,
        "status": trace.status, "fallback": trace.fallback, "monotone": trace.monotone,
        "stop_index": trace.stop_index, "V_sizes": trace.V_sizes,
        "steps": [{"X": mask_vertices(s.X), "colour": s.colour, "D_value": rat(s.D_value),
                   "skew_value": s.skew_value, "repaired": mask_vertices(s.repaired),
                   "maximizer": s.maximizer, "V_size": s.V_size} for s in trace.steps],
    }


def trace_from_json(doc: dict) -> ExtractionTrace:
    tr = ExtractionTrace(doc["n"], doc["q"], doc["nu"], doc["variant"], status=doc["status"],
                         fallback=doc["fallback"], monotone=doc["monotone"])
    for s in doc["steps"]:
        tr.steps.append(ExtractionStep(as_mask(s["X"]), s["colour"], parse_rat(s["D_value"]),
                                       s["skew_value"], as_mask(s["repaired"]), s["maximizer"],
                                       s["V_size"]))
    return tr
