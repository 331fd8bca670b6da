"""Command-line entry point: ``qramsey <command> ...``.

Exit codes: 0 success, 1 usage or format error, 2 verification failure or
no witness found, 3 work budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import bounds, experiments, formats
from .discrepancy import (
    constructive_disc_search,
    max_bounded_discrepancy_exact,
    max_bounded_discrepancy_heuristic,
    p_discrepancy,
    partite_discrepancy,
)
from .hypercore import BudgetExceeded, EdgeColouring, Hypergraph, InputError, shares_tuple
from .quasiramsey import extract_witness, full_subgraph_search, linear_regime_search, verify_witness
from .randgen import (
    Seed,
    fresh_seed,
    make_lower_bound_instance,
    random_colouring,
    random_hypergraph,
    verify_lower_bound_instance,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------- helpers

def _seed(args) -> int:
    if args.seed is None:
        args.seed = fresh_seed()
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _rho(text: str) -> tuple[Fraction, ...]:
    try:
        return shares_tuple([Fraction(x.strip()) for x in text.split(",")])
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad share list {text!r}") from exc


def _frac(text: str) -> Fraction:
    return formats.parse_rat(text)


def _load(path: str):
    if path.startswith("fixture:"):
        name = path.split(":", 1)[1]
        ref = resources.files("qramsey") / "fixtures" / f"{name}.json"
        if not ref.is_file():
            raise InputError(f"no bundled fixture {name!r}")
        doc = json.loads(ref.read_text())
    else:
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not JSON ({exc})") from exc
    if "colours" in doc:
        return formats.colouring_from_json(doc)
    if "edges" in doc:
        return formats.hypergraph_from_json(doc)
    raise InputError(f"{path}: neither a hypergraph nor a colouring")


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not JSON ({exc})") from exc


def _emit(doc, out: str | None) -> None:
    text = formats.dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _as_colouring(inst, rho_text: str | None):
    """(colouring, shares); a plain graph becomes its 2-colouring with shares (p, 1-p)."""
    if isinstance(inst, Hypergraph):
        p = inst.density
        col = EdgeColouring.from_graph(inst) if inst.r == 2 else None
        if col is None:
            raise InputError("expected a colouring")
        return col, (_rho(rho_text) if rho_text else (p, 1 - p))
    if rho_text is None:
        raise InputError("--rho is required for colourings")
    return inst, _rho(rho_text)


# ---------------------------------------------------------------- commands

def cmd_gen(args) -> int:
    seed = Seed(_seed(args))
    if args.kind == "hypergraph":
        H = random_hypergraph(args.n, args.r, _frac(args.rho or "1/2"), seed)
        _emit(formats.hypergraph_to_json(H), args.out)
        meta = {"kind": "hypergraph", "n": H.n, "r": H.r, "edges": len(H), "seed": args.seed}
    elif args.kind == "colouring":
        rho = _rho(args.rho) if args.rho else tuple(Fraction(1, args.q) for _ in range(args.q))
        if len(rho) != args.q:
            raise InputError(f"{len(rho)} shares for q={args.q}")
        col = random_colouring(args.n, args.r, rho, seed)
        _emit(formats.colouring_to_json(col, compact=args.compact), args.out)
        meta = {"kind": "colouring", "n": col.n, "r": col.r, "q": col.q,
                "class_sizes": [len(H) for H in col.classes], "seed": args.seed}
    else:
        if args.k is None:
            raise InputError("lower-bound needs --k")
        rho = _rho(args.rho) if args.rho else tuple(Fraction(1, args.q) for _ in range(args.q))
        inst = make_lower_bound_instance(args.k, args.r, len(rho), rho, args.nu, args.eta, seed,
                                         args.max_attempts, args.ell_max, args.sample_budget,
                                         args.n, args.threads)
        meta = dict(inst.metadata, seed=args.seed, found=inst.found, r=args.r,
                    rho=[formats.rat(x) for x in rho], nu=args.nu)
        if not inst.found:
            if inst.counterexample:
                S, j = inst.counterexample
                meta["counterexample"] = {"set": formats.mask_vertices(S), "colour": j}
            print(formats.dumps(meta), end="", file=sys.stderr)
            return EXIT_FAIL
        _emit(formats.colouring_to_json(inst.colouring, compact=args.compact), args.out)
    print(formats.dumps(meta), end="", file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def cmd_disc(args) -> int:
    H = _load(args.instance)
    if not isinstance(H, Hypergraph):
        raise InputError("disc expects a hypergraph instance")
    p = _frac(args.p) if args.p else H.density
    t = args.t if args.t is not None else H.n
    partite = None
    if args.method == "exact":
        w = max_bounded_discrepancy_exact(H, p, t, args.budget, args.threads)
    elif args.method == "heuristic":
        w = max_bounded_discrepancy_heuristic(H, p, t, args.restarts, Seed(_seed(args)))
    else:
        w, partite = constructive_disc_search(H, p, t, Seed(_seed(args)), args.samples)
    doc = formats.discrepancy_witness_to_json(w, partite)
    doc["method"] = args.method
    if 0 < t <= H.n and H.n > 1:
        doc["thm3_bound"] = bounds.theorem3_lower_bound(H.n, t, p, H.r).value
    _emit(doc, args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    inst = _load(args.instance)
    if isinstance(inst, Hypergraph) and args.rho is None:
        res = full_subgraph_search(inst, args.budget, Seed(_seed(args)), args.maximizer,
                                   args.threads, args.k)
        w, rho, col, trace = res.witness, res.rho, res.colouring, res.trace
        kind = res.kind
    else:
        col, rho = _as_colouring(inst, args.rho)
        variant = args.variant or ("graph" if col.r == 2 else "hypergraph")
        w, trace = extract_witness(col, rho, args.nu, variant, args.maximizer, args.budget,
                                   Seed(_seed(args)), args.k, restarts=args.restarts,
                                   threads=args.threads)
        kind = None
    if args.trace and trace is not None:
        Path(args.trace).write_text(formats.dumps(formats.trace_to_json(trace)))
    if w is None:
        print("no certificate found", file=sys.stderr)
        return EXIT_FAIL
    doc = formats.certificate_to_json(w, rho, verify_witness(col, rho, w).slack)
    if kind:
        doc["kind"] = kind
    _emit(doc, args.out)
    return EXIT_OK


def cmd_linear(args) -> int:
    inst = _load(args.instance)
    col, rho = _as_colouring(inst, args.rho)
    res = linear_regime_search(col, rho, args.k, args.retries, Seed(_seed(args)))
    if not res.ok:
        print(f"no witness: {res.status} after {res.attempts} samples", file=sys.stderr)
        return EXIT_FAIL
    doc = formats.certificate_to_json(res.witness, rho, verify_witness(col, rho, res.witness).slack)
    doc["attempts"] = res.attempts
    doc["core"] = formats.mask_vertices(res.T)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    doc = _load_json(args.certificate)
    if "colour" in doc:
        rho_text = args.rho or (",".join(doc["rho"]) if "rho" in doc else None)
        col, rho = _as_colouring(inst, rho_text)
        w = formats.certificate_from_json(doc)
        res = verify_witness(col, rho, w)
        out = {"passed": res.passed, "slack": res.slack, "statistic": formats.rat(res.statistic),
               "threshold": f"{res.threshold_rational} + {res.threshold_skew!r}"}
        passed = res.passed
    elif "value" in doc:
        if not isinstance(inst, Hypergraph):
            raise InputError("discrepancy witnesses are checked against a hypergraph")
        w = formats.discrepancy_witness_from_json(doc)
        if doc.get("kind") == "partite":
            actual = partite_discrepancy(inst, w.p, w.parts)
        else:
            actual = p_discrepancy(inst, w.p, w.S)
        passed = actual == w.value
        out = {"passed": passed, "recomputed": formats.rat(actual)}
    elif "metadata" in doc or "k" in doc:
        meta = doc.get("metadata", doc)
        col, rho = _as_colouring(inst, args.rho or ",".join(meta.get("rho", [])) or None)
        check = verify_lower_bound_instance(col, rho, int(meta["k"]), float(meta.get("nu", 0)),
                                            args.ell_max, 0, Seed(0), args.threads)
        passed = check.passed
        out = {"passed": passed, "mode": check.mode, "verified_exact_to": check.verified_exact_to}
    else:
        raise InputError(f"{args.certificate}: unrecognised certificate")
    print(formats.dumps(out), end="")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_bounds(args) -> int:
    kind = args.kind
    if kind == "constants":
        doc = bounds.lemma_constants(args.r).as_dict()
    elif kind == "thm3":
        b = bounds.theorem3_lower_bound(args.n, args.t, _frac(args.p), args.r)
        doc = {"value": b.value, "in_hypothesis": b.in_hypothesis, "note": b.note}
    elif kind == "rate":
        doc = {"value": bounds.rate_function_eval(_frac(args.rho), float(_frac(args.x)))}
    elif kind == "density-tail":
        doc = {"bound": bounds.density_tail_bound(args.k, args.r, _frac(args.rho), _frac(args.t_deg)),
               "exact": float(bounds.exact_density_tail(args.k, args.r, _frac(args.rho),
                                                        _frac(args.t_deg)))}
    elif kind == "sampling-tail":
        doc = {"value": bounds.sampling_tail_bound(args.n, args.r, args.eps)}
    elif kind == "avg-threshold":
        doc = {"value": bounds.avg_degree_threshold(args.ell, args.r, _frac(args.rho), args.nu)}
    elif kind == "lb-size":
        doc = {"n": bounds.lower_bound_instance_size(args.k, args.nu, args.eta)}
    else:
        rho = _rho(args.rho) if args.rho else (Fraction(1, 2), Fraction(1, 2))
        ub = bounds.upper_bound_instance_size(args.k, args.nu, args.eps, args.r, rho)
        doc = {"exponent": ub.exponent, "C": ub.C, "log_size": ub.log_size,
               "size": ub.size if math.isfinite(ub.size) else None}
    print(formats.dumps(doc), end="")
    return EXIT_OK


def parse_values(text: str, doubling: bool = False, cast=int) -> list:
    """'a,b,c' or 'a..b' (doubling when asked, else step 1) or 'a..b:s'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." not in part:
            out.append(cast(Fraction(part)) if cast is not Fraction else Fraction(part))
            continue
        lo, rest = part.split("..", 1)
        step = None
        if ":" in rest:
            rest, step = rest.split(":", 1)
        lo, hi = int(lo), int(rest)
        if lo > hi:
            raise InputError(f"empty range {part!r}")
        if step is None and doubling:
            if lo <= 0:
                raise InputError("doubling ranges need a positive start")
            v = lo
            while v <= hi:
                out.append(v)
                v *= 2
        else:
            out.extend(range(lo, hi + 1, int(step or 1)))
    return out


AUTO_T = [8, 12, 16, 24]


def build_spec(args) -> experiments.ExperimentSpec:
    grid = {}
    for name, doubling, cast in (("n", True, int), ("k", False, int), ("q", False, int),
                                 ("r", False, int), ("budget", False, int),
                                 ("retries", False, int)):
        val = getattr(args, name, None)
        if val is not None:
            grid[name] = parse_values(val, doubling, cast)
    for name in ("nu", "eta"):
        val = getattr(args, name, None)
        if val is not None:
            grid[name] = [float(x) for x in val.split(",")]
    for name in ("p", "rho"):
        val = getattr(args, name, None)
        if val is not None:
            grid[name] = [Fraction(x) for x in val.split(",")]
    if args.t is not None:
        grid["t"] = AUTO_T if args.t == "auto" else parse_values(args.t)
    if args.seeds is not None:
        seeds = parse_values(args.seeds)
    else:
        seeds = [_seed(args)]
    kind = args.kind
    explicit = None
    if kind == "tail-bounds" and not grid:
        explicit = experiments.tail_grid()
    defaults = {"disc-scaling": {"n": [64, 128, 256], "t": AUTO_T},
                "extraction": {"n": [8, 12, 16]},
                "linear": {"n": [64], "k": [8]},
                "lower-bound": {"k": [6]}}
    for key, vals in defaults.get(kind, {}).items():
        grid.setdefault(key, vals)
    return experiments.ExperimentSpec(kind, grid, seeds, args.out, explicit)


def cmd_experiment(args) -> int:
    spec = build_spec(args)
    rows = experiments.run(spec, args.threads)
    text = experiments.to_csv(spec.kind, rows)
    if args.out:
        Path(args.out).write_text(text)
        if not args.no_plot:
            from .plotting import plot_report

            plot_report(spec.kind, rows, Path(args.out).with_suffix(".png"))
        if spec.kind == "disc-scaling" and len({r["t"] for r in rows}) > 1:
            print(f"fitted exponent: {experiments.fit_exponent(rows):.4f}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qramsey", description="Hypergraph discrepancy and quasi-Ramsey tools")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="RNG seed (drawn and printed to stderr if omitted)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None, help="output file (default stdout)")

    g = sub.add_parser("gen", help="generate random instances")
    g.add_argument("kind", nargs="?", default="hypergraph",
                   choices=["hypergraph", "colouring", "lower-bound"])
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--k", type=int, default=None)
    g.add_argument("--rho", default=None, help="density, or comma list of colour shares")
    g.add_argument("--nu", type=float, default=0.0)
    g.add_argument("--eta", type=float, default=1.1)
    g.add_argument("--max-attempts", type=int, default=50)
    g.add_argument("--ell-max", type=int, default=None)
    g.add_argument("--sample-budget", type=int, default=0)
    g.add_argument("--compact", action="store_true")
    common(g)
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("disc", help="bounded-size p-discrepancy search")
    d.add_argument("instance")
    d.add_argument("--t", type=int, default=None)
    d.add_argument("--p", default=None, help="default: edge density")
    m = d.add_mutually_exclusive_group()
    m.add_argument("--exact", dest="method", action="store_const", const="exact")
    m.add_argument("--heuristic", dest="method", action="store_const", const="heuristic")
    m.add_argument("--constructive", dest="method", action="store_const", const="constructive")
    d.set_defaults(method="exact")
    d.add_argument("--budget", type=int, default=None)
    d.add_argument("--restarts", type=int, default=20)
    d.add_argument("--samples", type=int, default=200)
    common(d)
    d.set_defaults(func=cmd_disc)

    s = sub.add_parser("search", help="skew-discrepancy witness extraction")
    s.add_argument("instance")
    s.add_argument("--rho", default=None)
    s.add_argument("--nu", type=float, default=0.0)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--variant", choices=["graph", "hypergraph"], default=None)
    s.add_argument("--maximizer", choices=["exact", "heuristic"], default="exact")
    s.add_argument("--budget", type=int, default=None)
    s.add_argument("--restarts", type=int, default=20)
    s.add_argument("--trace", default=None, help="write the extraction trace here")
    common(s)
    s.set_defaults(func=cmd_search)

    li = sub.add_parser("linear", help="linear-regime greedy and sampling search")
    li.add_argument("instance")
    li.add_argument("--rho", default=None)
    li.add_argument("--k", type=int, required=True)
    li.add_argument("--retries", type=int, default=1000)
    common(li)
    li.set_defaults(func=cmd_linear)

    v = sub.add_parser("verify", help="check a certificate against an instance")
    v.add_argument("instance")
    v.add_argument("certificate")
    v.add_argument("--rho", default=None)
    v.add_argument("--ell-max", type=int, default=None)
    v.add_argument("--threads", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bounds", help="evaluate constants and bounds")
    b.add_argument("kind", choices=["constants", "thm3", "rate", "density-tail", "sampling-tail",
                                    "avg-threshold", "lb-size", "ub-size"])
    b.add_argument("--r", type=int, default=2)
    b.add_argument("--n", type=int, default=None)
    b.add_argument("--t", type=float, default=None)
    b.add_argument("--p", default="1/2")
    b.add_argument("--rho", default="1/2")
    b.add_argument("--x", default=None)
    b.add_argument("--k", type=int, default=None)
    b.add_argument("--t-deg", default=None)
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--ell", type=int, default=None)
    b.add_argument("--nu", type=float, default=0.0)
    b.add_argument("--eta", type=float, default=1.1)
    b.set_defaults(func=cmd_bounds)

    e = sub.add_parser("experiment", help="run a parameter grid and write CSV plus a figure")
    e.add_argument("kind", choices=list(experiments.KINDS))
    e.add_argument("--n", default=None, help="list or range; a..b doubles")
    e.add_argument("--t", default=None, help="list, range, or 'auto'")
    for name in ("k", "q", "r", "budget", "retries", "nu", "eta", "p", "rho"):
        e.add_argument(f"--{name}", default=None)
    e.add_argument("--seeds", default=None, help="seed list or range")
    e.add_argument("--no-plot", action="store_true")
    common(e)
    e.set_defaults(func=cmd_experiment)
    return ap


_REQUIRED = {
    ("bounds", "thm3"): ("n", "t"), ("bounds", "rate"): ("x",),
    ("bounds", "density-tail"): ("k", "t_deg"), ("bounds", "sampling-tail"): ("n",),
    ("bounds", "avg-threshold"): ("ell",), ("bounds", "lb-size"): ("k",),
    ("bounds", "ub-size"): ("k",),
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.command == "gen" and args.kind != "lower-bound" and args.n is None:
            raise UsageError("gen needs --n")
        for name in _REQUIRED.get((args.command, getattr(args, "kind", None)), ()):
            if getattr(args, name) is None:
                raise UsageError(f"bounds {args.kind} needs --{name.replace('_', '-')}")
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"qramsey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"qramsey: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, ValueError, KeyError, OSError) as exc:
        print(f"qramsey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
