"""Parameter-grid experiments producing one CSV row per grid point.

Each row carries its parameters, the measured quantities, the matching
closed-form bound, and wall time.  Rows come back in grid order whatever
the thread count.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import bounds
from .discrepancy import max_bounded_discrepancy_heuristic
from .hypercore import InputError, induced_edge_count, mask_of
from .quasiramsey import extract_witness, linear_regime_search, verify_witness
from .randgen import Seed, make_lower_bound_instance, random_colouring, random_hypergraph

KINDS = ("disc-scaling", "extraction", "linear", "lower-bound", "tail-bounds")

COLUMNS = {
    "disc-scaling": ["n", "t", "p", "seed", "measured_max", "thm3_bound", "ratio",
                     "in_hypothesis", "wall_time"],
    "extraction": ["n", "r", "q", "nu", "seed", "ell", "colour", "steps", "slack",
                   "n_over_ln_n", "status", "wall_time"],
    "linear": ["n", "r", "q", "k", "rho", "seed", "success", "attempts", "core_size",
               "margin", "sampling_bound", "wall_time"],
    "lower-bound": ["k", "r", "q", "nu", "eta", "seed", "n", "found", "attempts", "mode",
                    "wall_time"],
    "tail-bounds": ["r", "k", "rho", "t_deg", "exact", "bound", "dominated", "wall_time"],
}

TIMING_COLUMN = "wall_time"


@dataclass
class ExperimentSpec:
    kind: str
    grid: dict
    seeds: list = field(default_factory=lambda: [0])
    out: str | None = None
    explicit: list | None = None  # grid points that are not a product

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown experiment kind {self.kind!r}")
        if not self.seeds:
            raise InputError("empty seed list")
        if not self.grid and not self.explicit:
            raise InputError("empty parameter grid")
        for key, vals in self.grid.items():
            if not vals:
                raise InputError(f"empty grid for {key}")

    def points(self) -> list[dict]:
        if self.explicit is not None:
            return [{**pt, "seed": s} for pt in self.explicit for s in self.seeds]
        keys = sorted(self.grid)
        out = []
        for combo in itertools.product(*(self.grid[k] for k in keys)):
            point = dict(zip(keys, combo))
            for s in self.seeds:
                out.append({**point, "seed": s})
        return out


def run(spec: ExperimentSpec, threads: int = 1) -> list[dict]:
    fn = _RUNNERS[spec.kind]
    pts = spec.points()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(fn, pts))
    else:
        rows = [fn(p) for p in pts]
    return [r for r in rows if r is not None]


def to_csv(kind: str, rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS[kind], lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _fmt(row.get(k)) for k in COLUMNS[kind]})
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


# ---------------------------------------------------------------- runners

def _disc_scaling(pt: dict) -> dict | None:
    n, t, seed = pt["n"], pt["t"], pt["seed"]
    if t > n:
        return None
    p = Fraction(pt.get("p", Fraction(1, 2)))
    t0 = time.perf_counter()
    base = Seed(seed, (n,))
    G = random_hypergraph(n, 2, p, base.spawn(0))
    w = max_bounded_discrepancy_heuristic(G, p, t, budget=pt.get("budget", 10),
                                          seed=base.spawn(t, 1))
    bound = bounds.theorem3_lower_bound(n, t, p, 2)
    measured = abs(float(w.value))
    return {"n": n, "t": t, "p": p, "seed": seed, "measured_max": measured,
            "thm3_bound": bound.value,
            "ratio": measured / bound.value if bound.value else math.inf,
            "in_hypothesis": bound.in_hypothesis, "wall_time": time.perf_counter() - t0}


def fit_exponent(rows: list[dict]) -> float:
    """Least-squares slope of log(measured_max) against log(t), pooled over n."""
    t = np.array([r["t"] for r in rows], dtype=float)
    m = np.array([r["measured_max"] for r in rows], dtype=float)
    keep = m > 0
    slope, _ = np.polyfit(np.log(t[keep]), np.log(m[keep]), 1)
    return float(slope)


def _extraction(pt: dict) -> dict:
    n, q, r, nu, seed = pt["n"], pt.get("q", 2), pt.get("r", 2), pt.get("nu", 0.0), pt["seed"]
    t0 = time.perf_counter()
    rho = tuple(Fraction(1, q) for _ in range(q))
    col = random_colouring(n, r, rho, Seed(seed, (n, q)))
    variant = "graph" if r == 2 else "hypergraph"
    w, trace = extract_witness(col, rho, nu, variant, pt.get("maximizer", "exact"),
                               seed=Seed(seed, (n, q, 1)))
    slack = verify_witness(col, rho, w).slack if w is not None else None
    return {"n": n, "r": r, "q": q, "nu": nu, "seed": seed,
            "ell": w.ell if w else 0, "colour": w.colour if w else None,
            "steps": trace.stop_index, "slack": slack,
            "n_over_ln_n": n / math.log(n), "status": trace.status,
            "wall_time": time.perf_counter() - t0}


def _linear(pt: dict) -> dict:
    n, k, q, r, seed = pt["n"], pt["k"], pt.get("q", 2), pt.get("r", 2), pt["seed"]
    share = Fraction(pt.get("rho", Fraction(3, 10)))
    t0 = time.perf_counter()
    uniform = tuple(Fraction(1, q) for _ in range(q))
    col = random_colouring(n, r, uniform, Seed(seed, (n, q)))
    rho = tuple(share for _ in range(q))
    res = linear_regime_search(col, rho, k, retries=pt.get("retries", 1000),
                               seed=Seed(seed, (n, q, 1)))
    eps1 = float((1 - sum(rho)) / q)
    samp = bounds.sampling_tail_bound(k - 1, r - 1, eps1 / 4) if k - 1 > 2 * (r - 2) else None
    return {"n": n, "r": r, "q": q, "k": k, "rho": share, "seed": seed, "success": res.ok,
            "attempts": res.attempts, "core_size": res.T.bit_count(), "margin": res.margin,
            "sampling_bound": samp, "wall_time": time.perf_counter() - t0}


def _lower_bound(pt: dict) -> dict:
    k, r, q, nu, eta, seed = (pt["k"], pt.get("r", 2), pt.get("q", 2), pt.get("nu", 0.5),
                              pt.get("eta", 1.1), pt["seed"])
    t0 = time.perf_counter()
    rho = tuple(Fraction(1, q) for _ in range(q))
    inst = make_lower_bound_instance(k, r, q, rho, nu, eta, Seed(seed), pt.get("max_attempts", 50))
    m = inst.metadata
    return {"k": k, "r": r, "q": q, "nu": nu, "eta": eta, "seed": seed, "n": m["n"],
            "found": inst.found, "attempts": m["attempts"], "mode": m["mode"],
            "wall_time": time.perf_counter() - t0}


def _tail_bounds(pt: dict) -> list | dict:
    r, k, rho, t_deg = pt["r"], pt["k"], Fraction(pt["rho"]), Fraction(pt["t_deg"])
    t0 = time.perf_counter()
    exact = bounds.exact_density_tail(k, r, rho, t_deg)
    bound = bounds.density_tail_bound(k, r, rho, t_deg)
    return {"r": r, "k": k, "rho": rho, "t_deg": t_deg, "exact": float(exact), "bound": bound,
            "dominated": bound >= float(exact), "wall_time": time.perf_counter() - t0}


def tail_grid(rs=(2, 3), k_max: int = 7, rhos=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))):
    """Every admissible integer degree threshold for each (r, k, rho)."""
    pts = []
    for r in rs:
        for k in range(r, k_max + 1):
            top = comb(k - 1, r - 1)
            for rho in rhos:
                lo = math.ceil(rho * top)
                for t in range(lo, top + 1):
                    pts.append({"r": r, "k": k, "rho": rho, "t_deg": t})
    return pts


def sampling_frequency(H, sample_n: int, eps: float, trials: int, rng: np.random.Generator) -> float:
    """Monte Carlo frequency of e(H[S]) <= (p - eps) C(sample_n, r), S a uniform sample_n-subset."""
    p = float(H.density)
    cut = (p - eps) * comb(sample_n, H.r)
    hits = 0
    for _ in range(trials):
        S = mask_of(rng.choice(H.n, size=sample_n, replace=False).tolist())
        hits += induced_edge_count(H, S) <= cut
    return hits / trials


_RUNNERS = {
    "disc-scaling": _disc_scaling,
    "extraction": _extraction,
    "linear": _linear,
    "lower-bound": _lower_bound,
    "tail-bounds": _tail_bounds,
}
