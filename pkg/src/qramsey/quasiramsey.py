"""Skew discrepancy, witness extraction and certificate checking.

A certificate (``QuasiRamseyWitness``) names a vertex set S and colour j
and claims that the colour-j subhypergraph induced on S clears a degree
threshold.  Thresholds split into an exact rational part and an irrational
skew part; certificate checks compare the two at 50 significant digits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm, log, sqrt

import mpmath
import numpy as np

from . import _localsearch
from .discrepancy import best_subset, binomial_row, p_discrepancy
from .hypercore import (
    TABLE_MAX_N,
    ColourShares,
    EdgeColouring,
    Hypergraph,
    InputError,
    as_mask,
    avg_degree,
    degrees_in,
    induced_count_table,
    mask_of,
    mask_vertices,
    min_degree,
    popcount_table,
    shares_tuple,
    work_budget,
)
from .randgen import as_seed

log_ = logging.getLogger(__name__)

VARIANTS = ("graph", "hypergraph")
MODES = ("min", "avg")


def _mpf(x) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _check_variant(variant: str, r: int) -> None:
    if variant not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}")
    if variant == "graph" and r != 2:
        raise InputError("graph variant needs r=2")


def skew_factor(size: int, nu: float, variant: str, r: int = 2) -> float:
    """nu s^(3/2) (graph) or nu s^((r+1)/2) sqrt(ln s) (hypergraph); 0 for s <= 1."""
    if size <= 1 or nu == 0:
        return 0.0
    if variant == "graph":
        return nu * size ** 1.5
    return nu * size ** ((r + 1) / 2) * sqrt(log(size))


def degree_skew(ell: int, nu: float, variant: str, r: int = 2, prec: bool = False):
    """Extra minimum degree demanded of a size-ell set on top of rho C(ell-1, r-1)."""
    if ell <= 1 or nu == 0:
        return mpmath.mpf(0) if prec else 0.0
    if prec:
        nu_m, ell_m = _mpf(nu), mpmath.mpf(ell)
        if variant == "graph":
            return nu_m * mpmath.sqrt(ell_m - 1)
        return ell_m ** (mpmath.mpf(r - 1) / 2) * nu_m * mpmath.sqrt(mpmath.log(ell_m))
    if variant == "graph":
        return nu * sqrt(ell - 1)
    return ell ** ((r - 1) / 2) * nu * sqrt(log(ell))


def avg_skew(ell: int, nu: float, r: int, prec: bool = False):
    """nu sqrt(r C(ell-1, r-1) ln ell), the average-degree skew."""
    if ell <= 1 or nu == 0:
        return mpmath.mpf(0) if prec else 0.0
    top = comb(ell - 1, r - 1)
    if prec:
        return _mpf(nu) * mpmath.sqrt(r * top * mpmath.log(ell))
    return nu * sqrt(r * top * log(ell))


def skew_discrepancy(col: EdgeColouring, rho, j: int, nu: float, S, variant: str = "graph"):
    """D_{rho_j}(S) in colour j minus the skew factor of |S|.

    Returns the exact ``Fraction`` when the skew term vanishes, else a float.
    """
    rho = shares_tuple(rho)
    _check_variant(variant, col.r)
    H = col.colour_class(j)
    mask = as_mask(S, col.n)
    exact = p_discrepancy(H, rho[j - 1], mask)
    skew = skew_factor(mask.bit_count(), nu, variant, col.r)
    return exact if skew == 0 else float(exact) - skew


def skew_monotone(r: int, n: int, nu: float, variant: str) -> bool:
    """Does deleting a below-threshold vertex raise the skew discrepancy for all sizes <= n?

    Needs skew(l) - skew(l-1) >= degree_skew(l) for 2 <= l <= n.
    """
    if nu == 0:
        return True
    with mpmath.workdps(30):
        for ell in range(2, n + 1):
            gain = _skew_mp(ell, nu, variant, r) - _skew_mp(ell - 1, nu, variant, r)
            if gain < degree_skew(ell, nu, variant, r, prec=True):
                return False
    return True


def _skew_mp(size: int, nu: float, variant: str, r: int):
    if size <= 1:
        return mpmath.mpf(0)
    s = mpmath.mpf(size)
    if variant == "graph":
        return _mpf(nu) * s ** 1.5
    return _mpf(nu) * s ** (mpmath.mpf(r + 1) / 2) * mpmath.sqrt(mpmath.log(s))


def _below(value: Fraction, skew_mp) -> bool:
    """value < skew, with skew an mpmath number (exact when skew == 0)."""
    if skew_mp == 0:
        return value < 0
    with mpmath.workdps(50):
        return _mpf(value) < skew_mp


def repair_min_degree(col: EdgeColouring, rho, j: int, nu: float, S, variant: str = "graph",
                      steps: list | None = None) -> int:
    """Delete below-threshold vertices until the colour-j minimum degree holds.

    At size m the threshold is rho_j C(m-1, r-1) plus ``degree_skew(m)``.
    Each round removes the minimum-degree vertex (smallest index on ties)
    if it is below the threshold.  Removed vertices are appended to
    ``steps`` when given.  Returns the final bitmask.
    """
    rho = shares_tuple(rho)
    _check_variant(variant, col.r)
    H = col.colour_class(j)
    r = col.r
    mask = as_mask(S, col.n)
    deg = degrees_in(H, mask)
    while deg:
        m = len(deg)
        base = rho[j - 1] * comb(m - 1, r - 1)
        x = min(deg, key=lambda v: (deg[v], v))
        with mpmath.workdps(50):
            if not _below(deg[x] - base, degree_skew(m, nu, variant, r, prec=True)):
                break
        _remove_vertex(H, deg, mask, x)
        mask &= ~(1 << x)
        if steps is not None:
            steps.append(x)
    return mask


def _remove_vertex(H: Hypergraph, deg: dict, mask: int, x: int) -> None:
    del deg[x]
    if H.r == 2:
        for v in mask_vertices(H.adjacency[x] & mask):
            if v != x:
                deg[v] -= 1
        return
    for em in H.incident_masks[x]:
        if em & mask == em:
            for v in mask_vertices(em):
                deg[v] -= 1


# ---------------------------------------------------------------- certificates

@dataclass(frozen=True)
class QuasiRamseyWitness:
    S: int
    colour: int
    nu: float
    mode: str
    variant: str
    r: int
    rho_j: Fraction
    threshold_rational: Fraction
    threshold_skew: float

    @property
    def vertices(self) -> list[int]:
        return mask_vertices(self.S)

    @property
    def ell(self) -> int:
        return self.S.bit_count()

    def threshold_text(self) -> str:
        return f"{self.threshold_rational} + {self.threshold_skew!r}"


def make_witness(S: int, colour: int, nu: float, mode: str, variant: str, r: int,
                 rho_j) -> QuasiRamseyWitness:
    ell = S.bit_count()
    rho_j = Fraction(rho_j)
    rat = rho_j * comb(ell - 1, r - 1) if ell else Fraction(0)
    if mode == "min":
        irr = degree_skew(ell, nu, variant, r)
    elif mode == "avg":
        irr = avg_skew(ell, nu, r)
    else:
        raise InputError(f"unknown mode {mode!r}")
    return QuasiRamseyWitness(S, colour, float(nu), mode, variant, r, rho_j, rat, irr)


@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    slack: float
    statistic: Fraction
    threshold_rational: Fraction
    threshold_skew: float


def verify_witness(col: EdgeColouring, rho, w: QuasiRamseyWitness) -> VerifyResult:
    """Recompute the certified degree statistic from the colouring alone."""
    rho = shares_tuple(rho)
    if w.mode not in MODES:
        raise InputError(f"unknown mode {w.mode!r}")
    if not 1 <= w.colour <= col.q or len(rho) != col.q:
        raise InputError("colour or shares do not match the colouring")
    if w.r != col.r:
        raise InputError("certificate uniformity differs from the colouring")
    if w.nu < 0:
        raise InputError("nu must be nonnegative")
    _check_variant(w.variant, col.r)
    mask = as_mask(w.S, col.n)
    ell = mask.bit_count()
    if ell == 0:
        raise InputError("empty certificate set")
    H = col.colour_class(w.colour)
    rho_j = rho[w.colour - 1]
    r = col.r
    rat = rho_j * comb(ell - 1, r - 1)
    with mpmath.workdps(50):
        if w.mode == "min":
            stat = Fraction(min_degree(H, mask))
            irr = degree_skew(ell, w.nu, w.variant, r, prec=True)
        else:
            stat = avg_degree(H, mask)
            irr = avg_skew(ell, w.nu, r, prec=True)
        slack = _mpf(stat - rat) - irr
        passed = slack >= 0
        return VerifyResult(bool(passed), float(slack), stat, rat, float(irr))


# ---------------------------------------------------------------- extraction

@dataclass
class ExtractionStep:
    X: int
    colour: int
    D_value: Fraction
    skew_value: float
    repaired: int
    maximizer: str
    V_size: int  # |V_i| after removing X


@dataclass
class ExtractionTrace:
    n: int
    q: int
    nu: float
    variant: str
    steps: list = field(default_factory=list)
    status: str = "ok"
    fallback: bool = False
    monotone: bool = True

    @property
    def stop_index(self) -> int:
        return len(self.steps)

    @property
    def V_sizes(self) -> list[int]:
        return [self.n] + [s.V_size for s in self.steps]

    @property
    def exact(self) -> bool:
        return all(s.maximizer == "exact" for s in self.steps)


def _exact_best(col: EdgeColouring, rho: tuple, nu: float, variant: str,
                V: list[int], threads: int) -> tuple[int, int]:
    m = len(V)
    r = col.r
    sizes = popcount_table(m)
    nonempty = sizes > 0
    L = lcm(*(x.denominator for x in rho))
    skew = np.array([skew_factor(s, nu, variant, r) for s in range(m + 1)])
    best = None
    for j in range(1, col.q + 1):
        e = induced_count_table(col.colour_class(j), V).astype(np.int64)
        coef = int(rho[j - 1] * L)
        pen = np.array([coef * comb(s, r) for s in range(m + 1)], dtype=np.int64)
        vals = L * e - pen[sizes]
        if nu:
            vals = vals / L - skew[sizes]
        idx, val = best_subset(vals, sizes, nonempty, threads)
        key_val = Fraction(int(val), L) if not nu else float(val)
        if best is None or key_val > best[0]:
            best = (key_val, j, idx)
    _, j, idx = best
    return mask_of(V[i] for i in mask_vertices(idx)), j


def _heuristic_best(col: EdgeColouring, rho: tuple, nu: float, variant: str,
                    V: list[int], restarts: int, rng: np.random.Generator) -> tuple[int, int]:
    n, r = col.n, col.r
    allowed = np.zeros(n, dtype=bool)
    allowed[V] = True
    binom = binomial_row(n, r)
    skew = np.array([skew_factor(s, nu, variant, r) for s in range(n + 1)])
    best = None
    for j in range(1, col.q + 1):
        H = col.colour_class(j)
        rj = float(rho[j - 1])

        def score(e, s, rj=rj):
            return e - rj * binom[s] - skew[s]

        inside, val = _localsearch.climb(H.edge_array, n, r, score, len(V), rng,
                                         restarts, allowed=allowed)
        if best is None or val > best[0] + 1e-9:
            best = (val, j, mask_of(np.flatnonzero(inside).tolist()))
    return best[2], best[1]


def extract_witness(col: EdgeColouring, rho, nu: float = 0.0, variant: str = "graph",
                    maximizer: str = "exact", budget: int | None = None, seed=0,
                    k: int | None = None, exact_max_n: int = TABLE_MAX_N,
                    restarts: int = 20, threads: int = 1):
    """Iterated maximal-skew-discrepancy extraction.

    Repeatedly picks (X, j) maximising D_{j,nu} over nonempty subsets of the
    remaining vertices, repairs X to a min-degree certificate, and removes X,
    until fewer than n/2 vertices remain (or a certificate of size >= k is
    found).  Returns (largest certificate or None, trace).
    """
    rho = shares_tuple(rho)
    if sum(rho) != 1:
        raise InputError("extraction needs shares summing to exactly 1")
    if len(rho) != col.q:
        raise InputError(f"{len(rho)} shares for q={col.q}")
    if col.n < 2:
        raise InputError("need n >= 2")
    if maximizer not in ("exact", "heuristic"):
        raise InputError(f"unknown maximizer {maximizer!r}")
    _check_variant(variant, col.r)
    limit = work_budget(budget)
    trace = ExtractionTrace(col.n, col.q, float(nu), variant)
    if variant == "hypergraph":
        trace.monotone = skew_monotone(col.r, col.n, nu, variant)
        if not trace.monotone:
            log_.warning("skew factor not monotone on this range; repair is plain deletion")
    rng = as_seed(seed).generator()
    V = list(range(col.n))
    best_w = None
    while V and 2 * len(V) >= col.n:
        exact_ok = len(V) <= exact_max_n and (1 << len(V)) * col.q <= max(limit, 1 << 20)
        if maximizer == "exact" and exact_ok:
            X, j = _exact_best(col, rho, nu, variant, V, threads)
            used = "exact"
        else:
            if maximizer == "exact":
                trace.fallback = True
            X, j = _heuristic_best(col, rho, nu, variant, V, restarts, rng)
            used = "heuristic"
        if not X:
            break
        H = col.colour_class(j)
        D = p_discrepancy(H, rho[j - 1], X)
        sk = float(D) - skew_factor(X.bit_count(), nu, variant, col.r)
        fixed = repair_min_degree(col, rho, j, nu, X, variant)
        xs = set(mask_vertices(X))
        V = [v for v in V if v not in xs]
        trace.steps.append(ExtractionStep(X, j, D, sk, fixed, used, len(V)))
        if fixed and (best_w is None or fixed.bit_count() > best_w.ell):
            best_w = make_witness(fixed, j, nu, "min", variant, col.r, rho[j - 1])
        if k is not None and fixed.bit_count() >= k:
            break
    if best_w is None:
        trace.status = "failed"
    elif trace.fallback:
        trace.status = "ok-heuristic-fallback"
    return best_w, trace


def extraction_decay_report(trace: ExtractionTrace, rho, q: int) -> dict:
    """Observed D(X_{i_{s+q+1}}) / D(X_{i_s}) along the busiest colour.

    Informational only: ratios above 5/(2(q+1)) are flagged, not asserted.
    """
    if not trace.exact:
        raise InputError("decay report needs an exact-maximizer trace; heuristic "
                         "maxima do not satisfy the maximality the decay argument uses")
    bound = Fraction(5, 2 * (q + 1))
    report = {"colour": None, "indices": [], "ratios": [], "bound": bound, "flagged": []}
    if not trace.steps:
        return report
    counts = {}
    for st in trace.steps:
        counts[st.colour] = counts.get(st.colour, 0) + 1
    colour = min(counts, key=lambda c: (-counts[c], c))
    idx = [i for i, st in enumerate(trace.steps) if st.colour == colour]
    report["colour"] = colour
    report["indices"] = idx
    for s in range(len(idx) - q - 1):
        a = trace.steps[idx[s]].D_value
        b = trace.steps[idx[s + q + 1]].D_value
        ratio = None if a == 0 else b / a
        report["ratios"].append(ratio)
        if ratio is not None and ratio > bound:
            report["flagged"].append(s)
    return report


# ---------------------------------------------------------------- linear regime

@dataclass
class LinearResult:
    ok: bool
    witness: QuasiRamseyWitness | None
    colour: int | None = None
    T: int = 0
    attempts: int = 0
    margin: float | None = None
    status: str = ""


def _greedy_core(H: Hypergraph, level: Fraction) -> int:
    """Delete min-degree vertices (lowest index) below level * C(m-1, r-1)."""
    mask = H.vertex_mask
    deg = degrees_in(H, mask)
    r = H.r
    while deg:
        m = len(deg)
        x = min(deg, key=lambda v: (deg[v], v))
        if deg[x] >= level * comb(m - 1, r - 1):
            break
        _remove_vertex(H, deg, mask, x)
        mask &= ~(1 << x)
    return mask


def linear_regime_search(col: EdgeColouring, rho, k: int, retries: int = 1000,
                         seed=0) -> LinearResult:
    """Greedy low-degree deletion, then uniform k-subsets of the survivors.

    Shares must sum to less than 1.  A colour whose density is at least
    rho_i + eps/q (eps = 1 - sum rho) is pruned to a core T of minimum
    degree >= (rho_i + eps/(2q)) C(|T|-1, r-1); k-subsets of T are sampled
    until one has minimum degree >= rho_i C(k-1, r-1).
    """
    rho = shares_tuple(rho)
    if len(rho) != col.q:
        raise InputError(f"{len(rho)} shares for q={col.q}")
    ColourShares(rho, "linear")
    if k > col.n or k < 1:
        raise InputError("need 1 <= k <= n")
    q, r = col.q, col.r
    eps = 1 - sum(rho)
    eps1 = eps / q
    dens = col.densities()
    rng = as_seed(seed).generator()
    best = None
    tried = 0
    for i in range(1, q + 1):
        if dens[i - 1] < rho[i - 1] + eps1:
            continue
        H = col.colour_class(i)
        T = _greedy_core(H, rho[i - 1] + eps1 / 2)
        Tv = np.array(mask_vertices(T))
        if len(Tv) < k:
            continue
        need = rho[i - 1] * comb(k - 1, r - 1)
        for _ in range(retries):
            tried += 1
            S = mask_of(sorted(rng.choice(Tv, size=k, replace=False).tolist()))
            md = min_degree(H, S)
            if best is None or md - need > best[0]:
                best = (md - need, S, i, T)
            if md >= need:
                w = make_witness(S, i, 0.0, "min", _plain_variant(r), r, rho[i - 1])
                margin = md / comb(k - 1, r - 1) - float(rho[i - 1]) if k > 1 else None
                return LinearResult(True, w, i, T, tried, margin, "ok")
    if best is None:
        return LinearResult(False, None, None, 0, tried, None, "no colour has a core of size k")
    _, S, i, T = best
    w = make_witness(S, i, 0.0, "min", _plain_variant(r), r, rho[i - 1])
    return LinearResult(False, w, i, T, tried, None, "all retries failed")


def _plain_variant(r: int) -> str:
    return "graph" if r == 2 else "hypergraph"


# ---------------------------------------------------------------- full subgraphs

@dataclass
class FullSubgraphResult:
    kind: str  # "full" or "co-full"
    witness: QuasiRamseyWitness
    colouring: EdgeColouring
    rho: tuple
    p: Fraction
    trace: ExtractionTrace | None = None


def full_subgraph_search(G: Hypergraph, budget: int | None = None, seed=0,
                         maximizer: str = "exact", threads: int = 1,
                         k: int | None = None) -> FullSubgraphResult:
    """Full (min degree >= p(l-1)) or co-full (max degree <= p(l-1)) induced subgraph."""
    if G.r != 2:
        raise InputError("full subgraphs are defined for graphs (r=2)")
    p = G.density
    col = EdgeColouring.from_graph(G)
    rho = (p, 1 - p)
    if p in (0, 1):
        w = make_witness(G.vertex_mask, 1, 0.0, "min", "graph", 2, p)
        return FullSubgraphResult("full", w, col, rho, p)
    w, trace = extract_witness(col, rho, 0.0, "graph", maximizer, budget, seed, k=k,
                               threads=threads)
    if w is None:
        raise RuntimeError("extraction produced no certificate")
    kind = "full" if w.colour == 1 else "co-full"
    if kind == "co-full":
        _check_cofull(G, col, w.S, p)
    return FullSubgraphResult(kind, w, col, rho, p, trace)


def _check_cofull(G: Hypergraph, col: EdgeColouring, S: int, p: Fraction) -> None:
    ell = S.bit_count()
    dg = degrees_in(G, S)
    dc = degrees_in(col.colour_class(2), S)
    for v in dg:
        if dg[v] + dc[v] != ell - 1:
            raise AssertionError("complement degree identity violated")
    if max(dg.values()) > p * (ell - 1):
        raise AssertionError("co-full translation failed")


def max_degree(H: Hypergraph, S) -> int:
    return max(degrees_in(H, S).values())
