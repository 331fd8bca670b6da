"""Bounded-set p-discrepancy: exact, heuristic and constructive searches.

D_p(S) = e(S) - p * C(|S|, r).  All discrepancy values are exact
``Fraction``s; floats appear only inside the search heuristics, and every
returned witness carries a value recomputed exactly from the instance.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

import mpmath
import numpy as np

from . import _localsearch
from .hypercore import (
    TABLE_MAX_N,
    BudgetExceeded,
    Hypergraph,
    InputError,
    as_mask,
    composition_edge_count,
    cross_edge_count,
    induced_count_table,
    induced_edge_count,
    mask_of,
    mask_vertices,
    popcount_table,
    work_budget,
)
from .randgen import as_seed


@dataclass(frozen=True)
class DiscrepancyWitness:
    S: int  # bitmask
    p: Fraction
    value: Fraction
    size_bound: int

    @property
    def vertices(self) -> list[int]:
        return mask_vertices(self.S)

    @property
    def size(self) -> int:
        return self.S.bit_count()

    def check(self, H: Hypergraph) -> bool:
        return self.size <= self.size_bound and p_discrepancy(H, self.p, self.S) == self.value


@dataclass(frozen=True)
class PartiteWitness:
    parts: tuple  # bitmasks B_1..B_r
    p: Fraction
    value: Fraction


def _as_p(p) -> Fraction:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise InputError(f"p={p} outside [0,1]")
    return p


def p_discrepancy(H: Hypergraph, p, S) -> Fraction:
    p = _as_p(p)
    mask = as_mask(S, H.n)
    return induced_edge_count(H, mask) - p * comb(mask.bit_count(), H.r)


def partite_discrepancy(H: Hypergraph, p, parts: Sequence) -> Fraction:
    p = _as_p(p)
    masks = [as_mask(B, H.n) for B in parts]
    prod = 1
    for m in masks:
        prod *= m.bit_count()
    return cross_edge_count(H, masks) - p * prod


def composition_discrepancy(H: Hypergraph, p, parts: Sequence, alpha: Sequence[int]) -> Fraction:
    """D_p(B_1^a_1, ..., B_m^a_m) for a weak composition alpha of r."""
    p = _as_p(p)
    masks = [as_mask(B, H.n) for B in parts]
    prod = 1
    for m, a in zip(masks, alpha):
        prod *= comb(m.bit_count(), a)
    return composition_edge_count(H, masks, alpha) - p * prod


def weak_compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def refinement_sum(H: Hypergraph, p, parts: Sequence) -> Fraction:
    """Right-hand side of the composition expansion of D_p(union of parts)."""
    return sum((composition_discrepancy(H, p, parts, a)
                for a in weak_compositions(H.r, len(parts))), Fraction(0))


def alternating_union_sum(H: Hypergraph, p, parts: Sequence) -> Fraction:
    """sum over U subset of [r] of (-1)^|U| D_p(union of B_i, i in U)."""
    masks = [as_mask(B, H.n) for B in parts]
    total = Fraction(0)
    for U in range(1 << len(masks)):
        union = 0
        for i, m in enumerate(masks):
            if U >> i & 1:
                union |= m
        term = p_discrepancy(H, p, union)
        total += -term if U.bit_count() % 2 else term
    return total


# ---------------------------------------------------------------- exact search

def _subset_count(n: int, t: int) -> int:
    return sum(comb(n, s) for s in range(min(t, n) + 1))


def _chunks(size: int, threads: int) -> list[tuple[int, int]]:
    pieces = max(1, threads) * 4
    step = max(1 << 12, -(-size // pieces))
    return [(lo, min(size, lo + step)) for lo in range(0, size, step)]


def best_subset(values: np.ndarray, sizes: np.ndarray, valid: np.ndarray | None = None,
                threads: int = 1) -> tuple[int, object]:
    """Index maximising ``values``; ties go to smaller size, then smaller index.

    Evaluated over independent index chunks; the reduction reproduces the
    serial answer for any thread count.
    """

    def chunk_best(bounds):
        lo, hi = bounds
        v = values[lo:hi]
        if valid is not None:
            ok = valid[lo:hi]
            if not ok.any():
                return None
            idx = np.flatnonzero(ok)
            v = v[idx]
        else:
            idx = np.arange(hi - lo)
        mx = v.max()
        hits = idx[v == mx]
        sz = sizes[lo:hi][hits]
        k = np.lexsort((hits, sz))[0]
        return (mx, int(sz[k]), lo + int(hits[k]))

    bounds = _chunks(len(values), threads)
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(chunk_best, bounds))
    else:
        results = [chunk_best(b) for b in bounds]
    results = [x for x in results if x is not None]
    if not results:
        raise InputError("no admissible subset")
    best = results[0]
    for cand in results[1:]:
        if cand[0] > best[0] or (cand[0] == best[0] and cand[1:] < best[1:]):
            best = cand
    return best[2], best[0]


def max_bounded_discrepancy_exact(H: Hypergraph, p, t: int, budget: int | None = None,
                                  threads: int = 1) -> DiscrepancyWitness:
    """max |D_p(S)| over |S| <= t by full enumeration.

    Ties: smaller |S| first, then the smaller bitmask.
    """
    p = _as_p(p)
    if not 1 <= t <= max(H.n, 1):
        raise InputError(f"t={t} outside 1..n")
    estimate = _subset_count(H.n, t)
    limit = work_budget(budget)
    if estimate > limit:
        raise BudgetExceeded(estimate, limit)
    if H.n <= TABLE_MAX_N:
        mask = _table_search(H, p, t, threads)
    else:
        mask = _combination_search(H, p, t)
    return DiscrepancyWitness(mask, p, p_discrepancy(H, p, mask), t)


def _scaled_binomials(r: int, n: int, num: int) -> np.ndarray:
    return np.array([num * comb(s, r) for s in range(n + 1)], dtype=object)


def _table_search(H: Hypergraph, p: Fraction, t: int, threads: int) -> int:
    e = induced_count_table(H)
    sizes = popcount_table(H.n)
    num, den = p.numerator, p.denominator
    big = max(den * comb(H.n, H.r), num * comb(H.n, H.r))
    if big < 1 << 62:
        bin_scaled = np.array([num * comb(s, H.r) for s in range(H.n + 1)], dtype=np.int64)
        vals = np.abs(den * e.astype(np.int64) - bin_scaled[sizes])
    else:
        bin_scaled = _scaled_binomials(H.r, H.n, num)
        vals = np.abs(den * e.astype(object) - bin_scaled[sizes])
    idx, _ = best_subset(vals, sizes, sizes <= t, threads)
    return idx


def _combination_search(H: Hypergraph, p: Fraction, t: int) -> int:
    best_key, best_mask = None, 0
    for s in range(min(t, H.n) + 1):
        pen = p * comb(s, H.r)
        for combo in combinations(range(H.n), s):
            m = mask_of(combo)
            val = abs(induced_edge_count(H, m, backend="bitset") - pen)
            key = (-val, s, m)
            if best_key is None or key < best_key:
                best_key, best_mask = key, m
    return best_mask


# ---------------------------------------------------------------- heuristic

def binomial_row(n: int, r: int) -> np.ndarray:
    return np.array([comb(s, r) for s in range(n + 1)], dtype=np.float64)


def max_bounded_discrepancy_heuristic(H: Hypergraph, p, t: int, budget: int = 20,
                                      seed=0) -> DiscrepancyWitness:
    """Hill-climb |D_p(S)| under |S| <= t; ``budget`` is the number of restarts."""
    p = _as_p(p)
    if budget <= 0:
        raise InputError("budget must be positive")
    if not 1 <= t <= max(H.n, 1):
        raise InputError(f"t={t} outside 1..n")
    pf = float(p)
    binom = binomial_row(H.n, H.r)

    def score(e, s):
        return np.abs(e - pf * binom[s])

    rng = as_seed(seed).generator()
    inside, _ = _localsearch.climb(H.edge_array, H.n, H.r, score, t, rng, budget)
    mask = mask_of(np.flatnonzero(inside).tolist())
    # Exact re-scoring: floats only steered the search.
    return DiscrepancyWitness(mask, p, p_discrepancy(H, p, mask), t)


# ---------------------------------------------------------------- signed subset-sum counting

SIGNED_SUM_MAX_M = 24


def _exact_ge(value: Fraction, theta) -> bool:
    if isinstance(theta, (int, Fraction)):
        return abs(value) >= theta
    if isinstance(theta, float):
        return abs(value) >= Fraction(theta)
    with mpmath.workdps(50):
        return mpmath.mpf(abs(value.numerator)) / value.denominator >= mpmath.mpf(theta)


def signed_sum_count(x: Sequence, theta) -> int:
    """Number of V subset of [m] with |sum_{i in V} x_i| >= theta.

    Subset sums come from a float doubling table; sums within rounding
    distance of theta are re-decided exactly (theta may be an int,
    Fraction, float or mpmath number).
    """
    m = len(x)
    if m > SIGNED_SUM_MAX_M:
        raise BudgetExceeded(1 << m, 1 << SIGNED_SUM_MAX_M)
    xs = [Fraction(v) for v in x]
    sums = np.zeros(1)
    for v in xs:
        sums = np.concatenate([sums, sums + float(v)])
    th = float(theta)
    scale = max(1.0, sum(abs(float(v)) for v in xs), abs(th))
    gap = np.abs(sums) - th
    tol = 1e-9 * scale
    count = int(np.count_nonzero(gap > tol))
    for mask in np.flatnonzero(np.abs(gap) <= tol).tolist():
        exact = sum((xs[i] for i in mask_vertices(mask)), Fraction(0))
        count += _exact_ge(exact, theta)
    return count


def lemma1_threshold(c, m: int, y) -> mpmath.mpf:
    """(1/4) sqrt(c m ln y) at 50 digits."""
    with mpmath.workdps(50):
        c = mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator
        return +(mpmath.sqrt(c * m * mpmath.log(y)) / 4)


def partite_signed_count(H: Hypergraph, p, A_parts: Sequence, theta) -> int:
    """Tuples (B_1..B_r), B_i subset of A_i, with |D_p(B_1..B_r)| >= theta.

    Exhaustive over the first r-1 parts; the last part is counted with
    ``signed_sum_count`` over the link discrepancies of its vertices.
    """
    p = _as_p(p)
    r = H.r
    masks = [as_mask(A, H.n) for A in A_parts]
    if len(masks) != r:
        raise InputError(f"need r={r} parts")
    last = mask_vertices(masks[-1])
    heads = [mask_vertices(m) for m in masks[:-1]]
    links = [link_hypergraph(H, a, 0) for a in last] if r > 1 else None
    total = 0
    for choice in _product_of_subsets(heads):
        prod = 1
        for b in choice:
            prod *= b.bit_count()
        if r > 1:
            x = [cross_edge_count(L, list(choice)) - p * prod for L in links]
        else:
            x = [(1 if H.has_edge((a,)) else 0) - p for a in last]
        total += signed_sum_count(x, theta)
    return total


def _product_of_subsets(parts: list[list[int]]):
    if not parts:
        yield ()
        return
    first, rest = parts[0], parts[1:]
    for sub in range(1 << len(first)):
        m = mask_of(first[i] for i in range(len(first)) if sub >> i & 1)
        for tail in _product_of_subsets(rest):
            yield (m,) + tail


# ---------------------------------------------------------------- partite tools

def link_hypergraph(H: Hypergraph, a: int, ambient) -> Hypergraph:
    """(r-1)-uniform link of vertex a restricted to ``ambient``.

    Passing ``ambient=0`` (or None) means all vertices except a.
    """
    if H.r < 2:
        raise InputError("link needs r >= 2")
    if ambient is None or (isinstance(ambient, int) and ambient == 0):
        amb = H.vertex_mask & ~(1 << a)
    else:
        amb = as_mask(ambient, H.n)
    if amb >> a & 1:
        raise InputError(f"vertex {a} lies in the ambient set")
    edges = set()
    for e in H.edges:
        if a in e:
            rest = tuple(v for v in e if v != a)
            if all(amb >> v & 1 for v in rest):
                edges.add(rest)
    return Hypergraph(H.r - 1, H.n, frozenset(edges))


def combine_partite_to_single(H: Hypergraph, p, parts: Sequence,
                              size_bound: int | None = None):
    """Best nonempty union of parts, by |D_p|.

    The alternating-sum identity guarantees the returned value is at least
    2**-r times |D_p(B_1,...,B_r)|.  Returns (U, witness) with U the 1-based
    indices of the parts used.
    """
    p = _as_p(p)
    masks = [as_mask(B, H.n) for B in parts]
    if len(masks) != H.r:
        raise InputError(f"need r={H.r} parts")
    cross = 0
    for m in masks:
        if cross & m:
            raise InputError("parts are not pairwise disjoint")
        cross |= m
    best = None
    for U in range(1, 1 << len(masks)):
        union = 0
        for i, m in enumerate(masks):
            if U >> i & 1:
                union |= m
        val = p_discrepancy(H, p, union)
        key = (-abs(val), union.bit_count(), union, U)
        if best is None or key < best[0]:
            best = (key, U, union, val)
    _, U, union, val = best
    idx = tuple(i + 1 for i in range(len(masks)) if U >> i & 1)
    bound = size_bound if size_bound is not None else cross.bit_count()
    return idx, DiscrepancyWitness(union, p, val, bound)


def constructive_disc_search(H: Hypergraph, p, t: int, seed=0, samples: int = 200):
    """Randomised partite construction of a large-|D_p| set of size <= t.

    Parts A_1..A_{r-1} of size floor(t/r) are fixed by a seeded shuffle, the
    rest of the vertices form A_r.  Random B_i subset of A_i are sampled; for
    each sample the vertices of A_r are ranked by their link discrepancy and
    B_r takes the top floor(t/r) of the sign with the larger total.  The best
    partite tuple is folded into a single set by ``combine_partite_to_single``.
    Returns (witness, PartiteWitness).
    """
    p = _as_p(p)
    r, n = H.r, H.n
    if r < 2:
        raise InputError("constructive search needs r >= 2")
    s = t // r
    if s < 1:
        raise InputError("need floor(t/r) >= 1")
    if n - (r - 1) * s < 1:
        raise InputError("not enough vertices for the partition")
    if samples < 1:
        raise InputError("samples must be positive")
    rng = as_seed(seed).generator()
    perm = rng.permutation(n)
    A = [perm[i * s:(i + 1) * s] for i in range(r - 1)]
    A_last = np.sort(perm[(r - 1) * s:])
    E = H.edge_array
    pf = float(p)

    label = np.full(n, -1, dtype=np.int64)
    label[A_last] = r - 1
    best = None
    for _ in range(samples):
        picks = [Ai[rng.integers(0, 2, size=len(Ai)).astype(bool)] for Ai in A]
        lab = label.copy()
        for i, Bi in enumerate(picks):
            lab[Bi] = i
        prod = 1
        for Bi in picks:
            prod *= len(Bi)
        if len(E):
            le = lab[E]
            ok = np.all(np.sort(le, axis=1) == np.arange(r), axis=1)
            tops = E[ok][le[ok] == r - 1]
            counts = np.bincount(tops, minlength=n)[A_last]
        else:
            counts = np.zeros(len(A_last), dtype=np.int64)
        link = counts - pf * prod
        chosen, total = _top_of_one_sign(link, s)
        if best is None or abs(total) > best[0] + 1e-9:
            best = (abs(total), picks, A_last[chosen])
    _, picks, B_last = best
    parts = [mask_of(B.tolist()) for B in picks] + [mask_of(B_last.tolist())]
    partite = PartiteWitness(tuple(parts), p, partite_discrepancy(H, p, parts))
    _, witness = combine_partite_to_single(H, p, parts, size_bound=t)
    return witness, partite


def _top_of_one_sign(link: np.ndarray, cap: int) -> tuple[np.ndarray, float]:
    order = np.argsort(-link, kind="stable")
    pos = order[link[order] > 0][:cap]
    order_neg = np.argsort(link, kind="stable")
    neg = order_neg[link[order_neg] < 0][:cap]
    pos_sum = float(link[pos].sum()) if len(pos) else 0.0
    neg_sum = float(link[neg].sum()) if len(neg) else 0.0
    if pos_sum >= -neg_sum:
        return np.sort(pos), pos_sum
    return np.sort(neg), neg_sum
