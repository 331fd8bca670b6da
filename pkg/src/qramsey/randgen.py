"""Seeded random hypergraphs, colourings and lower-bound instances.

Randomness is drawn from PCG64 raw 64-bit words and turned into exact
categorical choices with integer arithmetic, one draw per r-subset in
canonical ``combinations`` order.
"""

from __future__ import annotations

import secrets
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, lcm

import mpmath
import numpy as np

from .bounds import as_nu_fn, avg_degree_threshold_parts, check_nu_fn, lower_bound_instance_size
from .hypercore import (
    TABLE_MAX_N,
    BudgetExceeded,
    ColourShares,
    EdgeColouring,
    Hypergraph,
    InputError,
    induced_count_table,
    induced_edge_count,
    mask_of,
    popcount_table,
    shares_tuple,
    work_budget,
)


@dataclass(frozen=True)
class Seed:
    seed: int
    path: tuple = ()

    def spawn(self, *idx: int) -> Seed:
        return Seed(self.seed, self.path + tuple(int(i) for i in idx))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    if seed is None:
        return Seed(fresh_seed())
    return Seed(int(seed))


def fresh_seed() -> int:
    return secrets.randbits(63)


def uniform_below(gen: np.random.Generator, den: int, size: int) -> np.ndarray:
    """``size`` exact uniform integers in [0, den) from raw 64-bit words."""
    if den < 1 or den > 1 << 63:
        raise InputError(f"denominator {den} outside 1..2**63")
    if den == 1:
        return np.zeros(size, dtype=np.uint64)
    bg = gen.bit_generator
    if den & (den - 1) == 0:
        shift = np.uint64(64 - (den.bit_length() - 1))
        return bg.random_raw(size) >> shift
    d = np.uint64(den)
    limit = np.uint64((1 << 64) - ((1 << 64) % den))
    out = np.empty(size, dtype=np.uint64)
    filled = 0
    while filled < size:
        raw = bg.random_raw(size - filled)
        ok = raw[raw < limit]
        out[filled:filled + len(ok)] = ok % d
        filled += len(ok)
    return out


def random_hypergraph(n: int, r: int, rho, seed) -> Hypergraph:
    """Binomial random r-uniform hypergraph: each r-subset kept w.p. rho."""
    rho = Fraction(rho)
    if not 0 <= rho <= 1:
        raise InputError("rho must lie in [0,1]")
    subsets = list(combinations(range(n), r))
    u = uniform_below(as_seed(seed).generator(), rho.denominator, len(subsets))
    keep = u < np.uint64(rho.numerator)
    return Hypergraph(r, n, frozenset(e for e, k in zip(subsets, keep) if k))


def random_colouring(n: int, r: int, rho_shares, seed) -> EdgeColouring:
    """i.i.d. colour per r-subset, colour j with probability rho_j."""
    rho = shares_tuple(rho_shares)
    if sum(rho) != 1:
        raise InputError(f"shares sum to {sum(rho)}, expected exactly 1")
    if any(x < 0 for x in rho):
        raise InputError("negative share")
    den = 1
    for x in rho:
        den = lcm(den, x.denominator)
    cum = np.cumsum([int(x * den) for x in rho]).astype(np.uint64)
    total = comb(n, r)
    u = uniform_below(as_seed(seed).generator(), den, total)
    cols = np.searchsorted(cum, u, side="right") + 1
    return EdgeColouring(r, n, len(rho), tuple(cols.tolist()))


# ---------------------------------------------------------------- lower-bound instances

def default_ell_max(r: int) -> int:
    return {2: 14, 3: 12}.get(r, 10)


def _min_violating_edges(ell: int, r: int, rho_j: Fraction, nu: float) -> int:
    """Smallest e with r e / ell >= the average-degree threshold at ell."""
    rat, _ = avg_degree_threshold_parts(ell, r, rho_j, 0.0)
    rat_e = rat * ell / r  # = rho_j C(ell, r)
    if nu == 0:
        return -(-rat_e.numerator // rat_e.denominator)
    with mpmath.workdps(50):
        top = comb(ell - 1, r - 1)
        irr = mpmath.mpf(Fraction(nu).numerator) / Fraction(nu).denominator \
            * mpmath.sqrt(r * top * mpmath.log(ell)) * ell / r
        thr = mpmath.mpf(rat_e.numerator) / rat_e.denominator + irr
        return int(mpmath.ceil(thr))


@dataclass
class LowerBoundCheck:
    passed: bool
    counterexample: tuple | None = None  # (bitmask, colour)
    verified_exact_to: int = 0
    sampled_beyond: bool = False
    mode: str = "exact"


def verify_lower_bound_instance(col: EdgeColouring, rho_shares, k: int, nu_fn=0.0,
                                ell_max_exact: int | None = None, sample_budget: int = 0,
                                seed=0, threads: int = 1,
                                budget: int | None = None) -> LowerBoundCheck:
    """Check avg_degree(H_j[S]) < f_j(|S|) for all S with |S| >= k and all j.

    Sizes up to ``ell_max_exact`` are enumerated exhaustively; larger sizes
    get ``sample_budget`` random subsets each (a sampled check, not a proof).
    The first violation in (size, bitmask, colour) order is returned.
    """
    rho = shares_tuple(rho_shares)
    nu_fn = as_nu_fn(nu_fn)
    n, r = col.n, col.r
    if ell_max_exact is None:
        ell_max_exact = default_ell_max(r)
    hi_exact = min(n, ell_max_exact)
    if k > n:
        return LowerBoundCheck(True, None, n, False, "vacuous")
    check_nu_fn(nu_fn, max(2, k), n)
    need = {(ell, j): _min_violating_edges(ell, r, rho[j - 1], nu_fn(ell))
            for ell in range(k, n + 1) for j in range(1, col.q + 1)}

    if hi_exact >= k:
        hit = _exact_scan(col, k, hi_exact, need, threads, budget)
        if hit is not None:
            return LowerBoundCheck(False, hit, hi_exact, False, "exact")
    sampled = hi_exact < n and sample_budget > 0
    if sampled:
        rng = as_seed(seed).generator()
        for ell in range(hi_exact + 1, n + 1):
            for _ in range(sample_budget):
                S = mask_of(sorted(rng.choice(n, size=ell, replace=False).tolist()))
                for j in range(1, col.q + 1):
                    if induced_edge_count(col.colour_class(j), S, backend="bitset") >= need[ell, j]:
                        return LowerBoundCheck(False, (S, j), hi_exact, True, "sampled")
    mode = "exact" if hi_exact >= n else ("sampled" if sampled else "partial")
    return LowerBoundCheck(True, None, hi_exact, sampled, mode)


def _exact_scan(col: EdgeColouring, lo: int, hi: int, need: dict, threads: int,
                budget: int | None):
    n = col.n
    estimate = sum(comb(n, s) for s in range(lo, hi + 1)) * col.q
    limit = work_budget(budget)
    if n <= TABLE_MAX_N:
        if (1 << n) * col.q > max(limit, 1 << 20):
            raise BudgetExceeded((1 << n) * col.q, limit)
        from .discrepancy import best_subset

        sizes = popcount_table(n)
        in_range = (sizes >= lo) & (sizes <= hi)
        best = None
        for j in range(1, col.q + 1):
            e = induced_count_table(col.colour_class(j))
            need_row = np.full(n + 1, np.iinfo(np.int64).max, dtype=np.int64)
            for ell in range(lo, hi + 1):
                need_row[ell] = need[ell, j]
            bad = in_range & (e.astype(np.int64) >= need_row[sizes])
            if not bad.any():
                continue
            # best_subset with constant values picks the lowest (size, mask).
            idx, _ = best_subset(np.zeros(len(sizes), dtype=np.int8), sizes, bad, threads)
            key = (int(sizes[idx]), idx, j)
            if best is None or key < best:
                best = key
        return None if best is None else (best[1], best[2])
    if estimate > limit:
        raise BudgetExceeded(estimate, limit)
    for ell in range(lo, hi + 1):
        found = None
        for combo in combinations(range(n), ell):
            S = mask_of(combo)
            for j in range(1, col.q + 1):
                if induced_edge_count(col.colour_class(j), S, backend="bitset") >= need[ell, j]:
                    cand = (S, j)
                    if found is None or cand < found:
                        found = cand
                    break
        if found is not None:
            return found
    return None


@dataclass
class LowerBoundInstance:
    colouring: EdgeColouring | None
    found: bool
    metadata: dict = field(default_factory=dict)
    counterexample: tuple | None = None


def make_lower_bound_instance(k: int, r: int, q: int, rho_shares, nu_fn, eta: float,
                              seed, max_attempts: int = 50,
                              ell_max_exact: int | None = None, sample_budget: int = 0,
                              n: int | None = None, threads: int = 1) -> LowerBoundInstance:
    """Random q-colouring on floor(k^(nu(k)^2+1)/(eta e)) vertices, resampled
    until ``verify_lower_bound_instance`` passes.

    ``n`` overrides the vertex count (for experiments below the asymptotic
    regime).
    """
    rho = shares_tuple(rho_shares)
    if len(rho) != q:
        raise InputError(f"{len(rho)} shares given for q={q}")
    ColourShares(rho)
    nu_fn = as_nu_fn(nu_fn)
    if eta <= 1:
        raise InputError("eta must exceed 1")
    check_nu_fn(nu_fn, 2, max(k, 2))
    if n is None:
        n = lower_bound_instance_size(k, nu_fn(k), eta)
    degenerate = n < 1
    if degenerate:
        warnings.warn(f"instance size {n} < 1 is degenerate", stacklevel=2)
        n = max(n, 0)
    if ell_max_exact is None:
        ell_max_exact = default_ell_max(r)
    base = as_seed(seed)
    meta = {"n": n, "k": k, "eta": eta, "attempts": 0,
            "verified_exact_to": min(n, ell_max_exact), "sampled_beyond": False,
            "mode": None, "degenerate": degenerate}
    last = None
    for attempt in range(max_attempts):
        col = random_colouring(n, r, rho, base.spawn(attempt))
        check = verify_lower_bound_instance(col, rho, k, nu_fn, ell_max_exact, sample_budget,
                                            base.spawn(attempt, 1), threads)
        meta.update(attempts=attempt + 1, sampled_beyond=check.sampled_beyond, mode=check.mode,
                    verified_exact_to=check.verified_exact_to)
        if check.passed:
            return LowerBoundInstance(col, True, meta)
        last = check.counterexample
    return LowerBoundInstance(None, False, meta, last)
