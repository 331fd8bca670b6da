"""Uniform hypergraphs, edge colourings and exact induced counting.

Vertex sets are Python ints used as bitmasks (bit ``v`` set iff ``v`` is in
the set).  Every public function also accepts any iterable of vertex
indices; ``as_mask`` does the conversion.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

#: Above this many vertices the 2**n subset tables are never built.
TABLE_MAX_N = 24

DEFAULT_WORK_BUDGET = 1 << 25


class InputError(ValueError):
    """Raised for malformed instances or arguments outside their domain."""


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive enumeration would exceed the work budget."""

    def __init__(self, estimate: int, budget: int):
        super().__init__(
            f"enumeration needs about {estimate} subsets, budget is {budget} "
            "(raise it with QRAMSEY_WORK_BUDGET)"
        )
        self.estimate = estimate
        self.budget = budget


def work_budget(budget: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get("QRAMSEY_WORK_BUDGET")
    return int(env) if env else DEFAULT_WORK_BUDGET


# ---------------------------------------------------------------- vertex sets

def as_mask(S, n: int | None = None) -> int:
    """Convert a vertex set (int bitmask or iterable of indices) to a bitmask."""
    if isinstance(S, (int, np.integer)) and not isinstance(S, bool):
        mask = int(S)
        if mask < 0:
            raise InputError("negative bitmask")
    else:
        mask = 0
        for v in S:
            v = int(v)
            if v < 0:
                raise InputError(f"vertex {v} out of range")
            mask |= 1 << v
    if n is not None and mask >> n:
        raise InputError(f"vertex {mask.bit_length() - 1} out of range for n={n}")
    return mask


def mask_vertices(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def popcount_table(m: int) -> np.ndarray:
    """popcount of every mask in [0, 2**m) as uint8."""
    return np.bitwise_count(np.arange(1 << m, dtype=np.uint32)).astype(np.uint8)


# ---------------------------------------------------------------- hypergraph

@dataclass(frozen=True)
class Hypergraph:
    """An r-uniform hypergraph on vertices 0..n-1.

    Edges are stored as sorted tuples.  Two counting backends are kept: the
    canonical tuple set, and a bitset map sending each (r-1)-subset of an
    edge to the n-bit mask of vertices completing it.
    """

    r: int
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.r < 1:
            raise InputError("uniformity r must be >= 1")
        if self.n < 0:
            raise InputError("n must be >= 0")
        canon = set()
        for e in self.edges:
            t = tuple(sorted(int(v) for v in e))
            if len(t) != self.r or len(set(t)) != self.r:
                raise InputError(f"edge {e!r} does not have {self.r} distinct vertices")
            if t[0] < 0 or t[-1] >= self.n:
                raise InputError(f"edge {e!r} has a vertex out of range for n={self.n}")
            canon.add(t)
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def from_edges(cls, r: int, n: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
        return cls(r, n, frozenset(tuple(e) for e in edges))

    @classmethod
    def complete(cls, r: int, n: int) -> Hypergraph:
        return cls(r, n, frozenset(combinations(range(n), r)))

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def density(self) -> Fraction:
        total = comb(self.n, self.r)
        return Fraction(len(self.edges), total) if total else Fraction(0)

    def sorted_edges(self) -> list[tuple[int, ...]]:
        return sorted(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """(m, r) int array of the edges in canonical order."""
        if not self.edges:
            return np.zeros((0, self.r), dtype=np.int64)
        return np.array(self.sorted_edges(), dtype=np.int64)

    @cached_property
    def edge_masks(self) -> list[int]:
        return [mask_of(e) for e in self.sorted_edges()]

    @cached_property
    def completion_bits(self) -> dict[tuple[int, ...], int]:
        bits: dict[tuple[int, ...], int] = {}
        for e in self.edges:
            for i, v in enumerate(e):
                key = e[:i] + e[i + 1:]
                bits[key] = bits.get(key, 0) | (1 << v)
        return bits

    @cached_property
    def _completion_items(self) -> list[tuple[int, int]]:
        return [(mask_of(k), b) for k, b in self.completion_bits.items()]

    @cached_property
    def incident_masks(self) -> list[list[int]]:
        """For each vertex v, masks of e minus v over the edges e containing v."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for e in self.edges:
            m = mask_of(e)
            for v in e:
                inc[v].append(m & ~(1 << v))
        return inc

    @cached_property
    def adjacency(self) -> list[int]:
        """Neighbourhood bitmasks (graphs only)."""
        if self.r != 2:
            raise InputError("adjacency bitmasks need r=2")
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(sorted(e)) in self.edges

    def complement(self) -> Hypergraph:
        return Hypergraph(self.r, self.n,
                          frozenset(combinations(range(self.n), self.r)) - self.edges)


# ---------------------------------------------------------------- counting

def induced_edge_count(H: Hypergraph, S, backend: str = "tuples") -> int:
    """Number of edges of H lying inside S."""
    mask = as_mask(S, H.n)
    if mask.bit_count() < H.r:
        return 0
    if backend == "tuples":
        return sum(1 for em in H.edge_masks if em & mask == em)
    if backend == "bitset":
        if H.r == 1:
            return sum(1 for (e,) in H.edges if mask >> e & 1)
        total = sum((b & mask).bit_count()
                    for km, b in H._completion_items if km & mask == km)
        return total // H.r
    raise InputError(f"unknown backend {backend!r}")


def degree_in(H: Hypergraph, v: int, S) -> int:
    """Degree of v in H[S]."""
    mask = as_mask(S, H.n)
    if not (0 <= v < H.n) or not mask >> v & 1:
        raise InputError(f"vertex {v} is not in S")
    if H.r == 2:
        return (H.adjacency[v] & mask).bit_count()
    return sum(1 for m in H.incident_masks[v] if m & mask == m)


def degrees_in(H: Hypergraph, S) -> dict[int, int]:
    mask = as_mask(S, H.n)
    return {v: degree_in(H, v, mask) for v in mask_vertices(mask)}


def min_degree(H: Hypergraph, S) -> int:
    mask = as_mask(S, H.n)
    if not mask:
        raise InputError("min_degree of the empty set")
    return min(degrees_in(H, mask).values())


def avg_degree(H: Hypergraph, S) -> Fraction:
    mask = as_mask(S, H.n)
    size = mask.bit_count()
    if not size:
        raise InputError("avg_degree of the empty set")
    return Fraction(H.r * induced_edge_count(H, mask), size)


def _check_disjoint(masks: Sequence[int]) -> None:
    seen = 0
    for m in masks:
        if seen & m:
            raise InputError("vertex sets are not pairwise disjoint")
        seen |= m


def cross_edge_count(H: Hypergraph, parts: Sequence) -> int:
    """e(S_1,...,S_r): edges meeting every part in exactly one vertex."""
    masks = [as_mask(P, H.n) for P in parts]
    if len(masks) != H.r:
        raise InputError(f"need exactly r={H.r} parts, got {len(masks)}")
    _check_disjoint(masks)
    if any(m == 0 for m in masks):
        return 0
    count = 0
    for em in H.edge_masks:
        if all((em & m).bit_count() == 1 for m in masks):
            count += 1
    return count


def composition_edge_count(H: Hypergraph, parts: Sequence, alpha: Sequence[int]) -> int:
    """Edges with exactly alpha[j] vertices in parts[j] (sum(alpha) == r)."""
    masks = [as_mask(P, H.n) for P in parts]
    if len(masks) != len(alpha) or sum(alpha) != H.r:
        raise InputError("alpha must have one entry per part and sum to r")
    _check_disjoint(masks)
    return sum(1 for em in H.edge_masks
               if all((em & m).bit_count() == a for m, a in zip(masks, alpha)))


# ---------------------------------------------------------------- subset tables

def induced_count_table(H: Hypergraph, vertices: Sequence[int] | None = None) -> np.ndarray:
    """e(S) for every subset S of ``vertices``, indexed by local bitmask.

    Bit i of the local mask stands for ``vertices[i]``; vertices must be
    increasing so that local mask order agrees with global mask order.
    Built by doubling: e(S + {v}) = e(S) + e_link(v)(S) where the link only
    uses vertices below v.
    """
    if vertices is None:
        vertices = range(H.n)
    vertices = list(vertices)
    m = len(vertices)
    if m > TABLE_MAX_N:
        raise BudgetExceeded(1 << m, 1 << TABLE_MAX_N)
    local = {v: i for i, v in enumerate(vertices)}
    edges = [tuple(local[v] for v in e) for e in H.edges if all(v in local for v in e)]
    return _table(edges, H.r, m)


def _table(edges: list[tuple[int, ...]], r: int, m: int) -> np.ndarray:
    if r == 1:
        w = 0
        for (v,) in edges:
            w |= 1 << v
        masks = np.arange(1 << m, dtype=np.uint32)
        return np.bitwise_count(masks & np.uint32(w)).astype(np.int32)
    by_top: dict[int, list[tuple[int, ...]]] = {}
    for e in edges:
        by_top.setdefault(e[-1], []).append(e[:-1])
    table = np.zeros(1, dtype=np.int32)
    for v in range(m):
        link = by_top.get(v)
        upper = table + _table(link, r - 1, v) if link else table
        table = np.concatenate([table, upper])
    return table


# ---------------------------------------------------------------- colourings

@dataclass(frozen=True)
class ColourShares:
    """Colour shares rho_1..rho_q as exact rationals.

    ``sum_mode`` is "threshold" (shares sum to exactly 1, each in (0,1)) or
    "linear" (shares sum to less than 1, each in [0,1]).
    """

    rho: tuple
    sum_mode: str = "threshold"

    def __post_init__(self):
        rho = tuple(Fraction(x) for x in self.rho)
        object.__setattr__(self, "rho", rho)
        total = sum(rho, Fraction(0))
        if self.sum_mode == "threshold":
            if any(not (0 < x < 1) for x in rho) and len(rho) > 1:
                raise InputError("threshold-regime shares must lie in (0,1)")
            if total != 1:
                raise InputError(f"shares sum to {total}, expected exactly 1")
        elif self.sum_mode == "linear":
            if any(not (0 <= x <= 1) for x in rho):
                raise InputError("linear-regime shares must lie in [0,1]")
            if total >= 1:
                raise InputError(f"linear-regime shares sum to {total}, expected < 1")
        else:
            raise InputError(f"unknown sum_mode {self.sum_mode!r}")

    @classmethod
    def parse(cls, text: str, sum_mode: str | None = None) -> ColourShares:
        rho = tuple(Fraction(x.strip()) for x in text.split(","))
        if sum_mode is None:
            sum_mode = "threshold" if sum(rho) == 1 else "linear"
        return cls(rho, sum_mode)

    @property
    def q(self) -> int:
        return len(self.rho)

    @property
    def margin(self) -> Fraction:
        return 1 - sum(self.rho, Fraction(0))

    def __getitem__(self, j: int) -> Fraction:
        """Share of colour j (1-based)."""
        return self.rho[j - 1]

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.rho)


def shares_tuple(rho) -> tuple[Fraction, ...]:
    if isinstance(rho, ColourShares):
        return rho.rho
    return tuple(Fraction(x) for x in rho)


@dataclass(frozen=True)
class EdgeColouring:
    """Total colouring of the r-subsets of {0..n-1} with colours 1..q."""

    r: int
    n: int
    q: int
    colours: tuple  # colour of each r-subset, canonical combinations() order

    def __post_init__(self):
        if self.q < 1:
            raise InputError("need at least one colour")
        expected = comb(self.n, self.r)
        cols = tuple(int(c) for c in self.colours)
        if len(cols) != expected:
            raise InputError(f"colouring lists {len(cols)} edges, expected {expected}")
        bad = [c for c in cols if not 1 <= c <= self.q]
        if bad:
            raise InputError(f"colour {bad[0]} outside 1..{self.q}")
        object.__setattr__(self, "colours", cols)

    @classmethod
    def from_map(cls, r: int, n: int, q: int, colour_of: dict, default: int | None = None):
        cols = []
        for e in combinations(range(n), r):
            c = colour_of.get(e, default)
            if c is None:
                raise InputError(f"edge {e} has no colour")
            cols.append(c)
        return cls(r, n, q, tuple(cols))

    @classmethod
    def from_classes(cls, classes: Sequence[Hypergraph]) -> EdgeColouring:
        r, n = classes[0].r, classes[0].n
        colour_of = {}
        for j, H in enumerate(classes, start=1):
            for e in H.edges:
                if e in colour_of:
                    raise InputError(f"edge {e} appears in two colour classes")
                colour_of[e] = j
        return cls.from_map(r, n, len(classes), colour_of)

    @classmethod
    def from_graph(cls, G: Hypergraph) -> EdgeColouring:
        """Two-colouring with G as colour 1 and its complement as colour 2."""
        return cls(G.r, G.n, 2, tuple(1 if e in G.edges else 2
                                      for e in combinations(range(G.n), G.r)))

    def colour_of(self, e: Iterable[int]) -> int:
        t = tuple(sorted(e))
        return self._index[t]

    @cached_property
    def _index(self) -> dict[tuple[int, ...], int]:
        return dict(zip(combinations(range(self.n), self.r), self.colours))

    @cached_property
    def classes(self) -> tuple[Hypergraph, ...]:
        buckets: list[list[tuple[int, ...]]] = [[] for _ in range(self.q)]
        for e, c in zip(combinations(range(self.n), self.r), self.colours):
            buckets[c - 1].append(e)
        return tuple(Hypergraph(self.r, self.n, frozenset(b)) for b in buckets)

    def colour_class(self, j: int) -> Hypergraph:
        if not 1 <= j <= self.q:
            raise InputError(f"colour {j} outside 1..{self.q}")
        return self.classes[j - 1]

    def densities(self) -> list[Fraction]:
        total = comb(self.n, self.r)
        return [Fraction(len(H), total) if total else Fraction(0) for H in self.classes]
