"""Independent brute-force reference implementations.

Nothing here imports the package: vertex sets are plain Python sets, edges
are tuples, and every count is a nested loop over itertools.combinations.
"""

from fractions import Fraction
from itertools import combinations, product
from math import comb, prod


def induced(edges, S, r):
    S = set(S)
    return sum(1 for e in edges if set(e) <= S)


def degree(edges, v, S):
    S = set(S)
    return sum(1 for e in edges if v in e and set(e) <= S)


def cross(edges, parts):
    es = set(edges)
    count = 0
    for choice in product(*[sorted(P) for P in parts]):
        if tuple(sorted(choice)) in es:
            count += 1
    return count


def disc(edges, r, p, S):
    return induced(edges, S, r) - Fraction(p) * comb(len(S), r)


def partite_disc(edges, p, parts):
    return cross(edges, parts) - Fraction(p) * prod(len(P) for P in parts)


def max_disc(edges, n, r, p, t):
    """max |D_p(S)| over |S| <= t, empty set included; ties: smaller size, then smaller bitmask."""
    best = None
    for size in range(t + 1):
        cands = []
        for S in combinations(range(n), size):
            mask = sum(1 << v for v in S)
            cands.append((mask, S))
        for mask, S in sorted(cands):
            val = abs(disc(edges, r, p, S))
            if best is None or val > best[0]:
                best = (val, size, mask)
    return best


def signed_count(x, theta):
    m = len(x)
    total = 0
    for bits in range(1 << m):
        s = sum(x[i] for i in range(m) if bits >> i & 1)
        if abs(s) >= theta:
            total += 1
    return total


def min_deg(edges, S):
    return min(degree(edges, v, S) for v in S)


def binomial_tail(N, rho, need):
    rho = Fraction(rho)
    return sum(comb(N, e) * rho ** e * (1 - rho) ** (N - e) for e in range(N + 1) if e >= need)
