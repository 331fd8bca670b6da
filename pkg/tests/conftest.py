import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qramsey import EdgeColouring, Hypergraph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rand_hypergraph(rng: random.Random, n: int, r: int, density: float = 0.5) -> Hypergraph:
    edges = [e for e in combinations(range(n), r) if rng.random() < density]
    return Hypergraph.from_edges(r, n, edges)


def rand_colouring(rng: random.Random, n: int, r: int, q: int) -> EdgeColouring:
    return EdgeColouring.from_map(r, n, q, {e: rng.randint(1, q) for e in combinations(range(n), r)})


@st.composite
def hypergraphs(draw, r=None, max_n=9):
    r = draw(st.integers(2, 4)) if r is None else r
    n = draw(st.integers(r, max(max_n, r)))
    bits = draw(st.lists(st.booleans(), min_size=len(list(combinations(range(n), r))),
                         max_size=len(list(combinations(range(n), r)))))
    edges = [e for e, b in zip(combinations(range(n), r), bits) if b]
    return Hypergraph.from_edges(r, n, edges)


@st.composite
def colourings(draw, r=2, max_n=9, max_q=3):
    q = draw(st.integers(1, max_q))
    n = draw(st.integers(r, max_n))
    all_e = list(combinations(range(n), r))
    cs = draw(st.lists(st.integers(1, q), min_size=len(all_e), max_size=len(all_e)))
    return EdgeColouring.from_map(r, n, q, dict(zip(all_e, cs)))


rationals = st.fractions(min_value=0, max_value=1, max_denominator=12)


@pytest.fixture
def cycle5():
    return Hypergraph.from_edges(2, 5, [(i, (i + 1) % 5) for i in range(5)])


@pytest.fixture
def half():
    return Fraction(1, 2)
