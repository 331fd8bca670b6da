"""Bounded-set hypergraph discrepancy and multi-colour quasi-Ramsey witnesses."""

from .hypercore import (
    BudgetExceeded,
    ColourShares,
    EdgeColouring,
    Hypergraph,
    InputError,
    avg_degree,
    cross_edge_count,
    degree_in,
    induced_edge_count,
    min_degree,
)
from .discrepancy import (
    DiscrepancyWitness,
    PartiteWitness,
    combine_partite_to_single,
    constructive_disc_search,
    link_hypergraph,
    max_bounded_discrepancy_exact,
    max_bounded_discrepancy_heuristic,
    p_discrepancy,
    partite_discrepancy,
    signed_sum_count,
)
from .quasiramsey import (
    QuasiRamseyWitness,
    extract_witness,
    extraction_decay_report,
    full_subgraph_search,
    linear_regime_search,
    repair_min_degree,
    skew_discrepancy,
    verify_witness,
)
from .randgen import Seed, make_lower_bound_instance, random_colouring, random_hypergraph

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "ColourShares",
    "EdgeColouring",
    "Hypergraph",
    "InputError",
    "avg_degree",
    "cross_edge_count",
    "degree_in",
    "induced_edge_count",
    "min_degree",
    "DiscrepancyWitness",
    "PartiteWitness",
    "combine_partite_to_single",
    "constructive_disc_search",
    "link_hypergraph",
    "max_bounded_discrepancy_exact",
    "max_bounded_discrepancy_heuristic",
    "p_discrepancy",
    "partite_discrepancy",
    "signed_sum_count",
    "QuasiRamseyWitness",
    "extract_witness",
    "extraction_decay_report",
    "full_subgraph_search",
    "linear_regime_search",
    "repair_min_degree",
    "skew_discrepancy",
    "verify_witness",
    "Seed",
    "make_lower_bound_instance",
    "random_colouring",
    "random_hypergraph",
]
