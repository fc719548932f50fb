"""Semiring matrix products with simulated quantum search and a cost ledger."""
from .core import BoolMatrix, ExtMatrix, INF, bool_multiply, entrywise_or, stack_blocks, transpose
from .qsim import CostLedger, SearchSpace, ledger_report, q_enumerate, q_extremum
from .exponents import OmegaParams, omega_bound, paper_exponent_table, select_parameters, solve_exponent
from .dominance import (LexOrder, PairMatrix, dominance_brute, dominance_product,
                        generalized_dominance, generalized_dominance_brute)

__version__ = "0.1.0"

__all__ = [
    "BoolMatrix", "ExtMatrix", "INF", "bool_multiply", "entrywise_or", "stack_blocks", "transpose",
    "CostLedger", "SearchSpace", "ledger_report", "q_enumerate", "q_extremum",
    "OmegaParams", "omega_bound", "paper_exponent_table", "select_parameters", "solve_exponent",
    "LexOrder", "PairMatrix", "dominance_brute", "dominance_product",
    "generalized_dominance", "generalized_dominance_brute",
]
