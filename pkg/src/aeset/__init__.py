"""Absolutely entangled sets of pure states: constructions, checks and a falsifier."""

from .constructions import (
    PartitionedSet,
    example1_set,
    prop1_witness_unitary,
    prop2_embed_unitary,
    theorem1_premise,
    theorem1_set,
    theorem2_set,
)
from .entanglement import Bipartition, StateSet, numeric_rank, prop1_check, product_defect, schmidt
from .polynomials import SparsePoly, excluded_values, poly_f_general, poly_f_pair, real_roots
from .search import SearchConfig, minimize_over_unitaries, objective

__version__ = "0.1.0"
