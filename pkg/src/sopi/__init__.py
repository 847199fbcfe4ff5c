"""Stream object permutation identifiers (SOPIs) for multi-source erasure-coded downloads."""

from .core import PrefixSpec, Sopi, make_rng, prefix, prefix_array, random_sopi, symbol_id_at
from .design import DesignParams, SopiSet, audit_sopi_set, build_a_set, build_b_set, build_sopi_set, capacity_bounds
from .distribution import (
    Assignment,
    InsufficientPaletteError,
    NodeGraph,
    greedy_color,
    select_streams,
    validate_assignment,
)
from .large_object import (
    BlockStructure,
    BlockSymbolRef,
    LargeSopi,
    block_structure,
    large_symbol_at,
    partition,
    random_large_sopi,
)
from .modarith import MERSENNE31, RAPTORQ, FieldParams, mersenne_reduce, mod_inv, mod_mul_add
from .overlap import (
    DiffSet,
    DistanceResult,
    count_distinct,
    distance,
    distance_bruteforce,
    expected_distinct_lower_bound,
    matches,
    multi_overlap_lower_bound,
    pair_overlap_lower_bound,
    theorem_failure_bound,
)

__version__ = "0.1.0"
