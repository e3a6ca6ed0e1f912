"""
Static two-coloring checks and co-simulation equivalence.
"""

from .equivalence import Divergence, EquivVerdict, check_equivalence, simulate, swap_mux_inputs
from .latch_graph import (
    MIXED_CONE,
    SAME_COLOR,
    UNCOLORABLE,
    LatchGraph,
    Violation,
    build_latch_graph,
    check_two_color,
    clock_domain_of,
    comb_cone,
    first_reachable,
    mutate_phase,
)

__all__ = [
    # two-coloring
    'MIXED_CONE',
    'SAME_COLOR',
    'UNCOLORABLE',
    'LatchGraph',
    'Violation',
    'build_latch_graph',
    'check_two_color',
    'clock_domain_of',
    'comb_cone',
    'first_reachable',
    'mutate_phase',
    # equivalence
    'Divergence',
    'EquivVerdict',
    'check_equivalence',
    'simulate',
    'swap_mux_inputs',
]
