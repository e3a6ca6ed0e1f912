"""
Conversion passes from single-clock flip-flop netlists to two-phase latch
netlists.
"""

from .clock_gated import transform_clock_gated
from .clocks import clock_side_pin, connect_clk, init_clock_ports, is_clock_gate
from .latch_map import map_dff_to_latch
from .recirc import duplicate_ffs_recirc, transform_recirc
from .trace import PhaseTag, Role, TraceEntry, TransformPlan, TransformTrace, Variant

__all__ = [
    'transform_clock_gated',
    'clock_side_pin',
    'connect_clk',
    'init_clock_ports',
    'is_clock_gate',
    'map_dff_to_latch',
    'duplicate_ffs_recirc',
    'transform_recirc',
    'PhaseTag',
    'Role',
    'TraceEntry',
    'TransformPlan',
    'TransformTrace',
    'Variant',
]
