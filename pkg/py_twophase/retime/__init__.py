"""
Retiming of base flip-flop netlists.

    graph: RetimeGraph, build_retime_graph
    algorithms: LagAssignment, min_delay_retime, min_area_retime
    apply: apply_retiming
    phases: assign_phases
"""
from .algorithms import LagAssignment, candidate_periods, min_area_retime, min_delay_retime
from .apply import apply_retiming
from .graph import HOST, RetimeEdge, RetimeGraph, build_retime_graph
from .phases import assign_phases, register_parity_graph

__all__ = [
    # graph
    'HOST',
    'RetimeEdge',
    'RetimeGraph',
    'build_retime_graph',
    # lags
    'LagAssignment',
    'candidate_periods',
    'min_delay_retime',
    'min_area_retime',
    # netlist rewrite
    'apply_retiming',
    'assign_phases',
    'register_parity_graph',
]
