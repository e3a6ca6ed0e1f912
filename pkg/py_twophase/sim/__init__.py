"""
Cycle simulation of flip-flop and two-phase latch netlists.
"""

from .dump import trace_to_vcd, write_trace_csv, write_trace_vcd
from .engine import CompiledNetlist, eval_comb
from .ff import FlipFlopSimulator, simulate_ff
from .stimulus import PhaseSchedule, Stimulus, SubStep, Trace
from .two_phase import TwoPhaseSimulator, simulate_two_phase

__all__ = [
    'trace_to_vcd',
    'write_trace_csv',
    'write_trace_vcd',
    'CompiledNetlist',
    'eval_comb',
    'FlipFlopSimulator',
    'simulate_ff',
    'PhaseSchedule',
    'Stimulus',
    'SubStep',
    'Trace',
    'TwoPhaseSimulator',
    'simulate_two_phase',
]
