"""
py_twophase: convert single-clock flip-flop netlists into two-phase latch
netlists, then check and time the result.

    models     netlist-core (library, netlist, builder, canonical JSON)
    verilog    structural Verilog reader and writer
    transform  clock setup, flip-flop duplication, control lowering, latch mapping
    retime     retiming graph, min-delay / min-area lags, phase assignment
    sim        flip-flop and two-phase simulators
    verify     two-coloring and equivalence checks
    timing     latch STA with time borrowing
"""

from .config import config
from .errors import TwoPhaseError
from .pipeline import FlowResult, PipelineConfig, full_transform, run_convert

__version__ = "0.1.0"

__all__ = [
    'config',
    'TwoPhaseError',
    'FlowResult',
    'PipelineConfig',
    'full_transform',
    'run_convert',
]
