"""
Netlist models for py_twophase.

This package contains the netlist-core data model:
- Cell library (kinds, pin roles, behaviors, timing data)
- Flattened netlist, instances, ports and validation diagnostics
- Builder used by every rewriting pass
- Canonical JSON interchange format
"""

from .builder import NetlistBuilder
from .canonical import emit_canonical, netlist_to_dict, parse_canonical
from .core.library import (
    BASE_DFF,
    LATCH,
    SUPPORTED_DFF,
    CellKind,
    CellLibrary,
    Control,
    PinRole,
    TimingData,
    load_library,
    load_library_file,
)
from .core.netlist import CONST_ONE, CONST_ZERO, Diagnostic, Instance, Netlist, Port, topo_order_comb, validate

__all__ = [
    # Library
    'BASE_DFF',
    'LATCH',
    'SUPPORTED_DFF',
    'CellKind',
    'CellLibrary',
    'Control',
    'PinRole',
    'TimingData',
    'load_library',
    'load_library_file',

    # Netlist
    'CONST_ONE',
    'CONST_ZERO',
    'Diagnostic',
    'Instance',
    'Netlist',
    'Port',
    'topo_order_comb',
    'validate',

    # Construction and interchange
    'NetlistBuilder',
    'emit_canonical',
    'netlist_to_dict',
    'parse_canonical',
]
