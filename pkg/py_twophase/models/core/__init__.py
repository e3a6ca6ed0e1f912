"""
Core netlist components.

- logic: boolean expressions for combinational cell functions
- library: cell kinds and the library loader
- netlist: immutable netlist, validation and combinational ordering
- mixins: serialization helper and name allocation
"""

from .library import CellKind, CellLibrary, load_library
from .logic import Expr, parse_expression
from .mixins import NameAllocator, SerializableMixin
from .netlist import Instance, Netlist, Port, validate

__all__ = [
    'CellKind',
    'CellLibrary',
    'load_library',
    'Expr',
    'parse_expression',
    'NameAllocator',
    'SerializableMixin',
    'Instance',
    'Netlist',
    'Port',
    'validate',
]
