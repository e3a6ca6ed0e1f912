"""
Structural Verilog frontend: tokenizer, parser and writer.
"""

from .lexer import SourceSpan, tokenize
from .parser import parse_verilog, parse_verilog_file
from .writer import emit_verilog

__all__ = [
    'SourceSpan',
    'tokenize',
    'parse_verilog',
    'parse_verilog_file',
    'emit_verilog',
]
