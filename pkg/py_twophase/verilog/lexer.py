"""
Tokenizer for the structural Verilog subset.

Comments are skipped. Escaped identifiers (``\\name `` terminated by white
space) are returned without the leading backslash.
"""
import re
from dataclasses import dataclass

from ..errors import VerilogSyntaxError

KEYWORDS = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg", "assign",
    "always", "initial", "parameter", "localparam", "defparam", "generate",
    "endgenerate", "function", "task", "supply0", "supply1", "tri", "integer",
    "genvar", "specify",
}


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "escaped", "keyword", "number", "sized", "string", "punct", "eof"
    text: str
    span: SourceSpan

    @property
    def is_name(self):
        return self.kind in ("id", "escaped")


_SPEC = [
    ("ws", r"[ \t\r\f]+"),
    ("newline", r"\n"),
    ("line_comment", r"//[^\n]*"),
    ("block_comment", r"/\*.*?\*/"),
    ("attr_open", r"\(\*"),
    ("attr_close", r"\*\)"),
    ("escaped", r"\\\S+"),
    ("string", r'"(?:[^"\\\n]|\\.)*"'),
    ("sized", r"\d*'[sS]?[bBoOdDhH][0-9a-fA-FxXzZ_?]+"),
    ("number", r"\d+"),
    ("id", r"[A-Za-z_][A-Za-z0-9_$]*"),
    ("punct", r"[()\[\],;.:=#@{}~!&|^+\-*/<>?]"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _SPEC), re.DOTALL)


def tokenize(text, filename="<input>"):
    """Split ``text`` into tokens, each with the SourceSpan of its first character.

    Raises:
        VerilogSyntaxError: on characters outside the subset or an
            unterminated block comment
    """
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        span = SourceSpan(filename, line, pos - line_start + 1)
        if text.startswith("/*", pos) and text.find("*/", pos + 2) < 0:
            raise VerilogSyntaxError("unterminated comment", span)
        m = _MASTER.match(text, pos)
        if not m:
            raise VerilogSyntaxError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        value = m.group()
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind == "block_comment":
            breaks = value.count("\n")
            if breaks:
                line += breaks
                line_start = pos + value.rindex("\n") + 1
        elif kind not in ("ws", "line_comment"):
            if kind == "id" and value in KEYWORDS:
                kind = "keyword"
            elif kind == "escaped":
                value = value[1:]
            elif kind in ("attr_open", "attr_close"):
                kind = "punct"
            tokens.append(Token(kind, value, span))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(filename, line, pos - line_start + 1)))
    return tokens
