"""
Boolean expressions for combinational cell functions.

Grammar (lowest to highest precedence)::

    expr   := or ('?' expr ':' expr)?
    or     := xor ('|' xor)*
    xor    := and ('^' and)*
    and    := unary ('&' unary)*
    unary  := ('~' | '!') unary | atom
    atom   := IDENT | '0' | '1' | '(' expr ')'

Expressions are evaluated on single bits or compiled to Python source that
operates on bit-parallel integers (one lane per bit, see sim.engine).
"""
import re
from dataclasses import dataclass
from itertools import product

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<const>[01])|(?P<op>[~!&|^?:()]))")


class ExpressionError(ValueError):
    """Raised for malformed cell function expressions."""

    def __init__(self, message, column):
        self.column = column
        super().__init__(f"column {column}: {message}")


@dataclass(frozen=True)
class Expr:
    op: str  # "var", "const", "not", "and", "or", "xor", "mux"
    args: tuple = ()
    name: str = ""
    value: int = 0

    def inputs(self):
        if self.op == "var":
            return {self.name}
        found = set()
        for arg in self.args:
            found |= arg.inputs()
        return found

    def evaluate(self, env):
        """Evaluate on single-bit values; ``env`` maps input names to 0/1."""
        op = self.op
        if op == "var":
            return env[self.name] & 1
        if op == "const":
            return self.value
        vals = [a.evaluate(env) for a in self.args]
        if op == "not":
            return 1 - vals[0]
        if op == "and":
            return int(all(vals))
        if op == "or":
            return int(any(vals))
        if op == "xor":
            out = 0
            for v in vals:
                out ^= v
            return out
        # mux: cond ? then : else
        return vals[1] if vals[0] else vals[2]

    def to_python(self, names, mask="M"):
        """Python source computing the expression on bit-parallel ints.

        Args:
            names: mapping from input name to a Python expression string
            mask: name of the variable holding the all-lanes mask
        """
        op = self.op
        if op == "var":
            return names[self.name]
        if op == "const":
            return mask if self.value else "0"
        parts = [a.to_python(names, mask) for a in self.args]
        if op == "not":
            return f"({mask} ^ {parts[0]})"
        if op == "and":
            return "(" + " & ".join(parts) + ")"
        if op == "or":
            return "(" + " | ".join(parts) + ")"
        if op == "xor":
            return "(" + " ^ ".join(parts) + ")"
        c, t, e = parts
        return f"(({c} & {t}) | (({mask} ^ {c}) & {e}))"

    def __str__(self):
        op = self.op
        if op == "var":
            return self.name
        if op == "const":
            return str(self.value)
        if op == "not":
            return f"~{self.args[0]}"
        if op == "mux":
            return f"({self.args[0]} ? {self.args[1]} : {self.args[2]})"
        sym = {"and": " & ", "or": " | ", "xor": " ^ "}[op]
        return "(" + sym.join(str(a) for a in self.args) + ")"


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ExpressionError(f"unexpected character {text[pos]!r}", pos + 1)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text) + 1)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ExpressionError(f"expected {value or 'operand'}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        expr = self.expr()
        tok = self.peek()
        if tok[0] is not None:
            raise ExpressionError(f"unexpected {tok[1]!r}", tok[2])
        return expr

    def expr(self):
        cond = self.binary("|", "or", self.xor)
        if self.peek()[1] == "?":
            self.take("?")
            then = self.expr()
            self.take(":")
            other = self.expr()
            return Expr("mux", (cond, then, other))
        return cond

    def xor(self):
        return self.binary("^", "xor", self.conj)

    def conj(self):
        return self.binary("&", "and", self.unary)

    def binary(self, symbol, op, operand):
        args = [operand()]
        while self.peek()[1] == symbol:
            self.take(symbol)
            args.append(operand())
        return args[0] if len(args) == 1 else Expr(op, tuple(args))

    def unary(self):
        if self.peek()[1] in ("~", "!"):
            self.take()
            return Expr("not", (self.unary(),))
        return self.atom()

    def atom(self):
        kind, value, col = self.peek()
        if kind == "ident":
            self.take()
            return Expr("var", name=value)
        if kind == "const":
            self.take()
            return Expr("const", value=int(value))
        if value == "(":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        raise ExpressionError("expected operand", col)


def parse_expression(text):
    return _Parser(text).parse()


def satisfying_assignments(expr, pins, value):
    """All input assignments (tuples ordered like ``pins``) giving ``value``.

    Returned in lexicographic order, so the first entry is the smallest.
    """
    found = []
    for bits in product((0, 1), repeat=len(pins)):
        if expr.evaluate(dict(zip(pins, bits))) == value:
            found.append(bits)
    return found
