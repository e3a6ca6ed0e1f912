"""
Recursive-descent parser for post-synthesis structural Verilog.

Accepted subset:
    - one ``module ... endmodule`` with an ANSI or non-ANSI port list
    - ``input`` / ``output`` / ``wire`` declarations, scalar or ``[m:n]``
      vectors (bit-blasted to ``name[i]`` nets)
    - cell instantiations with named port connections
    - ``assign a = b;`` aliasing and ``1'b0`` / ``1'b1`` literals
    - ``(* init = 1'b1 *)`` before an instance and ``(* clock *)`` before a
      port declaration; other attributes are ignored
"""
import logging

from ..errors import UnsupportedConstructError, VerilogSyntaxError
from ..models.builder import NetlistBuilder
from ..models.core.netlist import validate
from .lexer import tokenize

logger = logging.getLogger(__name__)

_CONST_LITERALS = {"1'b0": 0, "1'b1": 1, "1'h0": 0, "1'h1": 1, "1'd0": 0, "1'd1": 1}

_UNSUPPORTED_KEYWORDS = {
    "always": "behavioral block",
    "initial": "behavioral block",
    "parameter": "parameter",
    "localparam": "parameter",
    "defparam": "parameter",
    "reg": "reg declaration",
    "inout": "inout port",
    "generate": "generate block",
    "function": "function or task",
    "task": "function or task",
    "supply0": "supply net",
    "supply1": "supply net",
    "tri": "tri-state net",
    "integer": "integer declaration",
    "genvar": "generate block",
    "specify": "specify block",
}


class _Const:
    def __init__(self, value):
        self.value = value


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


class _Module:
    def __init__(self, name, span):
        self.name = name
        self.span = span
        self.header = []
        self.decls = {}  # name -> (dir, range, clock_attr, span)
        self.wires = {}  # name -> range
        self.instances = []  # (name, kind, {pin: ref}, init, span)
        self.assigns = []  # (lhs, rhs, span)


class _Parser:
    def __init__(self, text, library, filename):
        self.tokens = tokenize(text, filename)
        self.library = library
        self.i = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, text):
        tok = self.peek()
        return tok.kind in ("punct", "keyword") and tok.text == text

    def expect(self, text):
        tok = self.peek()
        if not self.at(text):
            raise VerilogSyntaxError(f"expected '{text}', found '{tok.text or 'end of file'}'", tok.span)
        return self.next()

    def name(self, what="identifier"):
        tok = self.peek()
        if not tok.is_name:
            if tok.kind == "keyword" and tok.text in _UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstructError(_UNSUPPORTED_KEYWORDS[tok.text], tok.span)
            raise VerilogSyntaxError(f"expected {what}, found '{tok.text or 'end of file'}'", tok.span)
        return self.next()

    def number(self):
        tok = self.peek()
        if tok.kind != "number":
            raise VerilogSyntaxError(f"expected number, found '{tok.text}'", tok.span)
        self.next()
        return int(tok.text)

    # -- grammar ------------------------------------------------------------

    def parse(self):
        self.attributes()
        tok = self.peek()
        if not self.at("module"):
            raise VerilogSyntaxError("expected 'module'", tok.span)
        self.next()
        module = _Module(self.name("module name").text, tok.span)
        if self.at("#"):
            raise UnsupportedConstructError("parameter", self.peek().span)
        if self.at("("):
            self.next()
            self.port_list(module)
            self.expect(")")
        self.expect(";")

        while not self.at("endmodule"):
            if self.peek().kind == "eof":
                raise VerilogSyntaxError("expected 'endmodule'", self.peek().span)
            self.item(module)
        self.next()

        tail = self.peek()
        if tail.kind != "eof":
            if tail.text == "module" or tail.text == "(*":
                raise UnsupportedConstructError("multiple modules (hierarchy)", tail.span)
            raise VerilogSyntaxError(f"unexpected '{tail.text}' after endmodule", tail.span)
        return module

    def attributes(self):
        found = {}
        while self.at("(*"):
            self.next()
            while True:
                key = self.name("attribute name").text
                value = None
                if self.at("="):
                    self.next()
                    value = self.next()
                found[key] = value
                if self.at(","):
                    self.next()
                    continue
                break
            self.expect("*)")
        return found

    def range(self):
        if not self.at("["):
            return None
        self.next()
        msb = self.number()
        self.expect(":")
        lsb = self.number()
        self.expect("]")
        return (msb, lsb)

    def port_list(self, module):
        if self.at(")"):
            return
        ansi_dir = None
        ansi_range = None
        ansi_clock = False
        while True:
            attrs = self.attributes()
            if self.at("input") or self.at("output"):
                ansi_dir = "in" if self.next().text == "input" else "out"
                if self.at("wire"):
                    self.next()
                ansi_range = self.range()
                ansi_clock = "clock" in attrs
            elif self.peek().kind == "keyword" and self.peek().text in _UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstructError(_UNSUPPORTED_KEYWORDS[self.peek().text], self.peek().span)
            tok = self.name("port name")
            module.header.append(tok.text)
            if ansi_dir is not None:
                self.declare(module, tok, ansi_dir, ansi_range, ansi_clock)
            if not self.at(","):
                return
            self.next()

    def declare(self, module, tok, direction, rng, clock):
        if tok.text in module.decls:
            raise VerilogSyntaxError(f"port {tok.text} declared twice", tok.span)
        module.decls[tok.text] = (direction, rng, clock, tok.span)

    def item(self, module):
        attrs = self.attributes()
        tok = self.peek()
        if tok.kind == "keyword":
            if tok.text in ("input", "output"):
                self.next()
                direction = "in" if tok.text == "input" else "out"
                if self.at("wire"):
                    self.next()
                rng = self.range()
                while True:
                    self.declare(module, self.name("port name"), direction, rng, "clock" in attrs)
                    if not self.at(","):
                        break
                    self.next()
                self.expect(";")
                return
            if tok.text == "wire":
                self.next()
                rng = self.range()
                while True:
                    module.wires[self.name("net name").text] = rng
                    if not self.at(","):
                        break
                    self.next()
                self.expect(";")
                return
            if tok.text == "assign":
                self.next()
                self.assign(module)
                return
            if tok.text in _UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstructError(_UNSUPPORTED_KEYWORDS[tok.text], tok.span)
            raise VerilogSyntaxError(f"unexpected '{tok.text}'", tok.span)
        if tok.is_name:
            self.instantiation(module, attrs)
            return
        raise VerilogSyntaxError(f"unexpected '{tok.text or 'end of file'}'", tok.span)

    def ref(self, allow_const=True):
        """A net reference: ``name``, ``name[i]`` or a one-bit literal."""
        tok = self.peek()
        if tok.kind == "sized":
            self.next()
            value = _CONST_LITERALS.get(tok.text.lower())
            if value is None or not allow_const:
                raise UnsupportedConstructError(f"literal {tok.text}", tok.span)
            return _Const(value), tok.span
        if tok.text == "{" and tok.kind == "punct":
            raise UnsupportedConstructError("concatenation", tok.span)
        name = self.name("net name")
        text = name.text
        if self.at("["):
            self.next()
            index = self.number()
            if self.at(":"):
                raise UnsupportedConstructError("part select", self.peek().span)
            self.expect("]")
            text = f"{text}[{index}]"
        return text, name.span

    def assign(self, module):
        lhs, span = self.ref(allow_const=False)
        self.expect("=")
        rhs, _ = self.ref()
        if not self.at(";"):
            raise UnsupportedConstructError("assign with operators", self.peek().span)
        self.next()
        module.assigns.append((lhs, rhs, span))

    def instantiation(self, module, attrs):
        kind_tok = self.next()
        if self.at("#"):
            raise UnsupportedConstructError("parameter override", self.peek().span)
        if kind_tok.text not in self.library:
            raise VerilogSyntaxError(f"unknown cell kind {kind_tok.text}", kind_tok.span)
        kind = self.library[kind_tok.text]
        init = 0
        if attrs.get("init") is not None:
            init = _CONST_LITERALS.get(attrs["init"].text.lower(), None)
            if init is None:
                init = int(attrs["init"].text) if attrs["init"].kind == "number" else None
            if init not in (0, 1):
                raise VerilogSyntaxError("init attribute must be 0 or 1", attrs["init"].span)
        while True:
            inst_tok = self.name("instance name")
            self.expect("(")
            pins = {}
            while not self.at(")"):
                if not self.at("."):
                    raise UnsupportedConstructError("positional port connection", self.peek().span)
                self.next()
                pin_tok = self.name("pin name")
                if pin_tok.text in pins:
                    raise VerilogSyntaxError(f"pin {pin_tok.text} connected twice", pin_tok.span)
                if pin_tok.text not in {p.name for p in kind.pins}:
                    raise VerilogSyntaxError(f"cell {kind.name} has no pin {pin_tok.text}", pin_tok.span)
                self.expect("(")
                if self.at(")"):
                    if kind.pin(pin_tok.text).dir == "in":
                        raise VerilogSyntaxError(f"dangling pin {inst_tok.text}.{pin_tok.text}", pin_tok.span)
                    pins[pin_tok.text] = (f"{inst_tok.text}__{pin_tok.text}_nc", pin_tok.span)
                else:
                    pins[pin_tok.text] = self.ref()
                self.expect(")")
                if self.at(","):
                    self.next()
                elif not self.at(")"):
                    raise VerilogSyntaxError(f"expected ',' or ')', found '{self.peek().text}'", self.peek().span)
            self.next()
            module.instances.append((inst_tok.text, kind.name, pins, init, inst_tok.span))
            if not self.at(","):
                break
            self.next()
        self.expect(";")


def _bits(name, rng):
    if rng is None:
        return [name]
    msb, lsb = rng
    step = -1 if msb >= lsb else 1
    return [f"{name}[{i}]" for i in range(msb, lsb + step, step)]


def _elaborate(module, library):
    ports = []  # (net, dir, clock_attr)
    for name in module.header:
        if name not in module.decls:
            raise VerilogSyntaxError(f"port {name} has no direction declaration", module.span)
        direction, rng, clock, _ = module.decls[name]
        ports.extend((bit, direction, clock) for bit in _bits(name, rng))
    for name, (_, _, _, span) in module.decls.items():
        if name not in module.header:
            raise VerilogSyntaxError(f"{name} is declared but not in the port list", span)
    port_names = {p for p, _, _ in ports}

    builder = NetlistBuilder(module.name, library)
    const_net = {0: builder.constants[0], 1: builder.constants[1]}

    aliases = _UnionFind()
    for lhs, rhs, span in module.assigns:
        if isinstance(rhs, _Const):
            if lhs in port_names:
                raise UnsupportedConstructError("constant assigned to port", span)
            rhs = const_net[rhs.value]
        elif lhs in port_names and rhs in port_names:
            raise UnsupportedConstructError("assign between ports", span)
        aliases.union(lhs, rhs)

    classes = {}
    for net in list(aliases.parent):
        classes.setdefault(aliases.find(net), set()).add(net)
    rename = {}
    for members in classes.values():
        consts = members & set(builder.constants)
        named_ports = members & port_names
        if len(consts) + len(named_ports) > 1:
            raise UnsupportedConstructError("assign joins ports or constants", module.span)
        keep = next(iter(consts or named_ports), None) or min(members)
        for net in members:
            rename[net] = keep

    def resolve(ref):
        if isinstance(ref, _Const):
            return const_net[ref.value]
        return rename.get(ref, ref)

    for net, direction, _ in ports:
        builder.add_port(net, direction)
    for name, rng in sorted(module.wires.items()):
        for bit in _bits(name, rng):
            if bit not in port_names:
                builder.add_net(resolve(bit))

    clock_nets = set()
    for name, kind_name, pins, init, span in module.instances:
        if name in builder.instances:
            raise VerilogSyntaxError(f"duplicate instance {name}", span)
        kind = library[kind_name]
        resolved = {pin: resolve(ref) for pin, (ref, _) in pins.items()}
        if kind.clock_pin and kind.clock_pin in resolved:
            clock_nets.add(resolved[kind.clock_pin])
        builder.add_instance(name, kind_name, resolved, init)

    for net, direction, clock in ports:
        if direction == "in" and (clock or net in clock_nets):
            builder.set_port_kind(net, "clock")
    return builder.build()


def parse_verilog(text, library, filename="<input>"):
    """Parse structural Verilog into a Netlist.

    Args:
        text (str): Verilog source
        library (CellLibrary): library every instantiated cell must come from
        filename (str): name used in error locations

    Returns:
        Netlist: flattened design that passes ``validate``

    Raises:
        VerilogSyntaxError: with a ``file:line:col`` location for lexical,
            syntax and structural errors
        UnsupportedConstructError: for constructs outside the subset
    """
    module = _Parser(text, library, filename).parse()
    netlist = _elaborate(module, library)
    found = validate(netlist, library)
    errors = [d for d in found if d.severity == "error"]
    if errors:
        raise VerilogSyntaxError("; ".join(str(d) for d in errors), module.span)
    for d in found:
        if d.severity == "warning":
            logger.warning(f"{netlist.name}: {d}")
    logger.debug(f"Parsed module {netlist.name}: {len(netlist.instances)} instances, {len(netlist.ports)} ports")
    return netlist


def parse_verilog_file(path, library):
    with open(path) as f:
        return parse_verilog(f.read(), library, str(path))
