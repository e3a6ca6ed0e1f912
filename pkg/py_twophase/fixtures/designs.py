"""
Small reference designs built programmatically.

Used by the tests and handy from a REPL. Each builder takes the cell library
and returns a validated Netlist. Single-clock flip-flop designs use the clock
port ``clk``; the latch designs are already on ``clk_1``/``clk_2``.
"""
from dataclasses import replace
from pathlib import Path

from ..config import FIXTURE_DIR, config
from ..errors import NetlistError
from ..models.builder import NetlistBuilder
from ..models.core.library import BASE_DFF, LATCH, CellLibrary, TimingData, load_library_file
from ..models.core.netlist import validate

SAMPLES = sorted(Path(FIXTURE_DIR).glob("*.v"))


def default_library():
    return load_library_file(config.library_path)


def library_with_delays(library, delays):
    """Copy of ``library`` with new timing for some kinds.

    Args:
        delays: kind name -> TimingData, or a number used as both delay_max
            and delay_min with all other timing values 0
    """
    cells = dict(library.cells)
    for name, timing in delays.items():
        if not isinstance(timing, TimingData):
            timing = TimingData(delay_max=float(timing), delay_min=float(timing))
        cells[name] = replace(cells[name], timing=timing)
    return CellLibrary(cells)


class Design:
    """Thin wrapper over NetlistBuilder with auto-named gates."""

    def __init__(self, name, library, clock="clk"):
        self.builder = NetlistBuilder(name, library)
        self.library = library
        self.clock = clock
        if clock:
            self.builder.add_port(clock, "in", "clock")
        self._count = 0

    def input(self, *names):
        for name in names:
            self.builder.add_port(name, "in")
        return names[0] if len(names) == 1 else names

    def output(self, *names):
        for name in names:
            self.builder.add_port(name, "out")

    def gate(self, kind, *inputs, out=None, name=None):
        self._count += 1
        name = name or f"g{self._count}_{kind.lower()}"
        out = out or self.builder.fresh_net(f"{name}_y")
        cell = self.library[kind]
        pins = dict(zip([p for p in cell.input_pins], inputs))
        pins[cell.output_pin] = out
        self.builder.add_instance(name, kind, pins)
        return out

    def ff(self, name, d, q=None, kind=BASE_DFF, init=0, **controls):
        q = q or self.builder.fresh_net(f"{name}_q")
        cell = self.library[kind]
        pins = {cell.data_pin: d, cell.clock_pin: self.clock, cell.output_pin: q, **controls}
        self.builder.add_instance(name, kind, pins, init)
        return q

    def latch(self, name, d, enable, q=None, init=0):
        q = q or self.builder.fresh_net(f"{name}_q")
        cell = self.library[LATCH]
        self.builder.add_instance(name, LATCH, {cell.data_pin: d, cell.clock_pin: enable, cell.output_pin: q}, init)
        return q

    def build(self):
        netlist = self.builder.build()
        errors = [d for d in validate(netlist) if d.severity == "error"]
        if errors:
            raise NetlistError(f"fixture {netlist.name} is invalid: {errors[0]}")
        return netlist


def counter(library, bits=3):
    """Up-counter that advances while ``en`` is high; outputs q0..q{bits-1}."""
    d = Design("counter", library)
    en = d.input("en")
    d.output(*(f"q{i}" for i in range(bits)))
    carry = en
    for i in range(bits):
        nxt = d.gate("XOR2", f"q{i}", carry)
        d.ff(f"r{i}", nxt, q=f"q{i}")
        if i + 1 < bits:
            carry = d.gate("AND2", f"q{i}", carry)
    return d.build()


def enable_counter(library, bits=3):
    """Up-counter on enable flip-flops (``_DFFE_PP_``)."""
    d = Design("enable_counter", library)
    en = d.input("en")
    d.output(*(f"q{i}" for i in range(bits)))
    carry = None
    for i in range(bits):
        nxt = d.gate("INV", "q0") if i == 0 else d.gate("XOR2", f"q{i}", carry)
        d.ff(f"r{i}", nxt, q=f"q{i}", kind="_DFFE_PP_", E=en)
        carry = "q0" if i == 0 else d.gate("AND2", f"q{i}", carry)
    return d.build()


def shift_register(library, length=4):
    """Shift register whose input is XORed with its last stage."""
    d = Design("shift_register", library)
    din = d.input("din")
    d.output("dout")
    q = d.gate("XOR2", din, "dout")
    for i in range(length):
        q = d.ff(f"s{i}", q, q="dout" if i == length - 1 else None, init=i % 2)
    return d.build()


def sync_reset_registers(library):
    """Sync reset-to-0 and set-to-1 registers around a little logic."""
    d = Design("sync_reset", library)
    x, rst, st = d.input("x", "rst", "st")
    d.output("y0", "y1")
    a = d.gate("XOR2", x, "y1")
    d.ff("r0", a, q="y0", kind="_SDFF_PP0_", R=rst)
    b = d.gate("AND2", x, "y0")
    d.ff("r1", b, q="y1", kind="_SDFF_PP1_", S=st)
    return d.build()


def async_reset_registers(library):
    """Async reset-to-0 and set-to-1 registers; only the recirc-mux variant handles these."""
    d = Design("async_reset", library)
    x, rst, st = d.input("x", "rst", "st")
    d.output("y0", "y1")
    a = d.gate("XOR2", x, "y1")
    d.ff("r0", a, q="y0", kind="_DFF_PP0_", R=rst)
    b = d.gate("OR2", x, "y0")
    d.ff("r1", b, q="y1", kind="_DFF_PP1_", S=st)
    return d.build()


def gcd_fsm(library):
    """Two-bit subtractive GCD: load on ``start``, iterate while ``busy``.

    a and b sit on enable flip-flops, the busy flag on a sync-reset one.
    """
    d = Design("gcd", library)
    start, rst = d.input("start", "rst")
    ain = d.input("a0_in", "a1_in")
    bin_ = d.input("b0_in", "b1_in")
    d.output("res0", "res1", "busy")
    a = ("res0", "res1")
    b = ("b0", "b1")

    def sub(x, y):
        diff0 = d.gate("XOR2", x[0], y[0])
        borrow = d.gate("AND2", d.gate("INV", x[0]), y[0])
        diff1 = d.gate("XOR2", d.gate("XOR2", x[1], y[1]), borrow)
        return diff0, diff1

    same0 = d.gate("XNOR2", a[0], b[0])
    same1 = d.gate("XNOR2", a[1], b[1])
    eq = d.gate("AND2", same0, same1)
    bz = d.gate("NOR2", b[0], b[1])
    done = d.gate("OR2", eq, bz)
    hi = d.gate("AND2", a[1], d.gate("INV", b[1]))
    lo = d.gate("AND2", same1, d.gate("AND2", a[0], d.gate("INV", b[0])))
    gt = d.gate("OR2", hi, lo)

    load = d.gate("AND2", start, d.gate("INV", "busy"))
    step = d.gate("AND2", "busy", d.gate("INV", done))
    a_en = d.gate("OR2", load, d.gate("AND2", step, gt))
    b_en = d.gate("OR2", load, d.gate("AND2", step, d.gate("INV", gt)))

    a_diff = sub(a, b)
    b_diff = sub(b, a)
    for i in range(2):
        d.ff(f"ra{i}", d.gate("MUX2", a_diff[i], ain[i], load), q=a[i], kind="_DFFE_PP_", E=a_en)
        d.ff(f"rb{i}", d.gate("MUX2", b_diff[i], bin_[i], load), q=b[i], kind="_DFFE_PP_", E=b_en)
    d.ff("rbusy", d.gate("OR2", load, step), q="busy", kind="_SDFF_PP0_", R=rst)
    return d.build()


def full_adder(library):
    """Purely combinational one-bit adder (no clock)."""
    d = Design("full_adder", library, clock=None)
    a, b, cin = d.input("a", "b", "cin")
    d.output("sum", "cout")
    p = d.gate("XOR2", a, b)
    d.gate("XOR2", p, cin, out="sum")
    d.gate("OR2", d.gate("AND2", a, b), d.gate("AND2", p, cin), out="cout")
    return d.build()


def pipeline3(library):
    """Three inverters separated by two registers."""
    d = Design("pipeline3", library)
    a = d.input("a")
    d.output("y")
    x = d.gate("INV", a, name="g1")
    x = d.ff("p1", x)
    x = d.gate("INV", x, name="g2")
    x = d.ff("p2", x)
    d.gate("INV", x, name="g3", out="y")
    return d.build()


def two_gate_pipeline(library, kind="BUF"):
    """Two gates in series followed by two registers before the output."""
    d = Design("two_gate", library)
    a = d.input("a")
    d.output("y")
    x = d.gate(kind, a, name="g1")
    x = d.gate(kind, x, name="g2")
    x = d.ff("r1", x)
    d.ff("r2", x, q="y")
    return d.build()


def fanin_merge(library):
    """Registers on both inputs of one AND gate."""
    d = Design("fanin_merge", library)
    a, b = d.input("a", "b")
    d.output("y")
    d.gate("AND2", d.ff("ra", a), d.ff("rb", b), name="g", out="y")
    return d.build()


def odd_register_loop(library):
    """Three registers in a ring: no valid two-phase coloring."""
    d = Design("odd_loop", library)
    d.output("y")
    x = d.gate("INV", "y", name="g")
    x = d.ff("l0", x)
    x = d.ff("l1", x)
    d.ff("l2", x, q="y")
    return d.build()


def latch_pipeline(library):
    """Φ1 -> comb -> Φ2 -> comb -> Φ1 latch chain with one gate per stage.

    Stage delays come from dedicated BUF/INV timing, so pass a library built
    with ``library_with_delays``.
    """
    d = Design("latch_pipeline", library, clock=None)
    d.builder.add_port(config.clk1_name, "in", "clock")
    d.builder.add_port(config.clk2_name, "in", "clock")
    a = d.input("a")
    d.output("y")
    x = d.latch("l1", a, config.clk1_name)
    x = d.gate("BUF", x, name="stage1")
    x = d.latch("l2", x, config.clk2_name)
    x = d.gate("INV", x, name="stage2")
    d.latch("l3", x, config.clk1_name, q="y")
    return d.build()


def latch_ring(library):
    """Φ1 and Φ2 latches in a loop through BUF then INV."""
    d = Design("latch_ring", library, clock=None)
    d.builder.add_port(config.clk1_name, "in", "clock")
    d.builder.add_port(config.clk2_name, "in", "clock")
    d.output("y")
    x = d.gate("BUF", "l1_q", name="stage1")
    d.latch("l2", x, config.clk2_name, q="y")
    x = d.gate("INV", "y", name="stage2")
    d.latch("l1", x, config.clk1_name, q="l1_q")
    return d.build()


def stage_library(library, first, second, ideal=True):
    """Library where BUF costs ``first`` ns and INV ``second`` ns; latches ideal."""
    delays = {"BUF": first, "INV": second}
    if ideal:
        delays[LATCH] = TimingData()
    return library_with_delays(library, delays)


FF_DESIGNS = {
    "counter": counter,
    "enable_counter": enable_counter,
    "shift_register": shift_register,
    "sync_reset": sync_reset_registers,
    "gcd": gcd_fsm,
}
