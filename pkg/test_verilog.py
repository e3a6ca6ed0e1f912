"""
Tests for the structural Verilog reader and writer.
"""

import pytest

from py_twophase.errors import UnsupportedConstructError, VerilogSyntaxError
from py_twophase.fixtures.designs import SAMPLES, default_library, enable_counter, gcd_fsm
from py_twophase.models import emit_canonical, validate
from py_twophase.verilog import emit_verilog, parse_verilog, parse_verilog_file, tokenize

LIB = default_library()


def _sample(name):
    return next(p for p in SAMPLES if p.name == name)


def test_single_flip_flop():
    """One _DFF_P_ instance gives a one-instance netlist with clk as the clock port."""
    text = """
    module top(clk, d, q);
      input clk, d;
      output q;
      _DFF_P_ ff (.D(d), .C(clk), .Q(q));
    endmodule
    """
    netlist = parse_verilog(text, LIB)
    assert [i.name for i in netlist.instances] == ["ff"]
    assert [p.name for p in netlist.clock_ports] == ["clk"]
    assert [p.name for p in netlist.data_inputs] == ["d"]


def test_behavioral_block_rejected():
    text = """
    module top(clk, d, q);
      input clk, d;
      output q;
      always @(posedge clk) q <= d;
    endmodule
    """
    with pytest.raises(UnsupportedConstructError, match="unsupported construct: behavioral block"):
        parse_verilog(text, LIB)


def test_syntax_error_has_location():
    """Errors carry file:line:col."""
    text = "module top(a);\n  input a;\n  INV u (.A(a) .Y(b));\nendmodule\n"
    with pytest.raises(VerilogSyntaxError) as info:
        parse_verilog(text, LIB, filename="broken.v")
    assert str(info.value).startswith("broken.v:3:")


def test_unknown_cell_kind():
    text = "module top(a, y);\n  input a;\n  output y;\n  NAND9 u (.A(a), .Y(y));\nendmodule\n"
    with pytest.raises(VerilogSyntaxError, match="unknown cell kind NAND9"):
        parse_verilog(text, LIB)


def test_samples_parse():
    """Every bundled sample parses into a valid netlist."""
    assert SAMPLES
    for path in SAMPLES:
        netlist = parse_verilog_file(path, LIB)
        assert validate(netlist) == []
        assert len(netlist.clock_ports) == 1


def test_counter_sample_vector_ports():
    """The counter's q[2:0] output is bit-blasted."""
    netlist = parse_verilog_file(_sample("counter.v"), LIB)
    assert [p.name for p in netlist.output_ports] == ["q[2]", "q[1]", "q[0]"]
    assert len(netlist.flip_flops) == 3


def test_enable_counter_sample():
    """Attributes, constants and assign aliasing."""
    netlist = parse_verilog_file(_sample("enable_counter.v"), LIB)
    kinds = sorted(i.kind for i in netlist.flip_flops)
    assert kinds == ["_DFFE_PP_", "_SDFF_PP0_"]
    assert netlist.instance("r1").init == 1
    assert netlist.instance("g0").pins["B"] == netlist.const_one
    assert netlist.instance("r1").pins["D"] == netlist.instance("x1").pins["Y"]


def test_verilog_round_trip():
    """parse(emit(n)) is the same netlist and emitting is deterministic."""
    for build in (enable_counter, gcd_fsm):
        netlist = build(LIB)
        text = emit_verilog(netlist)
        again = parse_verilog(text, LIB)
        assert emit_canonical(again) == emit_canonical(netlist)
        assert emit_verilog(again) == text


def test_structural_enable_counter_matches_builder():
    """A hand-written structural 3-bit enable counter equals the builder fixture."""
    reference = enable_counter(LIB)
    again = parse_verilog(emit_verilog(reference), LIB)
    assert again == reference
    assert sum(i.kind == "_DFFE_PP_" for i in again.instances) == 3


def test_escaped_names():
    """Names outside the identifier alphabet survive a round trip."""
    text = "module top(a, y);\n  input a;\n  output y;\n  INV \\u$1 (.A(a), .Y(y));\nendmodule\n"
    netlist = parse_verilog(text, LIB)
    assert [i.name for i in netlist.instances] == ["u$1"]
    assert parse_verilog(emit_verilog(netlist), LIB) == netlist


def test_tokenize_skips_comments():
    tokens = [t.text for t in tokenize("// line\nmodule /* block */ m;")]
    assert tokens[:3] == ["module", "m", ";"]
