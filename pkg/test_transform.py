"""
Tests for the flip-flop to two-phase latch conversion passes.
"""

import pytest

from py_twophase.errors import TransformError
from py_twophase.fixtures.designs import Design, async_reset_registers, default_library, enable_counter
from py_twophase.models import BASE_DFF, LATCH, NetlistBuilder
from py_twophase.pipeline import full_transform
from py_twophase.transform import (
    PhaseTag,
    Role,
    TransformPlan,
    TransformTrace,
    Variant,
    connect_clk,
    duplicate_ffs_recirc,
    init_clock_ports,
    map_dff_to_latch,
    transform_clock_gated,
    transform_recirc,
)

LIB = default_library()
PLAN = TransformPlan()


def single_ff(kind="_DFF_P_", **controls):
    """One flip-flop of ``kind`` between input d and output q."""
    d = Design("single", LIB)
    d.input("d", *controls.values())
    d.output("q")
    d.ff("f", "d", q="q", kind=kind, **controls)
    return init_clock_ports(d.build(), PLAN)


def _kinds(netlist):
    counts = {}
    for inst in netlist.instances:
        counts[inst.kind] = counts.get(inst.kind, 0) + 1
    return counts


def test_init_clock_ports():
    """clk becomes clk_1 and clk_2 is added."""
    d = Design("one", LIB)
    d.input("d")
    d.output("q")
    d.ff("f", "d", q="q")
    netlist = init_clock_ports(d.build(), PLAN)
    assert sorted(p.name for p in netlist.clock_ports) == ["clk_1", "clk_2"]
    assert netlist.instance("f").pins["C"] == "clk_1"


def test_two_clock_ports_rejected():
    d = Design("two", LIB)
    d.builder.add_port("clk_b", "in", "clock")
    d.input("d")
    with pytest.raises(TransformError, match="unsupported clock topology"):
        init_clock_ports(d.build(), PLAN)


def test_clock_used_as_data():
    """A clock feeding a gate input is rejected."""
    d = Design("bad", LIB)
    d.input("d")
    d.output("q", "y")
    d.ff("f", "d", q="q")
    d.gate("INV", "clk", out="y")
    with pytest.raises(TransformError, match="clock used as data"):
        init_clock_ports(d.build(), PLAN)


def test_duplicate_enable_ff():
    """One _DFFE_PP_ becomes two plus one control register."""
    netlist, trace = duplicate_ffs_recirc(single_ff("_DFFE_PP_", E="en"), PLAN)
    assert _kinds(netlist) == {"_DFFE_PP_": 2, BASE_DFF: 1}
    first, second = netlist.instance("f__phi1"), netlist.instance("f__phi2")
    assert first.pins["E"] == "en"
    assert second.pins["E"] == netlist.instance("en__ctl_phi1").pins["Q"]
    assert second.pins["D"] == first.pins["Q"]
    assert second.pins["Q"] == "q"
    trace.check(netlist)


def test_duplicate_plain_ff():
    netlist, trace = duplicate_ffs_recirc(single_ff(), PLAN)
    assert _kinds(netlist) == {BASE_DFF: 2}
    assert [(e.name, e.phase) for e in trace.generated("f")] == [
        ("f__phi1", PhaseTag.PHI1),
        ("f__phi2", PhaseTag.PHI2),
    ]


def test_shared_reset_control_register():
    """Two sync-reset flip-flops on one reset net share one control register."""
    d = Design("shared", LIB)
    d.input("a", "b", "rst")
    d.output("x", "y")
    d.ff("f0", "a", q="x", kind="_SDFF_PP0_", R="rst")
    d.ff("f1", "b", q="y", kind="_SDFF_PP0_", R="rst")
    netlist, trace = duplicate_ffs_recirc(init_clock_ports(d.build(), PLAN), PLAN)
    assert len(netlist.sequential_instances) == 5
    controls = [e.name for _, e in trace.all_entries() if e.role is Role.CONTROL]
    assert controls == ["rst__ctl_phi1"]


def test_transform_recirc_enable():
    """An enable pair lowers to base flip-flops, recirculation registers and muxes."""
    netlist, trace = duplicate_ffs_recirc(single_ff("_DFFE_PP_", E="en"), PLAN)
    netlist, trace = transform_recirc(netlist, trace, PLAN)
    assert _kinds(netlist) == {BASE_DFF: 5, "MUX2": 2}
    mux = netlist.instance("f__mux_phi1")
    assert mux.pins["S"] == "en"
    assert mux.pins["A"] == netlist.instance("f__recirc_phi2").pins["Q"]
    assert netlist.instance("f__recirc_phi2").pins["D"] == netlist.instance("f__phi1").pins["Q"]
    roles = sorted(e.role.value for e in trace.generated("f"))
    assert roles == ["control", "main", "main", "mux", "mux", "recirc", "recirc"]
    trace.check(netlist)


def test_transform_recirc_plain():
    netlist, trace = duplicate_ffs_recirc(single_ff(), PLAN)
    netlist, _ = transform_recirc(netlist, trace, PLAN)
    assert _kinds(netlist) == {BASE_DFF: 2}


def test_transform_recirc_sync_reset():
    """Reset selects the constant-0 net on both stages."""
    netlist, trace = duplicate_ffs_recirc(single_ff("_SDFF_PP0_", R="rst"), PLAN)
    netlist, _ = transform_recirc(netlist, trace, PLAN)
    muxes = [i for i in netlist.instances if i.kind == "MUX2"]
    assert len(muxes) == 2
    assert all(m.pins["B"] == netlist.const_zero for m in muxes)


def test_clock_gated_enable():
    """One _DFFE_PP_ becomes three base flip-flops and two AND2 gates."""
    netlist, trace = transform_clock_gated(single_ff("_DFFE_PP_", E="en"), PLAN)
    assert _kinds(netlist) == {BASE_DFF: 3, "AND2": 2}
    gate = netlist.instance("f__cg_and_phi1")
    assert gate.pins["A"] == "clk_1" and gate.pins["B"] == "en"
    assert netlist.instance("f__phi1").pins["C"] == gate.pins["Y"]
    trace.check(netlist)


def test_clock_gated_plain():
    netlist, _ = transform_clock_gated(single_ff(), PLAN)
    assert _kinds(netlist) == {BASE_DFF: 2}


def test_clock_gated_rejects_async():
    """Asynchronous reset names the instance and points at recirc-mux."""
    netlist = init_clock_ports(async_reset_registers(LIB), PLAN)
    with pytest.raises(TransformError, match="r0.*recirc-mux"):
        transform_clock_gated(netlist, PLAN)


def test_connect_clk():
    """Selected registers move to the requested port; nothing else changes."""
    netlist, trace = duplicate_ffs_recirc(single_ff(), PLAN)
    moved = connect_clk(netlist, ["f__phi2"], "clk_2")
    assert moved.instance("f__phi2").pins["C"] == "clk_2"
    assert moved.instance("f__phi1").pins["C"] == "clk_1"
    assert connect_clk(netlist, [], "clk_2") is netlist


def test_connect_clk_through_gate():
    """A gated register has its gate's clock-side input rewired."""
    netlist, _ = transform_clock_gated(single_ff("_DFFE_PP_", E="en"), PLAN)
    moved = connect_clk(netlist, ["f__phi2"], "clk_2")
    assert moved.instance("f__cg_and_phi2").pins["A"] == "clk_2"
    assert moved.instance("f__cg_and_phi2").pins["B"] == netlist.instance("f__cg_and_phi2").pins["B"]


def test_connect_clk_rejects_comb_cell():
    d = Design("inv", LIB)
    d.input("a")
    d.output("y", "q")
    d.gate("INV", "a", name="u", out="y")
    d.ff("f", "a", q="q")
    netlist = init_clock_ports(d.build(), PLAN)
    with pytest.raises(TransformError):
        connect_clk(netlist, ["u"], "clk_2")


def test_map_pair_to_latches():
    """A Φ1/Φ2 pair becomes two latches on clk_1 and clk_2."""
    netlist, trace = duplicate_ffs_recirc(single_ff(), PLAN)
    latches = map_dff_to_latch(netlist, trace, PLAN)
    assert _kinds(latches) == {LATCH: 2}
    assert latches.instance("f__phi1").pins["E"] == "clk_1"
    assert latches.instance("f__phi2").pins["E"] == "clk_2"


def test_map_keeps_gated_enable():
    netlist, trace = transform_clock_gated(single_ff("_DFFE_PP_", E="en"), PLAN)
    latches = map_dff_to_latch(netlist, trace, PLAN)
    assert latches.instance("f__phi2").pins["E"] == netlist.instance("f__cg_and_phi2").pins["Y"]


def test_map_rejects_unlowered():
    netlist, trace = duplicate_ffs_recirc(single_ff("_DFFE_PP_", E="en"), PLAN)
    with pytest.raises(TransformError, match="un-lowered variant"):
        map_dff_to_latch(netlist, trace, PLAN)


def test_sequential_counts_per_flip_flop():
    """2 latches per plain flip-flop; 3 or 5 per enable flip-flop."""
    plain = Design("plain", LIB)
    plain.input("d")
    plain.output("q")
    plain.ff("f", "d", q="q")
    enabled = Design("enabled", LIB)
    enabled.input("d", "en")
    enabled.output("q")
    enabled.ff("f", "d", q="q", kind="_DFFE_PP_", E="en")
    expected = {
        ("plain", Variant.CLOCK_GATED): 2,
        ("plain", Variant.RECIRC_MUX): 2,
        ("enabled", Variant.CLOCK_GATED): 3,
        ("enabled", Variant.RECIRC_MUX): 5,
    }
    designs = {"plain": plain.build(), "enabled": enabled.build()}
    for (name, variant), count in expected.items():
        result = full_transform(designs[name], variant)
        assert len(result.netlist.latches) == count
        assert not result.netlist.flip_flops


def test_clock_gated_saves_latches():
    """On an all-enable design the clock-gated variant needs at most 3/4 of the recirc latches."""
    netlist = enable_counter(LIB)
    gated = full_transform(netlist, Variant.CLOCK_GATED).netlist
    recirc = full_transform(netlist, Variant.RECIRC_MUX).netlist
    assert len(gated.latches) <= 0.75 * len(recirc.latches)


def test_trace_json_round_trip():
    import json

    _, trace = transform_clock_gated(single_ff("_DFFE_PP_", E="en"), PLAN)
    again = TransformTrace.from_dict(json.loads(trace.to_json()))
    assert again == trace
    assert again.origin_of("f__cg_and_phi2") == "f"


def test_trace_check_catches_missing_instance():
    netlist, trace = duplicate_ffs_recirc(single_ff(), PLAN)
    builder = NetlistBuilder.from_netlist(netlist)
    builder.remove_instance("f__phi1")
    with pytest.raises(TransformError):
        trace.check(builder.build())
