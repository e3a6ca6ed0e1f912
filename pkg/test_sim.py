"""
Tests for the flip-flop and two-phase simulators.
"""

import itertools

import pandas as pd
import pytest

from py_twophase.errors import SimulationError
from py_twophase.fixtures.designs import (
    Design,
    counter,
    default_library,
    enable_counter,
    full_adder,
    latch_pipeline,
    stage_library,
    sync_reset_registers,
)
from py_twophase.pipeline import full_transform
from py_twophase.sim import (
    PhaseSchedule,
    Stimulus,
    SubStep,
    eval_comb,
    simulate_ff,
    simulate_two_phase,
    trace_to_vcd,
    write_trace_csv,
)
from py_twophase.transform import Variant

LIB = default_library()


def _gate(kind, **inputs):
    d = Design(kind.lower(), LIB, clock=None)
    d.input(*inputs)
    d.output("y")
    d.gate(kind, *inputs, out="y")
    return d.build()


def test_eval_inverter():
    assert eval_comb(_gate("INV", A=0), {"A": 0})["y"] == 1


def test_eval_mux():
    """S=1 selects B."""
    netlist = _gate("MUX2", A=0, B=1, S=1)
    assert eval_comb(netlist, {"A": 0, "B": 1, "S": 1})["y"] == 1
    assert eval_comb(netlist, {"A": 0, "B": 1, "S": 0})["y"] == 0


def test_eval_unassigned_source():
    with pytest.raises(SimulationError, match="unassigned source net"):
        eval_comb(_gate("INV", A=0), {})


def test_full_adder_truth_table():
    netlist = full_adder(LIB)
    for a, b, cin in itertools.product((0, 1), repeat=3):
        values = eval_comb(netlist, {"a": a, "b": b, "cin": cin})
        total = a + b + cin
        assert values["sum"] == total % 2
        assert values["cout"] == total // 2


def _count(trace, bits=3):
    return [sum(trace.value(c, f"q{i}") << i for i in range(bits)) for c in range(len(trace))]


def test_counter_counts():
    """With en held high the outputs run 1..8 mod 8."""
    stimulus = Stimulus.from_rows(["en"], [[1]] * 8)
    trace = simulate_ff(counter(LIB), stimulus)
    assert _count(trace) == [1, 2, 3, 4, 5, 6, 7, 0]


def test_enable_holds():
    """_DFFE_PP_ with E=0 keeps its state."""
    stimulus = Stimulus.from_rows(["en"], [[0], [0], [0], [1], [0]])
    trace = simulate_ff(enable_counter(LIB), stimulus)
    assert _count(trace) == [0, 0, 0, 1, 1]


def test_sync_reset():
    """Reset at cycle 2 forces y0 low whatever D is."""
    rows = [{"x": 1, "rst": 0, "st": 0}, {"x": 0, "rst": 0, "st": 0}, {"x": 1, "rst": 1, "st": 0}]
    trace = simulate_ff(sync_reset_registers(LIB), Stimulus.from_rows(["x", "rst", "st"], rows))
    assert trace.value(0, "y0") == 1
    assert trace.value(2, "y0") == 0


def test_stimulus_row_check():
    with pytest.raises(SimulationError, match="lacks inputs"):
        Stimulus.from_rows(["a", "b"], [{"a": 1}])


def test_missing_stimulus_input():
    with pytest.raises(SimulationError, match="stimulus lacks inputs"):
        simulate_ff(counter(LIB), Stimulus.from_rows([], [[]]))


def test_random_lanes_match_single_seed():
    """Lane k of a multi-seed stimulus and of its traces is the single-seed run of seed k."""
    wide = Stimulus.random(["a", "b", "c"], 20, [3, 5])
    assert wide.lane(1) == Stimulus.random(["a", "b", "c"], 20, [5])
    netlist = enable_counter(LIB)
    latches = full_transform(netlist, Variant.RECIRC_MUX).netlist
    ports = sorted(p.name for p in netlist.data_inputs)
    wide = Stimulus.random(ports, 30, [3, 5])
    narrow = Stimulus.random(ports, 30, [5])
    assert simulate_ff(netlist, wide).lane(1) == simulate_ff(netlist, narrow)
    assert simulate_two_phase(latches, wide).lane(1) == simulate_two_phase(latches, narrow)


def test_latch_chain_advances_one_cycle():
    """Φ1 -> Φ2 -> Φ1 with an inverter before the last latch."""
    library = stage_library(LIB, 0.0, 0.0)
    rows = [[1], [0], [0], [1], [1], [0]]
    trace = simulate_two_phase(latch_pipeline(library), Stimulus.from_rows(["a"], rows))
    expected = [1] + [1 - r[0] for r in rows[:-1]]
    assert trace.column("y") == expected


def test_clock_gated_pair_holds():
    """E=0 keeps a gated pair's state; E=1 lets new data through."""
    d = Design("gated", LIB)
    d.input("d", "en")
    d.output("q")
    d.ff("f", "d", q="q", kind="_DFFE_PP_", E="en")
    netlist = full_transform(d.build(), Variant.CLOCK_GATED).netlist
    rows = [{"d": 1, "en": 0}] * 3 + [{"d": 1, "en": 1}, {"d": 0, "en": 0}]
    trace = simulate_two_phase(netlist, Stimulus.from_rows(["d", "en"], rows))
    assert trace.column("q") == [0, 0, 0, 1, 1]


def _transparent_latch(loop=False):
    d = Design("transparent", LIB, clock=None)
    d.builder.add_port("clk_1", "in", "clock")
    d.builder.add_port("clk_2", "in", "clock")
    d.output("y")
    if loop:
        d.gate("INV", "y", out="n")
        d.latch("l", "n", "const_1", q="y")
    else:
        d.input("a")
        d.latch("l", "a", "const_1", q="y")
    return d.build()


def test_enabled_latch_is_transparent():
    rows = [[0], [1], [1], [0]]
    trace = simulate_two_phase(_transparent_latch(), Stimulus.from_rows(["a"], rows))
    assert trace.column("y") == [0, 1, 1, 0]


def test_unstable_network():
    with pytest.raises(SimulationError, match="unstable transparent network"):
        simulate_two_phase(_transparent_latch(loop=True), Stimulus.from_rows([], [[]]))


def test_schedule_rejects_overlap():
    with pytest.raises(SimulationError, match="both phases"):
        PhaseSchedule(steps=(SubStep("bad", frozenset({"clk_1", "clk_2"})),))


def test_two_phase_rejects_flip_flops():
    with pytest.raises(SimulationError):
        simulate_two_phase(counter(LIB), Stimulus.from_rows(["en"], [[1]]))


def test_simulation_is_deterministic():
    netlist = full_transform(enable_counter(LIB), Variant.RECIRC_MUX).netlist
    stimulus = Stimulus.random(["en"], 50, range(8))
    assert simulate_two_phase(netlist, stimulus) == simulate_two_phase(netlist, stimulus)


def test_trace_dumps(tmp_path):
    """CSV is long-format; VCD declares every sampled net."""
    trace = simulate_ff(counter(LIB), Stimulus.from_rows(["en"], [[1]] * 4))
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["cycle", "net", "value"]
    assert len(frame) == 4 * 3
    vcd = trace_to_vcd(trace, date="today")
    assert vcd.count("$var wire 1") == 3
    assert "$enddefinitions $end" in vcd
    assert vcd.rstrip().endswith("#40")
