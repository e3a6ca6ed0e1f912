"""
Tests for the two-phase clock model and latch timing with time borrowing.
"""

import networkx as nx
import numpy as np
import pytest

from py_twophase.errors import ConfigError, InfeasiblePeriod, TimingError
from py_twophase.fixtures.designs import (
    Design,
    counter,
    default_library,
    latch_pipeline,
    latch_ring,
    library_with_delays,
    stage_library,
)
from py_twophase.pipeline import full_transform
from py_twophase.timing import (
    ClockSpec,
    compute_arrivals,
    hold_check,
    hold_slack,
    latch_paths,
    load_skew_table,
    report,
    setup_check,
)
from py_twophase.timing.sta import INPUTS
from py_twophase.transform import PhaseTag, Variant
from py_twophase.verify import clock_domain_of

LIB = default_library()
CLOCKS = ClockSpec(period=10.0, duty=0.49)


def _points(netlist, clocks=CLOCKS):
    return {p.name: p for p in compute_arrivals(netlist, clocks)}


def test_clock_windows():
    """Φ1 opens at 0, Φ2 at half the period; both stay open duty·T."""
    assert CLOCKS.window(PhaseTag.PHI1) == pytest.approx((0.0, 4.9))
    assert CLOCKS.window(PhaseTag.PHI2) == pytest.approx((5.0, 9.9))
    assert CLOCKS.separation(PhaseTag.PHI1, PhaseTag.PHI2) == pytest.approx(5.0)
    assert CLOCKS.separation(PhaseTag.PHI2, PhaseTag.PHI1) == pytest.approx(5.0)


def test_pulse_width_and_max_borrow():
    """At 6.4 ns and 49% duty the pulse is 3.136 ns; max borrow subtracts setup."""
    clocks = ClockSpec(period=6.4, duty=0.49)
    assert clocks.pulse_width == pytest.approx(3.136)
    netlist = latch_pipeline(LIB)
    for point in compute_arrivals(netlist, clocks):
        assert 3.076 <= point.max_borrow <= 3.096
    ideal = latch_pipeline(stage_library(LIB, 0.0, 0.0))
    for point in compute_arrivals(ideal, clocks):
        assert point.max_borrow == pytest.approx(3.136)


def test_overlapping_phases_rejected():
    with pytest.raises(ConfigError, match="phases overlap"):
        ClockSpec(period=10.0, duty=0.6)
    with pytest.raises(ConfigError, match="period must be positive"):
        ClockSpec(period=0.0)


def test_latch_paths():
    """Min and max delay per launch/capture pair."""
    paths = latch_paths(latch_pipeline(stage_library(LIB, 7.0, 2.0)))
    assert paths[("l1", "l2")] == (7.0, 7.0)
    assert paths[("l2", "l3")] == (2.0, 2.0)
    assert paths[("$inputs", "l1")] == (0.0, 0.0)


def test_latch_paths_reject_flip_flops():
    with pytest.raises(TimingError, match="latch netlist"):
        latch_paths(counter(LIB))


def test_borrowing_stage():
    """A 7 ns stage into Φ2 arrives 2 ns after it opens and borrows that much."""
    points = _points(latch_pipeline(stage_library(LIB, 7.0, 2.0)))
    assert points["l2"].arrival == pytest.approx(7.0)
    assert points["l2"].borrow == pytest.approx(2.0)
    assert points["l1"].borrow == 0.0
    assert points["l3"].borrow == 0.0


def test_setup_slack():
    """Setup slack is the closing edge minus the arrival."""
    netlist = latch_pipeline(stage_library(LIB, 7.0, 2.0))
    checked = {p.name: p for p in setup_check(compute_arrivals(netlist, CLOCKS), CLOCKS)}
    assert checked["l2"].setup_slack == pytest.approx(2.9)


def test_report_borrowing_pipeline():
    result = report(latch_pipeline(stage_library(LIB, 7.0, 2.0)), CLOCKS)
    assert result.feasible and result.passed
    assert result.act_tb == pytest.approx(2.0)
    assert result.worst_setup_slack == pytest.approx(2.9)
    assert result.worst_hold_slack > 0


def test_report_setup_violation():
    """A 12 ns stage misses the Φ2 closing edge by 2.1 ns, so the period is infeasible."""
    netlist = latch_pipeline(stage_library(LIB, 12.0, 2.0))
    result = report(netlist, CLOCKS)
    assert not result.feasible and not result.passed
    assert result.late == ("l2",)
    assert result.looping == ()
    assert result.worst_setup_slack == pytest.approx(-2.1)
    assert result.to_dict()["late"] == ["l2"]


def test_compute_arrivals_rejects_late_stage():
    with pytest.raises(InfeasiblePeriod, match="past the closing edge at l2") as info:
        compute_arrivals(latch_pipeline(stage_library(LIB, 12.0, 2.0)), CLOCKS)
    assert info.value.latches == ["l2"]
    assert not info.value.loop


def test_skew_shifts_window():
    """Skew on the Φ2 latch delays its opening and tightens its setup."""
    clocks = CLOCKS.with_skew({"l2": 0.5})
    result = report(latch_pipeline(stage_library(LIB, 7.0, 2.0)), clocks)
    l2 = next(p for p in result.latches if p.name == "l2")
    assert l2.borrow == pytest.approx(1.5)
    assert l2.setup_slack == pytest.approx(2.4)
    assert result.skew_max == pytest.approx(0.5)


def test_ring_converges():
    """5 + 4 ns around a Φ1/Φ2 loop fits a 10 ns period."""
    points = _points(latch_ring(stage_library(LIB, 5.0, 4.0)))
    assert set(points) == {"l1", "l2"}
    assert points["l2"].arrival == pytest.approx(5.0)


def test_ring_infeasible():
    """6 + 5 ns around the loop keeps growing every sweep."""
    netlist = latch_ring(stage_library(LIB, 6.0, 5.0))
    with pytest.raises(InfeasiblePeriod) as info:
        compute_arrivals(netlist, CLOCKS)
    assert info.value.latches == ["l1", "l2"]
    assert info.value.loop
    result = report(netlist, CLOCKS)
    assert not result.feasible and not result.passed
    assert set(result.looping) == {"l1", "l2"}


def test_hold_slack_formula():
    assert hold_slack(0.1, 0.0, 5.0, 4.9, 0.05, 0.0, 0.0, 10.0) == pytest.approx(10.15)


def test_hold_check_pairs():
    """One check per latch-to-latch path, inputs excluded."""
    checks = hold_check(latch_pipeline(stage_library(LIB, 7.0, 2.0)), CLOCKS)
    assert [(h.source, h.target) for h in checks] == [("l1", "l2"), ("l2", "l3")]
    assert all(h.slack > 0 for h in checks)


def test_hold_check_launch_dq():
    """Switching to the launching latch's D-to-Q changes nothing when both latches match."""
    netlist = latch_pipeline(stage_library(LIB, 7.0, 2.0, ideal=False))
    capture = hold_check(netlist, CLOCKS)
    launch = hold_check(netlist, CLOCKS, launch_dq=True)
    assert [h.slack for h in capture] == pytest.approx([h.slack for h in launch])


def test_converted_counter_meets_timing():
    """The recirc-mux counter passes at the default 10 ns clock."""
    netlist = full_transform(counter(LIB), Variant.RECIRC_MUX).netlist
    result = report(netlist, CLOCKS)
    assert result.passed
    assert len(result.latches) == len(netlist.latches)
    assert result.to_dict()["feasible"] is True


def test_load_skew_table(tmp_path):
    path = tmp_path / "skew.json"
    path.write_text('{"l1": 0.2, "l2": 1}')
    assert load_skew_table(path) == {"l1": 0.2, "l2": 1.0}
    path.write_text('{"l1": "fast"}')
    with pytest.raises(ConfigError, match="skew table"):
        load_skew_table(path)


def random_latch_chain(rng):
    """Alternating latch chain with one random gate between stages."""
    library = library_with_delays(LIB, {k: float(rng.uniform(0.0, 4.0)) for k in ("BUF", "INV", "AND2")})
    d = Design("chain", library, clock=None)
    d.builder.add_port("clk_1", "in", "clock")
    d.builder.add_port("clk_2", "in", "clock")
    a, b = d.input("a", "b")
    d.output("y")
    length = int(rng.integers(2, 7))
    phase = int(rng.integers(0, 2))
    x = a
    for i in range(length):
        x = d.latch(f"l{i}", x, ("clk_1", "clk_2")[phase], q="y" if i == length - 1 else None)
        phase = 1 - phase
        if i < length - 1:
            kind = ("BUF", "INV", "AND2")[int(rng.integers(0, 3))]
            x = d.gate(kind, x, b) if kind == "AND2" else d.gate(kind, x)
    return d.build()


def test_setup_slack_grows_with_period():
    """Lengthening the period never lowers any latch's setup slack."""
    rng = np.random.default_rng(7)
    for _ in range(100):
        netlist = random_latch_chain(rng)
        period = float(rng.uniform(2.0, 12.0))
        short = report(netlist, ClockSpec(period=period, duty=0.45))
        long = report(netlist, ClockSpec(period=period * 1.25, duty=0.45))
        assert len(short.latches) == len(long.latches)
        for before, after in zip(short.latches, long.latches):
            assert after.setup_slack >= before.setup_slack - 1e-9


def test_hold_slack_grows_as_duty_shrinks():
    rng = np.random.default_rng(11)
    for _ in range(100):
        netlist = random_latch_chain(rng)
        wide = hold_check(netlist, ClockSpec(period=8.0, duty=0.49))
        narrow = hold_check(netlist, ClockSpec(period=8.0, duty=0.3))
        for before, after in zip(wide, narrow):
            assert after.slack >= before.slack - 1e-9


def enumerated_arrivals(netlist, clocks):
    """Latest arrival per latch over every launch-to-capture path of an acyclic design."""
    paths = latch_paths(netlist)
    timing = {i.name: netlist.kind_of(i).timing for i in netlist.latches}
    phase = {i.name: clock_domain_of(netlist, i) for i in netlist.latches}
    phase[INPUTS] = PhaseTag.PHI2
    graph = nx.DiGraph()
    graph.add_edges_from(paths)

    def hop(j, i):
        shift = 0.0 if clocks.open(phase[i]) > clocks.open(phase[j]) else -clocks.period
        return paths[(j, i)][1] + shift

    arrivals = {}
    for latch in timing:
        best = None
        for source in graph.nodes:
            if source == latch:
                continue
            if source == INPUTS:
                launch = clocks.open(PhaseTag.PHI2)
            else:
                launch = clocks.open(phase[source]) + timing[source].delay_max
            for path in nx.all_simple_paths(graph, source, latch):
                t = launch + sum(hop(j, i) for j, i in zip(path, path[1:]))
                t += sum(timing[m].delay_max for m in path[1:-1])
                best = t if best is None else max(best, t)
        arrivals[latch] = best
    return arrivals


def test_feasibility_matches_path_enumeration():
    """On acyclic chains the report is infeasible exactly when some path lands past a closing edge."""
    rng = np.random.default_rng(5)
    verdicts = set()
    for _ in range(100):
        netlist = random_latch_chain(rng)
        clocks = ClockSpec(period=float(rng.uniform(1.0, 12.0)), duty=0.45)
        expected = enumerated_arrivals(netlist, clocks)
        result = report(netlist, clocks)
        late = {
            name
            for name, arrival in expected.items()
            if arrival + netlist.kind_of(name).timing.setup > clocks.close(clock_domain_of(netlist, name)) + 1e-9
        }
        assert set(result.late) == late
        assert result.feasible == (not late)
        for point in result.latches:
            assert point.arrival == pytest.approx(expected[point.name])
        verdicts.add(result.feasible)
    assert verdicts == {True, False}
