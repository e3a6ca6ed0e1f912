"""
Tests for retiming: graph extraction, lag computation, realization and
phase assignment.
"""

import itertools
import json

import pytest

from py_twophase.errors import InfeasibleRetiming, RetimeError
from py_twophase.fixtures.designs import (
    Design,
    counter,
    default_library,
    fanin_merge,
    full_adder,
    gcd_fsm,
    library_with_delays,
    odd_register_loop,
    pipeline3,
    shift_register,
    two_gate_pipeline,
)
from py_twophase.pipeline import full_transform
from py_twophase.retime import (
    HOST,
    LagAssignment,
    apply_retiming,
    assign_phases,
    build_retime_graph,
    candidate_periods,
    min_area_retime,
    min_delay_retime,
)
from py_twophase.transform import PhaseTag, TransformPlan, Variant, duplicate_ffs_recirc, init_clock_ports
from py_twophase.verify import check_equivalence

LIB = default_library()
SLOW = library_with_delays(LIB, {"BUF": 10.0})


def two_gate():
    """Two 10 ns gates followed by two registers."""
    return two_gate_pipeline(SLOW)


def brute_force_period(graph, span=3):
    """Smallest period over every legal lag vector with |r| <= span."""
    best = None
    for combo in itertools.product(range(-span, span + 1), repeat=len(graph.vertices)):
        lags = dict(zip(graph.vertices, combo))
        if graph.is_legal(lags):
            period = graph.period(lags)
            best = period if best is None else min(best, period)
    return best


def test_two_gate_graph():
    """Two vertices, and the boundary edge into the host carries both registers."""
    graph = build_retime_graph(two_gate())
    assert graph.vertices == ["g1", "g2"]
    [boundary] = graph.out_edges("g2")
    assert boundary.head == HOST and boundary.weight == 2
    assert graph.period() == pytest.approx(20.0)
    assert graph.register_count() == 2


def test_combinational_graph_has_no_registers():
    graph = build_retime_graph(full_adder(LIB))
    assert graph.edges
    assert all(e.weight == 0 for e in graph.edges)


def test_pipeline_weights():
    """One register between consecutive stages."""
    graph = build_retime_graph(pipeline3(LIB))
    inner = [e.weight for e in graph.edges if HOST not in (e.tail, e.head)]
    assert sorted(inner) == [1, 1]


def test_register_only_loop_is_frozen():
    """Registers feeding only each other are left in place."""
    d = Design("ring", LIB)
    d.output("b")
    d.ff("r0", "b", q="a")
    d.ff("r1", "a", q="b")
    graph = build_retime_graph(d.build())
    assert graph.registers == {}
    assert sorted(graph.frozen) == ["r0", "r1"]


def test_min_delay_meets_target():
    """Target 10 ns moves one register between the gates."""
    graph = build_retime_graph(two_gate())
    lags = min_delay_retime(graph, target=10.0)
    assert lags["g2"] == 1 and lags["g1"] == 0
    assert lags.period == pytest.approx(10.0)
    assert graph.is_legal(lags.lags)


def test_min_delay_target_already_met():
    graph = build_retime_graph(two_gate())
    assert min_delay_retime(graph, target=20.0).is_zero


def test_min_delay_infeasible_target():
    """9 ns cannot be met; the best is 10 ns."""
    graph = build_retime_graph(two_gate())
    with pytest.raises(InfeasibleRetiming) as info:
        min_delay_retime(graph, target=9.0)
    assert info.value.critical_delay == pytest.approx(10.0)
    assert info.value.target == 9.0
    assert info.value.path


def test_min_delay_minimizes():
    """Without a target the period halves from 20 to 10 ns."""
    graph = build_retime_graph(two_gate())
    assert 10.0 in candidate_periods(graph)
    assert min_delay_retime(graph).period == pytest.approx(10.0)


def test_min_delay_matches_brute_force():
    """The binary search finds the same period as exhaustive enumeration."""
    designs = [
        two_gate(),
        pipeline3(library_with_delays(LIB, {"INV": 3.0})),
        fanin_merge(LIB),
        counter(LIB),
        shift_register(LIB),
    ]
    for netlist in designs:
        graph = build_retime_graph(netlist)
        assert len(graph.vertices) <= 6
        lags = min_delay_retime(graph)
        assert graph.is_legal(lags.lags)
        assert lags.period == pytest.approx(brute_force_period(graph), abs=1e-6), netlist.name


def test_min_area_merges_fanin():
    """Registers on both inputs of a gate merge into one after it."""
    graph = build_retime_graph(fanin_merge(LIB))
    assert graph.register_count() == 2
    lags = min_area_retime(graph)
    assert lags.lags == {"g": -1}
    assert graph.register_count(lags.lags) == 1


def test_min_area_single_path_unchanged():
    graph = build_retime_graph(pipeline3(LIB))
    assert min_area_retime(graph).is_zero


def test_min_area_never_increases_count():
    for netlist in (counter(LIB), shift_register(LIB), two_gate(), fanin_merge(LIB)):
        graph = build_retime_graph(netlist)
        lags = min_area_retime(graph)
        assert graph.is_legal(lags.lags)
        assert graph.register_count(lags.lags) <= graph.register_count()


def test_min_area_respects_period_bound():
    """Bounded by the min-delay period, merging may not slow the design down."""
    graph = build_retime_graph(two_gate())
    fast = min_delay_retime(graph)
    lags = min_area_retime(graph, fast, period=fast.period)
    assert graph.period(lags.lags) <= fast.period + 1e-9


def test_apply_two_gate_retiming():
    """One register lands between the gates; behavior is unchanged."""
    netlist = two_gate()
    graph = build_retime_graph(netlist)
    lags = min_delay_retime(graph, target=10.0)
    retimed, _ = apply_retiming(netlist, graph, lags)
    assert len(retimed.flip_flops) == 2
    between = retimed.instance("g2").pins["A"]
    assert retimed.driver(between)[0] in {i.name for i in retimed.flip_flops}
    assert build_retime_graph(retimed).period() == pytest.approx(10.0)
    verdict = check_equivalence(netlist, retimed, n_cycles=1000, n_seeds=4, warmup=lags.max_abs)
    assert verdict.equivalent


def test_apply_zero_lags_is_identity():
    netlist = two_gate()
    graph = build_retime_graph(netlist)
    retimed, trace = apply_retiming(netlist, graph, LagAssignment())
    assert retimed is netlist and trace is None


def test_apply_rejects_illegal_lags():
    netlist = two_gate()
    graph = build_retime_graph(netlist)
    with pytest.raises(RetimeError, match="non-negativity"):
        apply_retiming(netlist, graph, {"g1": 1})


def test_forward_move_evaluates_gate():
    """Moving registers with initial values 0 and 1 across an AND2 gives 0."""
    d = Design("and_inits", LIB)
    a, b = d.input("a", "b")
    d.output("y")
    d.gate("AND2", d.ff("ra", a, init=0), d.ff("rb", b, init=1), name="g", out="y")
    netlist = d.build()
    graph = build_retime_graph(netlist)
    lags = min_area_retime(graph)
    retimed, _ = apply_retiming(netlist, graph, lags)
    [register] = retimed.flip_flops
    assert register.init == 0
    assert register.pins["Q"] == "y"
    assert check_equivalence(netlist, retimed, n_cycles=200, n_seeds=4).equivalent


def test_backward_move_justifies_initial_value():
    """An initial 1 behind an inverter becomes 0 in front of it."""
    d = Design("inv_init", LIB)
    a = d.input("a")
    d.output("y")
    x = d.gate("INV", a, name="g1")
    d.ff("r", x, q="y", init=1)
    netlist = d.build()
    graph = build_retime_graph(netlist)
    retimed, _ = apply_retiming(netlist, graph, {"g1": 1})
    [register] = retimed.flip_flops
    assert register.init == 0
    assert check_equivalence(netlist, retimed, n_cycles=200, n_seeds=4, warmup=1).equivalent


def test_fanin_retiming_keeps_phases_assignable():
    """After min-area merging, the duplicated design still two-colors."""
    plan = TransformPlan()
    netlist, _ = duplicate_ffs_recirc(init_clock_ports(fanin_merge(LIB), plan), plan)
    graph = build_retime_graph(netlist)
    lags = min_area_retime(graph)
    assert graph.register_count(lags.lags) < graph.register_count()
    retimed, _ = apply_retiming(netlist, graph, lags)
    phases = assign_phases(retimed)
    assert set(phases) == {i.name for i in retimed.flip_flops}
    assert check_equivalence(netlist, retimed, n_cycles=500, n_seeds=4, warmup=lags.max_abs).equivalent


def test_assign_phases_alternates():
    """A duplicated pair gets Φ1 then Φ2."""
    plan = TransformPlan()
    d = Design("pair", LIB)
    d.input("d")
    d.output("q")
    d.ff("f", "d", q="q")
    netlist, _ = duplicate_ffs_recirc(init_clock_ports(d.build(), plan), plan)
    assert assign_phases(netlist) == {"f__phi1": PhaseTag.PHI1, "f__phi2": PhaseTag.PHI2}


def test_assign_phases_after_min_delay():
    """The retimed two-gate design has one register per phase."""
    netlist = two_gate()
    graph = build_retime_graph(netlist)
    retimed, _ = apply_retiming(netlist, graph, min_delay_retime(graph, target=10.0))
    phases = assign_phases(retimed)
    assert sorted(p.value for p in phases.values()) == ["phi1", "phi2"]
    assert phases[retimed.driver("y")[0]] is PhaseTag.PHI2


def test_assign_phases_odd_loop():
    with pytest.raises(RetimeError, match="odd register parity"):
        assign_phases(odd_register_loop(LIB))


def test_assign_phases_needs_base_flip_flops():
    d = Design("enable", LIB)
    d.input("d", "en")
    d.output("q")
    d.ff("f", "d", q="q", kind="_DFFE_PP_", E="en")
    with pytest.raises(RetimeError, match="expected _DFF_P_"):
        assign_phases(d.build())


def test_lag_assignment_json():
    lags = LagAssignment({"g2": 1}, 10.0)
    assert json.loads(lags.to_json()) == {"lags": {"g2": 1}, "period": 10.0}
    assert lags.max_abs == 1 and not lags.is_zero


def _constant_mux():
    """Register behind MUX2(A=a, B=const_0, S=s)."""
    d = Design("const_mux", LIB)
    a, s = d.input("a", "s")
    d.output("y")
    d.ff("r", d.gate("MUX2", a, "const_0", s, name="m"), q="y")
    return d.build()


def test_constants_stay_out_of_the_graph():
    """A constant pin is recorded on its vertex, never as an edge."""
    graph = build_retime_graph(_constant_mux())
    assert graph.fixed == {"m": {"B": 0}}
    assert all(e.net != "const_0" for e in graph.edges)


def test_backward_move_leaves_constant_unregistered():
    """Moving the register back across the mux puts registers on a and s only."""
    netlist = _constant_mux()
    graph = build_retime_graph(netlist)
    retimed, _ = apply_retiming(netlist, graph, {"m": 1})
    assert sorted(f.pins["D"] for f in retimed.flip_flops) == ["a", "s"]
    assert retimed.instance("m").pins["B"] == "const_0"
    assert check_equivalence(netlist, retimed, n_cycles=200, n_seeds=4, warmup=1).equivalent


def test_gcd_min_delay_converts():
    """The reset mux constants of the gcd design no longer break phase assignment."""
    original = gcd_fsm(LIB)
    result = full_transform(original, Variant.RECIRC_MUX, retime="min-delay", cycles=300, seeds=4)
    assert not result.netlist.flip_flops
    verdict = check_equivalence(original, result.netlist, n_cycles=300, n_seeds=4, warmup=result.warmup)
    assert verdict.equivalent


def test_phase_failure_falls_back(monkeypatch):
    """A retimed design that cannot be split into phases keeps the unretimed placement."""

    def odd_parity(netlist):
        raise RetimeError("odd register parity: r0 -> r1 -> r0")

    monkeypatch.setattr("py_twophase.pipeline.assign_phases", odd_parity)
    original = two_gate()
    result = full_transform(original, Variant.RECIRC_MUX, retime="min-delay", cycles=100, seeds=2)
    assert not result.retimed and result.warmup == 0
    assert check_equivalence(original, result.netlist, n_cycles=100, n_seeds=2).equivalent
