"""
Sub-step simulation of two-phase latch netlists.

Each cycle applies the inputs, then walks the schedule (Φ1, gap, Φ2, gap by
default). In a sub-step a latch may be transparent only when its enable cone
contains a clock that is high in that step; those latches and the
combinational cells settle together. An acyclic transparent network settles
in one ordered sweep; otherwise sweeps repeat until nothing changes.
"""
import logging

import networkx as nx

from ..errors import SimulationError
from .engine import CompiledNetlist
from .stimulus import PhaseSchedule, Trace

logger = logging.getLogger(__name__)


def enable_cone_clocks(netlist, net):
    """Clock ports reachable backwards from ``net`` through combinational cells."""
    clocks = {p.name for p in netlist.clock_ports}
    found = set()
    seen = set()
    stack = [net]
    while stack:
        net = stack.pop()
        if net in seen:
            continue
        seen.add(net)
        if net in clocks:
            found.add(net)
            continue
        driver = netlist.driver(net)
        if driver is None or driver[0] is None:
            continue
        inst = netlist.instance(driver[0])
        kind = netlist.kind_of(inst)
        if kind.is_comb:
            stack.extend(inst.pins[p] for p in kind.input_pins)
    return found


class _StepProgram:
    def __init__(self, compiled, transparent, label):
        self.transparent = sorted(transparent)
        names = compiled.comb_order + self.transparent
        graph = compiled.dependency_graph(names)
        self.acyclic = nx.is_directed_acyclic_graph(graph)
        if self.acyclic:
            order = list(nx.lexicographical_topological_sort(graph))
        else:
            condensed = nx.condensation(graph)
            order = []
            for scc in nx.topological_sort(condensed):
                order.extend(sorted(condensed.nodes[scc]["members"]))
        self.sweep = compiled.compile(order, label)
        self.bound = len(compiled.comb_order) + len(self.transparent)


class TwoPhaseSimulator:
    def __init__(self, netlist, schedule=None):
        if netlist.flip_flops:
            raise SimulationError(
                f"simulate_two_phase needs latches only; {netlist.flip_flops[0].name} is a flip-flop"
            )
        self.netlist = netlist
        self.schedule = schedule or PhaseSchedule()
        for clk in self.schedule.clocks:
            if not netlist.has_port(clk):
                raise SimulationError(f"two-phase netlist lacks clock port {clk}")
        self.compiled = CompiledNetlist(netlist)
        self.cones = {}
        for inst in netlist.latches:
            kind = netlist.kind_of(inst)
            self.cones[inst.name] = enable_cone_clocks(netlist, inst.pins[kind.clock_pin])
        self.clock_index = [self.compiled.index[c] for c in sorted(p.name for p in netlist.clock_ports)]
        self.programs = {}
        for step in self.schedule.steps:
            if step.high not in self.programs:
                transparent = [n for n, cone in self.cones.items() if not cone or cone & step.high]
                self.programs[step.high] = _StepProgram(self.compiled, transparent, step.name)

    def settle(self, program, v, M):
        if program.acyclic:
            program.sweep(v, M)
            return
        for _ in range(program.bound + 1):
            before = list(v)
            program.sweep(v, M)
            if v == before:
                return
        before = list(v)
        program.sweep(v, M)
        nets = [self.compiled.nets[i] for i, (a, b) in enumerate(zip(before, v)) if a != b]
        raise SimulationError(f"unstable transparent network: {', '.join(nets)}")

    def run(self, stimulus, nets=None):
        netlist = self.netlist
        data = {p.name for p in netlist.data_inputs}
        missing = sorted(data - set(stimulus.ports))
        if missing:
            raise SimulationError(f"stimulus lacks inputs {missing}")
        nets = tuple(nets) if nets is not None else tuple(p.name for p in netlist.output_ports)
        idx = self.compiled.index
        sample = [idx[n] for n in nets]
        inputs = [(idx[p], i) for i, p in enumerate(stimulus.ports) if p in idx]
        idle = self.programs.get(frozenset()) or _StepProgram(self.compiled, [], "idle")

        M = stimulus.mask
        v = self.compiled.values(stimulus.lanes)
        for inst in netlist.latches:
            if inst.init:
                v[idx[inst.pins[netlist.kind_of(inst).output_pin]]] = M

        rows = []
        for row in stimulus.vectors:
            for net, i in inputs:
                v[net] = row[i] & M
            for clk in self.clock_index:
                v[clk] = 0
            self.settle(idle, v, M)
            for step in self.schedule.steps:
                for clk in self.clock_index:
                    v[clk] = M if self.compiled.nets[clk] in step.high else 0
                self.settle(self.programs[step.high], v, M)
            rows.append(tuple(v[i] for i in sample))
        return Trace(nets, tuple(rows), stimulus.lanes, "post-phi2-gap")


def simulate_two_phase(netlist, stimulus, schedule=None, nets=None):
    """Simulate a two-phase latch netlist.

    Args:
        netlist (Netlist): latch-only design with both phase clock ports
        stimulus (Stimulus): values for every data input, per cycle
        schedule (PhaseSchedule): sub-step order (default Φ1, gap, Φ2, gap)
        nets: nets to sample (default: primary outputs)

    Returns:
        Trace: values sampled after the closing gap of each cycle

    Raises:
        SimulationError: "unstable transparent network" when a sub-step does
            not settle within #combinational + #latches sweeps
    """
    return TwoPhaseSimulator(netlist, schedule).run(stimulus, nets)
