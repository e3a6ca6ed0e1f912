"""
Latch graph construction and the two-coloring check.

Each sequential element is colored by the phase clock its enable (or clock)
pin traces back to. Edges join a source element to every sequential element
first reached from its output through combinational logic, on any input pin.
Along a valid two-phase design every edge joins opposite colors.
"""
import logging
from dataclasses import dataclass, field

import networkx as nx

from ..config import config
from ..errors import ClockDomainError
from ..models.builder import NetlistBuilder
from ..models.core.mixins import SerializableMixin
from ..sim.two_phase import enable_cone_clocks
from ..transform.trace import PhaseTag

logger = logging.getLogger(__name__)

SAME_COLOR = "same-color-edge"
UNCOLORABLE = "uncolorable-clock"
MIXED_CONE = "mixed-cone"


def first_reachable(netlist, net):
    """Sequential elements first reached forward from ``net``.

    Nets are visited at most once, so feedback through combinational logic
    terminates. Traversal stops at every sequential input pin.

    Returns:
        dict: instance -> (pin, witness), witness being the nets from ``net``
        to the pin, in order
    """
    found = {}
    parent = {net: None}
    stack = [net]
    while stack:
        current = stack.pop()
        for name, pin in netlist.loads(current):
            kind = netlist.kind_of(name)
            if kind.is_sequential:
                if name not in found:
                    found[name] = (pin, _witness(parent, current))
                continue
            out = netlist.instance(name).pins[kind.output_pin]
            if out not in parent:
                parent[out] = current
                stack.append(out)
    return found


def comb_cone(netlist, net):
    """Nets reachable forward from ``net`` through combinational cells only."""
    cone = {net}
    stack = [net]
    while stack:
        current = stack.pop()
        for name, _ in netlist.loads(current):
            kind = netlist.kind_of(name)
            if kind.is_comb:
                out = netlist.instance(name).pins[kind.output_pin]
                if out not in cone:
                    cone.add(out)
                    stack.append(out)
    return cone


def _witness(parent, net):
    path = []
    while net is not None:
        path.append(net)
        net = parent[net]
    return tuple(reversed(path))


def clock_domain_of(netlist, instance, clk1=None, clk2=None):
    """Phase of a sequential element, traced back from its clock pin.

    The walk passes buffers, inverters and AND gates through the single input
    whose cone reaches a clock port. An inverter does not stop the walk;
    ``validate`` reports it as a warning diagnostic.

    Raises:
        ClockDomainError: "unresolvable clock domain" when the walk reaches
            no clock port, another port, or a gate with zero or several
            clock-side inputs
    """
    clk1 = clk1 or config.clk1_name
    clk2 = clk2 or config.clk2_name
    if isinstance(instance, str):
        instance = netlist.instance(instance)
    kind = netlist.kind_of(instance)
    net = instance.pins[kind.clock_pin]
    seen = set()
    while net not in seen:
        seen.add(net)
        if net == clk1:
            return PhaseTag.PHI1
        if net == clk2:
            return PhaseTag.PHI2
        driver = netlist.driver(net)
        if driver is None or driver[0] is None:
            raise ClockDomainError(instance.name, f"unresolvable clock domain: {net} is not a phase clock")
        gate = netlist.instance(driver[0])
        gate_kind = netlist.kind_of(gate)
        function = gate_kind.behavior.function
        if not gate_kind.is_comb or not (function.op == "and" or len(gate_kind.input_pins) == 1):
            raise ClockDomainError(
                instance.name, f"unresolvable clock domain: clock passes through {gate.name} ({gate.kind})"
            )
        clock_side = [p for p in gate_kind.input_pins if enable_cone_clocks(netlist, gate.pins[p])]
        if len(clock_side) != 1:
            raise ClockDomainError(
                instance.name,
                f"unresolvable clock domain: {gate.name} has {len(clock_side)} clock-side inputs",
            )
        net = gate.pins[clock_side[0]]
    raise ClockDomainError(instance.name, f"unresolvable clock domain: loop at {net}")


@dataclass(frozen=True)
class Violation(SerializableMixin):
    kind: str
    source: str  # instance, or edge tail
    target: str = None  # edge head
    path: tuple = ()

    @property
    def locus(self):
        return (self.source, self.target) if self.target else self.source

    def to_dict(self):
        data = {"kind": self.kind, "from": self.source, "path": list(self.path)}
        if self.target is not None:
            data["to"] = self.target
        return data

    def __str__(self):
        where = f"{self.source} -> {self.target}" if self.target else self.source
        return f"{self.kind} at {where}" + (f" via {' -> '.join(self.path)}" if self.path else "")


@dataclass
class LatchGraph:
    colors: dict = field(default_factory=dict)  # instance -> PhaseTag, None when uncolorable
    edges: dict = field(default_factory=dict)  # (u, v) -> witness nets

    @property
    def nodes(self):
        return sorted(self.colors)

    def to_networkx(self):
        graph = nx.DiGraph()
        for name, color in self.colors.items():
            graph.add_node(name, color=color)
        for (u, v), path in self.edges.items():
            graph.add_edge(u, v, path=path)
        return graph


def build_latch_graph(netlist, clk1=None, clk2=None):
    """Color every sequential element and connect first-reachable pairs.

    Returns:
        tuple[LatchGraph, list[Violation]]: clock violations first, then
        same-color edges, each group sorted
    """
    graph = LatchGraph()
    clock_violations = []
    for inst in netlist.sequential_instances:
        try:
            graph.colors[inst.name] = clock_domain_of(netlist, inst, clk1, clk2)
        except ClockDomainError as e:
            graph.colors[inst.name] = None
            clock = inst.pins[netlist.kind_of(inst).clock_pin]
            kind = MIXED_CONE if len(enable_cone_clocks(netlist, clock)) > 1 else UNCOLORABLE
            logger.warning(str(e))
            clock_violations.append(Violation(kind, inst.name, path=(clock,)))

    for inst in netlist.sequential_instances:
        q = inst.pins[netlist.kind_of(inst).output_pin]
        for target, (_, witness) in sorted(first_reachable(netlist, q).items()):
            graph.edges[(inst.name, target)] = witness

    violations = sorted(clock_violations, key=lambda v: v.source) + check_two_color(graph)
    logger.info(
        f"build_latch_graph: {len(graph.colors)} nodes, {len(graph.edges)} edges, "
        f"{len(violations)} violations"
    )
    return graph, violations


def check_two_color(graph):
    """Same-color edges of ``graph``, sorted by edge."""
    found = []
    for (u, v) in sorted(graph.edges):
        cu, cv = graph.colors.get(u), graph.colors.get(v)
        if cu is not None and cu == cv:
            found.append(Violation(SAME_COLOR, u, v, graph.edges[(u, v)]))
    return found


def mutate_phase(netlist, instance, clk1=None, clk2=None):
    """Move one sequential element to the opposite phase clock.

    An element behind a clock gate gets a private copy of the gate on the
    other clock, so no other element changes phase.
    """
    clk1 = clk1 or config.clk1_name
    clk2 = clk2 or config.clk2_name
    inst = netlist.instance(instance)
    kind = netlist.kind_of(inst)
    phase = clock_domain_of(netlist, inst, clk1, clk2)
    other = clk2 if phase is PhaseTag.PHI1 else clk1
    builder = NetlistBuilder.from_netlist(netlist)
    net = inst.pins[kind.clock_pin]
    if net in (clk1, clk2):
        builder.connect(inst.name, kind.clock_pin, other)
        return builder.build()
    gate = netlist.instance(netlist.driver(net)[0])
    gate_kind = netlist.kind_of(gate)
    pins = {p: (other if gate.pins[p] in (clk1, clk2) else n) for p, n in gate.pins.items()}
    name = builder.fresh_instance_name(f"{gate.name}__flip")
    pins[gate_kind.output_pin] = builder.fresh_net(f"{name}_y")
    builder.add_instance(name, gate.kind, pins)
    builder.connect(inst.name, kind.clock_pin, pins[gate_kind.output_pin])
    return builder.build(prune=True)
