"""
Flattened gate-level netlist model and structural validation.

A Netlist is immutable. Passes build new netlists through
``py_twophase.models.builder.NetlistBuilder``.

Conventions:
    - An input port drives the net of the same name; an output port reads
      the net of the same name.
    - Two reserved constant nets (``const_0`` / ``const_1`` by default) carry
      logic 0 and 1 and have no driver.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from ...errors import CombinationalCycleError, NetlistError
from .mixins import SerializableMixin

logger = logging.getLogger(__name__)

CONST_ZERO = "const_0"
CONST_ONE = "const_1"


@dataclass(frozen=True)
class Port(SerializableMixin):
    name: str
    dir: str  # "in" | "out"
    kind: str = "data"  # "data" | "clock"

    @property
    def is_input(self):
        return self.dir == "in"

    @property
    def is_clock(self):
        return self.kind == "clock"


@dataclass(frozen=True)
class Instance:
    name: str
    kind: str
    pins: dict
    init: int = 0

    def __repr__(self):
        return f"<Instance({self.name}: {self.kind})>"

    def net(self, pin):
        return self.pins[pin]

    def to_dict(self):
        data = {"name": self.name, "kind": self.kind, "pins": dict(sorted(self.pins.items()))}
        if self.init:
            data["init"] = 1
        return data


@dataclass(frozen=True)
class Diagnostic(SerializableMixin):
    severity: str  # "error" | "warning"
    locus: str
    message: str

    def __str__(self):
        return f"{self.severity}: {self.locus}: {self.message}"


@dataclass(frozen=True)
class Netlist:
    """A single flattened module bound to the library its cells come from."""

    name: str
    ports: tuple
    nets: frozenset
    instances: tuple  # sorted by instance name
    library: object = field(compare=False, repr=False)
    constants: tuple = (CONST_ZERO, CONST_ONE)

    def __repr__(self):
        return f"<Netlist({self.name}: {len(self.instances)} instances)>"

    # -- lookup -------------------------------------------------------------

    @cached_property
    def _by_name(self):
        return {inst.name: inst for inst in self.instances}

    def __contains__(self, name):
        return name in self._by_name

    def instance(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise NetlistError(f"no instance named {name}") from None

    def kind_of(self, inst):
        """CellKind of an instance (or instance name)."""
        if isinstance(inst, str):
            inst = self.instance(inst)
        return self.library[inst.kind]

    def port(self, name):
        for p in self.ports:
            if p.name == name:
                return p
        raise NetlistError(f"no port named {name}")

    def has_port(self, name):
        return any(p.name == name for p in self.ports)

    @property
    def input_ports(self):
        return [p for p in self.ports if p.is_input]

    @property
    def output_ports(self):
        return [p for p in self.ports if not p.is_input]

    @property
    def clock_ports(self):
        return [p for p in self.ports if p.is_input and p.is_clock]

    @property
    def data_inputs(self):
        return [p for p in self.ports if p.is_input and not p.is_clock]

    @property
    def const_zero(self):
        return self.constants[0]

    @property
    def const_one(self):
        return self.constants[1]

    def is_constant(self, net):
        return net in self.constants

    # -- classification -----------------------------------------------------

    def is_sequential(self, inst):
        return self.kind_of(inst).is_sequential

    @property
    def comb_instances(self):
        return [i for i in self.instances if self.kind_of(i).is_comb]

    @property
    def sequential_instances(self):
        return [i for i in self.instances if self.kind_of(i).is_sequential]

    @property
    def flip_flops(self):
        return [i for i in self.instances if self.kind_of(i).is_ff]

    @property
    def latches(self):
        return [i for i in self.instances if self.kind_of(i).is_latch]

    def counts(self):
        """Sequential, combinational and total cell counts."""
        seq = len(self.sequential_instances)
        return {"sequential": seq, "combinational": len(self.instances) - seq, "total": len(self.instances)}

    # -- connectivity -------------------------------------------------------

    @cached_property
    def _drivers(self):
        drivers = {}
        for p in self.input_ports:
            drivers.setdefault(p.name, []).append((None, p.name))
        for inst in self.instances:
            kind = self.library.get(inst.kind)
            if kind is None:
                continue
            for pin in kind.output_pins:
                net = inst.pins.get(pin)
                if net is not None:
                    drivers.setdefault(net, []).append((inst.name, pin))
        return drivers

    @cached_property
    def _loads(self):
        loads = {}
        for inst in self.instances:
            kind = self.library.get(inst.kind)
            inputs = set(kind.input_pins) if kind else set(inst.pins)
            for pin, net in sorted(inst.pins.items()):
                if pin in inputs:
                    loads.setdefault(net, []).append((inst.name, pin))
        return loads

    def driver(self, net):
        """The single driver of ``net`` as ``(instance, pin)``.

        Input ports are reported as ``(None, port_name)``; constant and
        undriven nets return None.
        """
        found = self._drivers.get(net)
        return found[0] if found else None

    def drivers(self, net):
        return list(self._drivers.get(net, []))

    def loads(self, net):
        """Instance pins reading ``net`` as ``(instance, pin)`` pairs."""
        return list(self._loads.get(net, []))

    def output_port_nets(self):
        return {p.name for p in self.output_ports}

    def clock_net(self, inst):
        if isinstance(inst, str):
            inst = self.instance(inst)
        return inst.pins[self.kind_of(inst).clock_pin]

    def comb_graph(self):
        """DiGraph of combinational instances; edge u -> v when u drives v."""
        graph = nx.DiGraph()
        for inst in self.comb_instances:
            graph.add_node(inst.name)
        for inst in self.comb_instances:
            out = inst.pins[self.kind_of(inst).output_pin]
            for load, _ in self.loads(out):
                if load in graph:
                    graph.add_edge(inst.name, load)
        return graph


def validate(netlist, library=None):
    """Check the structural invariants of a netlist.

    Args:
        netlist (Netlist): design to check
        library (CellLibrary): library to resolve kinds against; defaults to
            the one the netlist is bound to

    Returns:
        list[Diagnostic]: empty iff every invariant holds
    """
    library = library or netlist.library
    found = []

    seen_ports = set()
    for p in netlist.ports:
        if p.name in seen_ports:
            found.append(Diagnostic("error", p.name, "duplicate port"))
        seen_ports.add(p.name)
        if p.name in netlist.constants:
            found.append(Diagnostic("error", p.name, "port uses a reserved constant net name"))

    known = True
    for inst in netlist.instances:
        kind = library.get(inst.kind)
        if kind is None:
            found.append(Diagnostic("error", inst.name, f"unknown cell kind {inst.kind}"))
            known = False
            continue
        declared = {p.name for p in kind.pins}
        for pin in sorted(declared - set(inst.pins)):
            found.append(Diagnostic("error", f"{inst.name}.{pin}", "dangling pin"))
        for pin in sorted(set(inst.pins) - declared):
            found.append(Diagnostic("error", f"{inst.name}.{pin}", f"pin not declared by {inst.kind}"))
        if inst.init not in (0, 1):
            found.append(Diagnostic("error", inst.name, f"initial value must be 0 or 1, got {inst.init}"))
        for pin in kind.output_pins:
            if inst.pins.get(pin) in netlist.constants:
                found.append(Diagnostic("error", f"{inst.name}.{pin}", "output drives a constant net"))

    used = set(netlist._loads) | netlist.output_port_nets()
    for net in sorted(set(netlist._drivers) | used):
        drivers = netlist._drivers.get(net, [])
        if len(drivers) > 1:
            names = ", ".join(d[0] or d[1] for d in drivers)
            found.append(Diagnostic("error", net, f"multiple drivers ({names})"))
        elif not drivers and net in used and net not in netlist.constants:
            found.append(Diagnostic("error", net, "undriven net"))

    if known:
        try:
            topo_order_comb(netlist)
        except CombinationalCycleError as e:
            found.append(Diagnostic("error", ",".join(e.instances), str(e)))

    if known:
        for inst in netlist.sequential_instances:
            pin = netlist.kind_of(inst).clock_pin
            for gate in clock_path_inverters(netlist, inst):
                found.append(Diagnostic("warning", f"{inst.name}.{pin}", f"inverter {gate} on the clock path"))

    for d in found:
        logger.debug(f"validate {netlist.name}: {d}")
    return found


def topo_order_comb(netlist):
    """Combinational instances in dependency order.

    Sequential outputs, primary inputs and constants act as sources. Ties are
    broken by instance name so the order is deterministic.

    Raises:
        CombinationalCycleError: naming the instances on one cycle
    """
    graph = netlist.comb_graph()
    try:
        return list(nx.lexicographical_topological_sort(graph))
    except nx.NetworkXUnfeasible:
        cycle = nx.find_cycle(graph)
        raise CombinationalCycleError(sorted({u for u, _ in cycle})) from None


def clock_path_inverters(netlist, inst):
    """Inverting gates between a sequential element's clock pin and a clock port.

    The walk follows single-input gates, and through wider gates the one input
    whose cone reaches a clock port. It stops at ports, sequential outputs and
    gates with zero or several clock-side inputs.
    """
    clocks = {p.name for p in netlist.clock_ports}
    net = inst.pins[netlist.kind_of(inst).clock_pin]
    found = []
    seen = set()
    while net not in seen and net not in clocks:
        seen.add(net)
        driver = netlist.driver(net)
        if driver is None or driver[0] is None:
            break
        gate = netlist.instance(driver[0])
        kind = netlist.kind_of(gate)
        if not kind.is_comb:
            break
        if kind.behavior.function.op == "not":
            found.append(gate.name)
        side = [p for p in kind.input_pins if _reaches_clock(netlist, gate.pins[p], clocks)]
        if len(side) != 1:
            break
        net = gate.pins[side[0]]
    return found


def _reaches_clock(netlist, net, clocks):
    stack = [net]
    seen = set()
    while stack:
        current = stack.pop()
        if current in clocks:
            return True
        if current in seen:
            continue
        seen.add(current)
        driver = netlist.driver(current)
        if driver is None or driver[0] is None:
            continue
        kind = netlist.kind_of(driver[0])
        if kind.is_comb:
            stack.extend(netlist.instance(driver[0]).pins[p] for p in kind.input_pins)
    return False
