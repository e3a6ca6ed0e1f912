"""
Clock port initialization and clock rewiring.
"""
import logging

from ..errors import TransformError
from ..models.builder import NetlistBuilder

logger = logging.getLogger(__name__)


def clock_loads_only(netlist, net):
    """True when every load of ``net`` is a sequential clock pin or a clock gate."""
    loads = netlist.loads(net)
    if not loads or net in netlist.output_port_nets():
        return False
    for name, pin in loads:
        kind = netlist.kind_of(name)
        if kind.is_sequential:
            if pin != kind.clock_pin:
                return False
        elif not is_clock_gate(netlist, netlist.instance(name)):
            return False
    return True


def is_clock_gate(netlist, inst):
    """A combinational cell that only feeds clock pins (directly or via gates)."""
    kind = netlist.kind_of(inst)
    if not kind.is_comb:
        return False
    return clock_loads_only(netlist, inst.pins[kind.output_pin])


def clock_side_pin(netlist, inst):
    """Input pin of a clock gate that is wired straight to a clock port."""
    kind = netlist.kind_of(inst)
    clocks = {p.name for p in netlist.clock_ports}
    found = [pin for pin in kind.input_pins if inst.pins[pin] in clocks]
    if len(found) != 1:
        raise TransformError(f"{inst.name}: cannot identify the clock-side input of the gate")
    return found[0]


def init_clock_ports(netlist, plan):
    """Rename the design's clock port to ``plan.clk1_name`` and add ``plan.clk2_name``.

    Args:
        netlist (Netlist): single-clock flip-flop design
        plan (TransformPlan): clock names

    Returns:
        Netlist: design with both clock ports; every clock pin still on clk1

    Raises:
        TransformError: "unsupported clock topology" unless exactly one clock
            port exists, or "clock used as data" when the clock reaches a
            non-clock pin or an output port
    """
    clocks = netlist.clock_ports
    if len(clocks) != 1:
        raise TransformError(
            f"unsupported clock topology: expected one clock port, found {len(clocks)}"
            + (f" ({', '.join(p.name for p in clocks)})" if clocks else "")
        )
    clock = clocks[0].name
    if plan.clock_port_original and plan.clock_port_original != clock:
        raise TransformError(f"unsupported clock topology: clock port is {clock}, not {plan.clock_port_original}")

    if clock in netlist.output_port_nets():
        raise TransformError(f"clock used as data: {clock} drives an output port")
    for name, pin in netlist.loads(clock):
        kind = netlist.kind_of(name)
        if not kind.is_sequential or pin != kind.clock_pin:
            raise TransformError(f"clock used as data: {clock} reaches {name}.{pin}")

    taken = set(netlist.nets) | {p.name for p in netlist.ports}
    for new in (plan.clk1_name, plan.clk2_name):
        if new != clock and new in taken:
            raise TransformError(f"clock name {new} already used in {netlist.name}")

    builder = NetlistBuilder.from_netlist(netlist)
    builder.rename_port(clock, plan.clk1_name)
    builder.add_port(plan.clk2_name, "in", "clock")
    logger.info(f"init_clock_ports: {clock} -> {plan.clk1_name}, added {plan.clk2_name}")
    return builder.build()


def connect_clk(netlist, instances, clock_port):
    """Drive the clock of each selected instance from ``clock_port``.

    Sequential instances clocked straight from a port are rewired directly;
    those behind a clock gate get the gate's clock-side input rewired.
    Selected clock gates have their clock-side input rewired. No other pin
    changes.

    Raises:
        TransformError: if the port is missing or a selected instance is
            neither sequential nor a clock gate
    """
    if not netlist.has_port(clock_port) or not netlist.port(clock_port).is_input:
        raise TransformError(f"connect_clk: no input port {clock_port}")
    names = sorted(set(instances))
    if not names:
        return netlist

    clock_nets = {p.name for p in netlist.clock_ports}
    builder = NetlistBuilder.from_netlist(netlist)
    for name in names:
        inst = netlist.instance(name)
        kind = netlist.kind_of(inst)
        if kind.is_sequential:
            net = inst.pins[kind.clock_pin]
            if net in clock_nets:
                builder.connect(name, kind.clock_pin, clock_port)
                continue
            driver = netlist.driver(net)
            if driver is None or driver[0] is None or not is_clock_gate(netlist, netlist.instance(driver[0])):
                raise TransformError(f"connect_clk: clock of {name} is neither a clock port nor a clock gate")
            gate = netlist.instance(driver[0])
            builder.connect(gate.name, clock_side_pin(netlist, gate), clock_port)
        elif is_clock_gate(netlist, inst):
            builder.connect(name, clock_side_pin(netlist, inst), clock_port)
        else:
            raise TransformError(f"connect_clk: {name} ({inst.kind}) is not sequential or a clock gate")
    logger.debug(f"connect_clk: {len(names)} instances -> {clock_port}")
    return builder.build()
