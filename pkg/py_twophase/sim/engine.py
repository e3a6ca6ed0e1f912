"""
Bit-parallel evaluation of combinational logic.

Cell functions are compiled into one Python function per evaluation order,
operating on a flat list of packed ints indexed by net.
"""
import logging

import networkx as nx

from ..errors import SimulationError
from ..models.core.netlist import topo_order_comb

logger = logging.getLogger(__name__)


class CompiledNetlist:
    """Net index plus compiled sweeps over a netlist's combinational cells."""

    def __init__(self, netlist):
        self.netlist = netlist
        nets = set(netlist.nets) | set(netlist.constants)
        for inst in netlist.instances:
            nets.update(inst.pins.values())
        self.nets = sorted(nets)
        self.index = {net: i for i, net in enumerate(self.nets)}
        self.comb_order = topo_order_comb(netlist)
        self.sweep = self.compile(self.comb_order)

    def values(self, lanes=1):
        v = [0] * len(self.nets)
        v[self.index[self.netlist.const_one]] = (1 << lanes) - 1
        return v

    def _statement(self, name, mask):
        inst = self.netlist.instance(name)
        kind = self.netlist.kind_of(inst)
        if kind.is_latch:
            d = self.index[inst.pins[kind.data_pin]]
            e = self.index[inst.pins[kind.clock_pin]]
            q = self.index[inst.pins[kind.output_pin]]
            return f"v[{q}] = (v[{e}] & v[{d}]) | (({mask} ^ v[{e}]) & v[{q}])"
        names = {pin: f"v[{self.index[inst.pins[pin]]}]" for pin in kind.input_pins}
        out = self.index[inst.pins[kind.output_pin]]
        return f"v[{out}] = {kind.behavior.function.to_python(names, mask)}"

    def compile(self, order, label="sweep"):
        """Compile a sweep evaluating ``order`` once, in sequence.

        Combinational cells compute their function; latches in the order act
        as transparent-when-enabled elements.
        """
        body = [f"    {self._statement(name, 'M')}" for name in order] or ["    pass"]
        source = "def _sweep(v, M):\n" + "\n".join(body) + "\n"
        namespace = {}
        exec(compile(source, f"<{self.netlist.name}:{label}>", "exec"), namespace)
        return namespace["_sweep"]

    def dependency_graph(self, names):
        """DiGraph over ``names`` with u -> v when u drives an input of v."""
        graph = nx.DiGraph()
        graph.add_nodes_from(names)
        for name in names:
            inst = self.netlist.instance(name)
            for pin in self.netlist.kind_of(inst).input_pins:
                driver = self.netlist.driver(inst.pins[pin])
                if driver and driver[0] in graph:
                    graph.add_edge(driver[0], name)
        return graph


def eval_comb(netlist, values):
    """Evaluate combinational logic on single-bit values.

    Args:
        netlist (Netlist): design
        values (dict): net -> 0/1 for every primary input and sequential output

    Returns:
        dict: net -> 0/1 for every net, sequential outputs held

    Raises:
        SimulationError: when a source net is unassigned
    """
    sources = [p.name for p in netlist.input_ports]
    for inst in netlist.sequential_instances:
        sources.append(inst.pins[netlist.kind_of(inst).output_pin])
    missing = sorted(set(sources) - set(values))
    if missing:
        raise SimulationError(f"unassigned source net {missing[0]}")

    compiled = CompiledNetlist(netlist)
    v = compiled.values()
    for net, value in values.items():
        if net in compiled.index and not netlist.is_constant(net):
            v[compiled.index[net]] = int(value) & 1
    compiled.sweep(v, 1)
    return {net: v[i] for net, i in compiled.index.items()}
