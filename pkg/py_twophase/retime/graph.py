"""
Retiming graph extracted from a base flip-flop netlist.

Vertices are the combinational cells (clock-network gates excluded) plus a
host standing for the environment. The host has a source side (primary
inputs, outputs of registers that are not retimed) and a sink side (primary
outputs and inputs of non-retimed registers); both sides share one lag fixed
at 0 and arrival times do not propagate through it.

Constant nets, and cells computing a constant from them, are not part of the
graph: a constant pin is recorded on its vertex and never carries registers.

An edge runs from a source net to one sink pin and records the ordered chain
of retimable registers between them, source side first.
"""
import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..models.core.library import BASE_DFF
from ..models.core.netlist import topo_order_comb
from ..transform.clocks import is_clock_gate

logger = logging.getLogger(__name__)

HOST = "$host"


@dataclass(frozen=True)
class RetimeEdge:
    tail: str  # vertex name or HOST
    net: str  # source net
    head: str  # vertex name or HOST
    sink: tuple  # (instance, pin) or (None, output port)
    registers: tuple  # register names, source side first

    @property
    def weight(self):
        return len(self.registers)


class RetimeGraph:
    def __init__(self, netlist, vertices, delay, edges, registers, fingerprint, frozen, fixed=None):
        self.netlist = netlist
        self.fixed = fixed or {}  # vertex -> {pin: constant value}
        self.vertices = vertices  # sorted combinational vertex names
        self.delay = delay
        self.edges = edges
        self.registers = registers  # retimable register name -> init
        self.fingerprint = fingerprint  # (kind, clock net) shared by every retimable register
        self.frozen = frozen  # sequential instances merged into the host

    def __repr__(self):
        return f"<RetimeGraph({len(self.vertices)} vertices, {len(self.edges)} edges)>"

    @property
    def all_vertices(self):
        return [HOST] + self.vertices

    def in_edges(self, v):
        return [e for e in self.edges if e.head == v]

    def out_edges(self, v):
        return [e for e in self.edges if e.tail == v]

    def retimed_weight(self, e, lags):
        return e.weight + lags.get(e.head, 0) - lags.get(e.tail, 0)

    def is_legal(self, lags):
        return lags.get(HOST, 0) == 0 and all(self.retimed_weight(e, lags) >= 0 for e in self.edges)

    def register_count(self, lags=None):
        """Registers after retiming, sharing common prefixes along each source net."""
        lags = lags or {}
        depth = {}
        for e in self.edges:
            key = (e.tail, e.net)
            depth[key] = max(depth.get(key, 0), self.retimed_weight(e, lags))
        return sum(depth.values())

    def arrivals(self, lags=None):
        """Arrival time at each vertex output over register-free paths.

        Returns:
            tuple[dict, dict, float]: arrival per vertex, predecessor per
            vertex, and the arrival at the host sink
        """
        lags = lags or {}
        preds = {v: [] for v in self.vertices}
        sink_preds = []
        for e in self.edges:
            if self.retimed_weight(e, lags) != 0 or e.tail == HOST:
                continue
            if e.head == HOST:
                sink_preds.append(e.tail)
            else:
                preds[e.head].append(e.tail)
        arrival = {}
        parent = {}
        for v in self._topo(preds):
            best, via = 0.0, None
            for u in preds[v]:
                if arrival[u] > best or via is None and arrival[u] >= best:
                    best, via = arrival[u], u
            arrival[v] = best + self.delay[v]
            parent[v] = via
        sink = max((arrival[u] for u in sink_preds), default=0.0)
        return arrival, parent, sink

    def _topo(self, preds):
        indegree = {v: len(p) for v, p in preds.items()}
        succs = {v: [] for v in preds}
        for v, p in preds.items():
            for u in p:
                succs[u].append(v)
        ready = sorted(v for v, d in indegree.items() if d == 0)
        order = []
        while ready:
            v = ready.pop()
            order.append(v)
            for w in succs[v]:
                indegree[w] -= 1
                if indegree[w] == 0:
                    ready.append(w)
        if len(order) != len(preds):
            raise ValueError("retimed graph has a register-free cycle")
        return order

    def period(self, lags=None):
        arrival, _, sink = self.arrivals(lags)
        return max([sink, *arrival.values()], default=0.0)

    def critical_path(self, lags=None):
        """Longest register-free path as (delay, [vertex, ...])."""
        arrival, parent, _ = self.arrivals(lags)
        if not arrival:
            return 0.0, []
        end = max(sorted(arrival), key=lambda v: arrival[v])
        path = [end]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return arrival[end], path[::-1]

    def wd_matrices(self):
        """Minimum register count W and maximum delay D between every vertex pair.

        Index 0 is the host source and index -1 the host sink; vertices sit in
        between in sorted order. Unreachable pairs have W = inf.
        """
        names = ["$src", *self.vertices, "$sink"]
        index = {v: i + 1 for i, v in enumerate(self.vertices)}
        n = len(names)
        delay = np.array([0.0, *(self.delay[v] for v in self.vertices), 0.0])
        big = float(delay.sum()) + 1.0
        x = np.full((n, n), np.inf)
        np.fill_diagonal(x, 0.0)
        for e in self.edges:
            u = 0 if e.tail == HOST else index[e.tail]
            v = n - 1 if e.head == HOST else index[e.head]
            x[u, v] = min(x[u, v], e.weight * big - delay[u])
        for k in range(n):
            x = np.minimum(x, x[:, k, None] + x[None, k, :])
        with np.errstate(invalid="ignore"):
            w = np.ceil(x / big - 1e-9)
            d = delay[None, :] + w * big - x
        d[np.isinf(x)] = -np.inf
        return names, w, d


def build_retime_graph(netlist, library=None):
    """Extract the retiming graph of a base flip-flop netlist.

    Only ``_DFF_P_`` registers clocked straight from a clock port, with the
    most common (kind, clock net) fingerprint, are retimable; every other
    sequential instance is merged into the host.

    Args:
        netlist (Netlist): validated design
        library (CellLibrary): delays source (default: the netlist's library)

    Returns:
        RetimeGraph
    """
    library = library or netlist.library
    clock_ports = {p.name for p in netlist.clock_ports}

    candidates = {}
    for inst in netlist.sequential_instances:
        kind = library[inst.kind]
        clock = inst.pins[kind.clock_pin]
        if inst.kind == BASE_DFF and clock in clock_ports:
            candidates[inst.name] = (inst.kind, clock)
    fingerprint = None
    if candidates:
        counts = Counter(candidates.values())
        fingerprint = max(sorted(counts), key=lambda fp: counts[fp])
    retimable = {n for n, fp in candidates.items() if fp == fingerprint}

    values = constant_nets(netlist, library)
    vertices = sorted(
        i.name
        for i in netlist.comb_instances
        if not is_clock_gate(netlist, i) and i.pins[library[i.kind].output_pin] not in values
    )
    delay = {v: library[netlist.instance(v).kind].timing.delay_max for v in vertices}
    fixed = {}
    for v in vertices:
        inst = netlist.instance(v)
        pins = {p: values[inst.pins[p]] for p in library[inst.kind].input_pins if inst.pins[p] in values}
        if pins:
            fixed[v] = pins

    while True:
        frozen = sorted(i.name for i in netlist.sequential_instances if i.name not in retimable)
        edges = _walk_edges(netlist, library, vertices, retimable, frozen)
        covered = {r for e in edges for r in e.registers}
        if covered == retimable:
            break
        # register-only loops are unreachable from any source
        retimable = covered

    registers = {name: netlist.instance(name).init for name in sorted(retimable)}
    graph = RetimeGraph(netlist, vertices, delay, edges, registers, fingerprint, frozen, fixed)
    logger.info(
        f"build_retime_graph: {len(vertices)} vertices, {len(edges)} edges, "
        f"{len(retimable)} retimable registers, {len(frozen)} frozen"
    )
    return graph


def _walk_edges(netlist, library, vertices, retimable, frozen):
    vertex_set = set(vertices)
    outputs = netlist.output_port_nets()
    sources = []  # (tail, net)
    for v in vertices:
        inst = netlist.instance(v)
        sources.append((v, inst.pins[library[inst.kind].output_pin]))
    for p in netlist.data_inputs:
        sources.append((HOST, p.name))
    for name in frozen:
        inst = netlist.instance(name)
        sources.append((HOST, inst.pins[library[inst.kind].output_pin]))

    edges = []

    def walk(tail, source, net, chain):
        if net in outputs:
            edges.append(RetimeEdge(tail, source, HOST, (None, net), tuple(chain)))
        for name, pin in netlist.loads(net):
            inst = netlist.instance(name)
            kind = library[inst.kind]
            if name in retimable:
                if pin == kind.data_pin:
                    walk(tail, source, inst.pins[kind.output_pin], chain + [name])
                continue
            head = name if name in vertex_set else HOST
            edges.append(RetimeEdge(tail, source, head, (name, pin), tuple(chain)))

    for tail, net in sources:
        walk(tail, net, net, [])
    return edges


def constant_nets(netlist, library=None):
    """Nets with a fixed value: the constant ties and outputs of cells fed only by them.

    Returns:
        dict: net -> 0 or 1
    """
    library = library or netlist.library
    values = {netlist.const_zero: 0, netlist.const_one: 1}
    for name in topo_order_comb(netlist):
        inst = netlist.instance(name)
        kind = library[inst.kind]
        env = {p: values.get(inst.pins[p]) for p in kind.input_pins}
        if all(v is not None for v in env.values()):
            values[inst.pins[kind.output_pin]] = kind.behavior.function.evaluate(env)
    return values
