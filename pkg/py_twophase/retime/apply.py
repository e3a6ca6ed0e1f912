"""
Realize a lag assignment on the netlist.

Registers are moved one elementary step at a time so that initial values can
be carried along: a forward move evaluates the crossed gate on the initial
values it consumes, a backward move justifies the consumed value through the
gate's truth table. The surviving per-edge chains are then rebuilt as shared
register trees, one per source net.
"""
import logging
from collections import deque

from ..errors import RetimeError
from ..models.builder import NetlistBuilder
from ..models.core.logic import satisfying_assignments
from ..models.core.mixins import sanitize
from ..transform.trace import PhaseTag, Role
from .graph import HOST

logger = logging.getLogger(__name__)


def apply_retiming(netlist, graph, lags, trace=None):
    """Move registers so each edge carries w(e) + r(head) - r(tail) of them.

    Args:
        netlist (Netlist): the netlist ``graph`` was built from
        graph (RetimeGraph): retiming graph
        lags (LagAssignment | dict): lag per vertex, host 0
        trace (TransformTrace): optional trace to update

    Returns:
        tuple[Netlist, TransformTrace]

    Raises:
        RetimeError: lags illegal, or an initial value cannot be justified
            backwards across a vertex
    """
    r = dict(getattr(lags, "lags", lags))
    r[HOST] = 0
    if not any(r.values()):
        return netlist, trace
    if not graph.is_legal(r):
        raise RetimeError("lags violate register non-negativity")

    chains = _move_registers(graph, r)
    builder = NetlistBuilder.from_netlist(netlist)
    for name in graph.registers:
        builder.remove_instance(name)
    created = _rebuild(builder, graph, chains)
    result = builder.build(prune=True)

    if trace is not None:
        owners = _owners(graph, created)
        origin = {reg: trace.origin_of(reg) or reg for reg in graph.registers}
        trace = trace.replace({name: None for name in graph.registers})
        for name in sorted(created):
            trace.add(origin.get(owners[name], owners[name]), name, Role.MAIN, PhaseTag.PHI1)
    logger.info(
        f"apply_retiming: {len(graph.registers)} registers -> {len(created)} "
        f"({result.counts()['total']} cells)"
    )
    return result, trace


def _move_registers(graph, r):
    """Per-edge deques of initial values after the elementary moves."""
    chains = [deque(graph.registers[n] for n in e.registers) for e in graph.edges]
    ins = {v: [] for v in graph.vertices}
    outs = {v: [] for v in graph.vertices}
    for i, e in enumerate(graph.edges):
        if e.head != HOST:
            ins[e.head].append(i)
        if e.tail != HOST:
            outs[e.tail].append(i)
    library = graph.netlist.library
    current = {v: 0 for v in graph.vertices}

    while any(current[v] != r.get(v, 0) for v in graph.vertices):
        progress = False
        for v in graph.vertices:
            inst = graph.netlist.instance(v)
            kind = library[inst.kind]
            pin_of = {i: graph.edges[i].sink[1] for i in ins[v]}
            fixed = graph.fixed.get(v, {})
            while current[v] > r.get(v, 0) and all(chains[i] for i in ins[v]):
                env = {**fixed, **{pin_of[i]: chains[i].pop() for i in ins[v]}}
                value = kind.behavior.function.evaluate(env)
                for i in outs[v]:
                    chains[i].appendleft(value)
                current[v] -= 1
                progress = True
            while current[v] < r.get(v, 0) and all(chains[i] for i in outs[v]):
                values = {chains[i].popleft() for i in outs[v]}
                if len(values) > 1:
                    raise RetimeError(f"ambiguous initial value behind {v}", vertex=v)
                pins = list(kind.input_pins)
                value = values.pop() if values else 0
                choices = [
                    bits
                    for bits in satisfying_assignments(kind.behavior.function, pins, value)
                    if all(fixed[p] == b for p, b in zip(pins, bits) if p in fixed)
                ]
                if not choices:
                    raise RetimeError(f"initial value {value} unreachable through {v}", vertex=v)
                assignment = dict(zip(pins, choices[0]))
                for i in ins[v]:
                    chains[i].append(assignment[pin_of[i]])
                current[v] += 1
                progress = True
        if not progress:
            stuck = sorted(v for v in graph.vertices if current[v] != r.get(v, 0))
            raise RetimeError(f"no legal register move left at {', '.join(stuck)}", vertex=stuck[0])
    return chains


def _rebuild(builder, graph, chains):
    """Insert shared register trees and rewire every edge sink.

    Returns:
        dict: new register name -> indices of the edges it serves
    """
    netlist = graph.netlist
    outputs = netlist.output_port_nets()
    inputs = {p.name for p in netlist.input_ports}
    kind, clock = graph.fingerprint or (None, None)
    cell = netlist.library[kind] if kind else None
    source = {}

    # a port net that now needs registers in front of it frees its name first
    for i, e in enumerate(graph.edges):
        port = e.sink[1] if e.sink[0] is None else None
        if port and chains[i] and e.net == port and e.net not in source:
            fresh = builder.fresh_net(f"{sanitize(e.net)}__pre")
            builder.rename_net(e.net, fresh)
            source[e.net] = fresh

    def src(e):
        return source.get(e.net, e.net)

    # trie nodes keyed by (tail, net, init prefix); ports ending on a shared node split it
    endings = {}
    for i, e in enumerate(graph.edges):
        if e.sink[0] is None and chains[i]:
            endings.setdefault((e.tail, e.net, tuple(chains[i])), []).append(e.sink[1])

    def node_key(i, depth):
        e = graph.edges[i]
        key = (e.tail, e.net, tuple(chains[i])[:depth])
        if depth == len(chains[i]) and e.sink[0] is None and len(endings[key]) > 1:
            key = key + (e.sink[1],)
        return key

    # weight-0 paths into output ports take over the source net's name
    claimed = {}
    for i, e in enumerate(graph.edges):
        if e.sink[0] is not None or chains[i]:
            continue
        port, net = e.sink[1], src(e)
        if net == port:
            continue
        if net in inputs or net in builder.constants or net in outputs:
            raise RetimeError(f"output {port} would need a feed-through from {net}")
        if net in claimed:
            raise RetimeError(f"outputs {claimed[net]} and {port} would share net {net}")
        claimed[net] = port
        builder.rename_net(net, port)
        source[e.net] = port

    q_net = {}
    created = {}
    for i, e in enumerate(graph.edges):
        for depth in range(1, len(chains[i]) + 1):
            key = node_key(i, depth)
            if key in q_net:
                created[q_net[key][0]].append(i)
                continue
            base = e.tail if e.tail != HOST else sanitize(e.net)
            name = builder.fresh_instance_name(f"{base}__rt{depth}")
            d = src(e) if depth == 1 else q_net[node_key(i, depth - 1)][1]
            ports = endings.get(key, []) if len(key) == 3 else []
            port = e.sink[1] if len(key) == 4 else (ports[0] if len(ports) == 1 else None)
            q = port if port else builder.fresh_net(f"{name}_q")
            pins = {cell.data_pin: d, cell.clock_pin: clock, cell.output_pin: q}
            builder.add_instance(name, kind, pins, chains[i][depth - 1])
            q_net[key] = (name, q)
            created[name] = [i]

    for i, e in enumerate(graph.edges):
        net = q_net[node_key(i, len(chains[i]))][1] if chains[i] else src(e)
        if e.sink[0] is None:
            if net != e.sink[1]:
                raise RetimeError(f"output {e.sink[1]} left driven by {net}")
            continue
        builder.connect(e.sink[0], e.sink[1], net)
    return created


def _owners(graph, created):
    """First original register on the edges each new register serves."""
    owners = {}
    for name, edge_ids in created.items():
        owner = None
        for i in edge_ids:
            e = graph.edges[i]
            if e.registers:
                owner = e.registers[0]
                break
        if owner is None:
            e = graph.edges[edge_ids[0]]
            owner = e.tail if e.tail != HOST else e.net
        owners[name] = owner
    return owners
