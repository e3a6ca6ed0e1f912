"""
Phase assignment for a retimed base flip-flop netlist.
"""
import logging
from collections import deque

import networkx as nx

from ..errors import RetimeError
from ..models.core.library import BASE_DFF
from ..transform.trace import PhaseTag
from ..verify.latch_graph import comb_cone, first_reachable

logger = logging.getLogger(__name__)

INPUTS = "$inputs"
OUTPUTS = "$outputs"


def register_parity_graph(netlist):
    """Undirected graph of registers adjacent through combinational logic.

    Two extra nodes stand for the primary inputs and the primary outputs.
    """
    graph = nx.Graph()
    graph.add_nodes_from([INPUTS, OUTPUTS])
    outputs = netlist.output_port_nets()
    for inst in netlist.sequential_instances:
        graph.add_node(inst.name)
    for p in netlist.data_inputs:
        for target in first_reachable(netlist, p.name):
            graph.add_edge(INPUTS, target)
    for inst in netlist.sequential_instances:
        q = inst.pins[netlist.kind_of(inst).output_pin]
        for target in first_reachable(netlist, q):
            graph.add_edge(inst.name, target)
        if comb_cone(netlist, q) & outputs:
            graph.add_edge(inst.name, OUTPUTS)
    return graph


def assign_phases(netlist):
    """Two-color the registers so adjacent registers get opposite phases.

    Registers fed from primary inputs get Φ1 and registers driving primary
    outputs get Φ2; components touching neither start from their first
    register (by name) as Φ1.

    Returns:
        dict: register name -> PhaseTag

    Raises:
        RetimeError: a register is not a base flip-flop, or "odd register
            parity" with a path closing an odd cycle
    """
    for inst in netlist.sequential_instances:
        if inst.kind != BASE_DFF:
            raise RetimeError(f"assign_phases: {inst.name} is {inst.kind}, expected {BASE_DFF}", vertex=inst.name)

    graph = register_parity_graph(netlist)
    color = {INPUTS: PhaseTag.PHI2, OUTPUTS: PhaseTag.PHI1}
    parent = {INPUTS: None, OUTPUTS: None}
    seeds = [INPUTS, OUTPUTS] + sorted(n for n in graph if n not in (INPUTS, OUTPUTS))
    queue = deque()
    for seed in seeds:
        if seed not in color:
            color[seed] = PhaseTag.PHI1
            parent[seed] = None
        queue.append(seed)
        while queue:
            u = queue.popleft()
            for v in sorted(graph[u]):
                if v not in color:
                    color[v] = color[u].opposite
                    parent[v] = u
                    queue.append(v)
                elif color[v] is color[u]:
                    path = _chain(parent, u)[::-1] + _chain(parent, v)
                    raise RetimeError(f"odd register parity: {' -> '.join(path)}", vertex=u)

    phases = {n: color[n] for n in sorted(graph) if n not in (INPUTS, OUTPUTS)}
    logger.info(
        f"assign_phases: {sum(p is PhaseTag.PHI1 for p in phases.values())} phi1, "
        f"{sum(p is PhaseTag.PHI2 for p in phases.values())} phi2"
    )
    return phases


def _chain(parent, node):
    chain = []
    while node is not None:
        chain.append(node)
        node = parent[node]
    return chain
