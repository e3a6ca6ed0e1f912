"""
Final technology mapping of base flip-flops onto positive-enable latches.
"""
import logging

from ..errors import TransformError
from ..models.builder import NetlistBuilder
from ..models.core.library import BASE_DFF, LATCH
from ..models.core.netlist import Instance
from .trace import PhaseTag, TransformTrace

logger = logging.getLogger(__name__)


def map_dff_to_latch(netlist, phases, plan):
    """Replace every ``_DFF_P_`` 1:1 by ``_DLATCH_P_``.

    Args:
        netlist (Netlist): design whose sequential cells are all base flip-flops
        phases: TransformTrace or mapping instance name -> PhaseTag
        plan (TransformPlan): phase clock names

    Returns:
        Netlist: latch netlist; a latch clocked straight from a port is wired
        to its phase's clock, a gated latch keeps its gate output

    Raises:
        TransformError: "un-lowered variant" for any other flip-flop kind, or a
            flip-flop without an assigned phase
    """
    if isinstance(phases, TransformTrace):
        phases = phases.phases()
    library = netlist.library
    if LATCH not in library:
        raise TransformError(f"library lacks {LATCH}")
    latch = library[LATCH]
    clock_ports = {p.name for p in netlist.clock_ports}

    builder = NetlistBuilder.from_netlist(netlist)
    mapped = 0
    for inst in netlist.sequential_instances:
        kind = netlist.kind_of(inst)
        if kind.is_latch:
            continue
        if kind.name != BASE_DFF:
            raise TransformError(f"un-lowered variant: {inst.name} is {kind.name}")
        if inst.name not in phases:
            raise TransformError(f"no phase assigned to {inst.name}")
        clock = inst.pins[kind.clock_pin]
        if clock in clock_ports:
            clock = plan.clock_for(PhaseTag(phases[inst.name]))
        pins = {
            latch.data_pin: inst.pins[kind.data_pin],
            latch.clock_pin: clock,
            latch.output_pin: inst.pins[kind.output_pin],
        }
        builder.replace_instance(Instance(inst.name, LATCH, pins, inst.init))
        mapped += 1

    result = builder.build()
    logger.info(f"map_dff_to_latch: {mapped} flip-flops -> {LATCH}")
    return result
