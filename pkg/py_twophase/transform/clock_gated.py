"""
Clock-gated two-phase template.

Every flip-flop becomes a base pair B__phi1 -> B__phi2. An enable gates the
clock of each stage through an AND2; sync reset/set become a mux to the
constant on each stage's data input.
"""
import logging

from ..errors import TransformError
from ..models.builder import NetlistBuilder
from ..models.core.library import BASE_DFF, Control
from .recirc import MUX, ControlRegisters, check_ff_design, ordered_controls, require_cells
from .trace import PhaseTag, Role, TransformTrace

logger = logging.getLogger(__name__)

GATE = "AND2"


def transform_clock_gated(netlist, plan):
    """Apply the clock-gated template to every flip-flop.

    Returns:
        tuple[Netlist, TransformTrace]: only ``_DFF_P_`` sequential cells remain;
        every clock-side input still on ``plan.clk1_name``

    Raises:
        TransformError: for asynchronous reset/set flip-flops, which only the
            recirc-mux variant supports
    """
    check_ff_design(netlist, plan)
    require_cells(netlist.library, GATE, MUX, BASE_DFF)
    for ff in netlist.flip_flops:
        if any(c.is_async for c in netlist.kind_of(ff).controls):
            raise TransformError(
                f"{ff.name}: asynchronous reset/set ({ff.kind}) is not supported by the clock-gated "
                f"variant; use the recirc-mux variant"
            )

    builder = NetlistBuilder.from_netlist(netlist)
    trace = TransformTrace()
    controls = ControlRegisters(builder, plan.clk1_name, trace)
    const = {0: netlist.const_zero, 1: netlist.const_one}
    clock = plan.clk1_name

    for ff in sorted(netlist.flip_flops, key=lambda i: i.name):
        kind = netlist.kind_of(ff)
        builder.remove_instance(ff.name)
        first = builder.fresh_instance_name(f"{ff.name}__phi1")
        second = builder.fresh_instance_name(f"{ff.name}__phi2")
        mid = builder.fresh_net(f"{ff.name}__phi1_q")
        stage = {
            PhaseTag.PHI1: {"D": ff.pins[kind.data_pin], "C": clock, "Q": mid},
            PhaseTag.PHI2: {"D": mid, "C": clock, "Q": ff.pins[kind.output_pin]},
        }

        for control in ordered_controls(kind):
            raw = ff.pins[kind.control_pin(control)]
            ctl = {PhaseTag.PHI1: raw, PhaseTag.PHI2: controls.pipelined(raw, ff.name)}
            for phase, pins in stage.items():
                if control is Control.ENABLE:
                    gate = builder.fresh_instance_name(f"{ff.name}__cg_and_phi{phase.number}")
                    gated = builder.fresh_net(f"{gate}_y")
                    builder.add_instance(gate, GATE, {"A": pins["C"], "B": ctl[phase], "Y": gated})
                    trace.add(ff.name, gate, Role.GATE, phase)
                    pins["C"] = gated
                else:
                    mux = builder.fresh_instance_name(f"{ff.name}__rmux_phi{phase.number}")
                    y = builder.fresh_net(f"{mux}_y")
                    builder.add_instance(mux, MUX, {"A": pins["D"], "B": const[control.forced_value], "S": ctl[phase], "Y": y})
                    trace.add(ff.name, mux, Role.MUX, phase)
                    pins["D"] = y

        builder.add_instance(first, BASE_DFF, stage[PhaseTag.PHI1], ff.init)
        builder.add_instance(second, BASE_DFF, stage[PhaseTag.PHI2], ff.init)
        trace.add(ff.name, first, Role.MAIN, PhaseTag.PHI1)
        trace.add(ff.name, second, Role.MAIN, PhaseTag.PHI2)

    result = builder.build()
    logger.info(f"transform_clock_gated: {len(netlist.flip_flops)} flip-flops -> {result.counts()}")
    return result, trace
