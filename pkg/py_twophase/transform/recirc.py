"""
Flip-flop duplication and the recirculation-mux lowering.

Each flip-flop becomes a Φ1/Φ2 pair of the same kind; controls reach the Φ2
stage through a shared control pipeline register. ``transform_recirc`` then
lowers every full-variant stage to base flip-flops plus 2:1 muxes.
"""
import logging

from ..errors import TransformError
from ..models.builder import NetlistBuilder
from ..models.core.library import BASE_DFF, SUPPORTED_DFF, Control
from ..models.core.mixins import sanitize
from ..models.core.netlist import Instance
from .trace import PhaseTag, Role, TransformTrace

logger = logging.getLogger(__name__)

MUX = "MUX2"


def require_cells(library, *names):
    missing = [n for n in names if n not in library]
    if missing:
        raise TransformError(f"library lacks required cells: {', '.join(missing)}")


def ordered_controls(kind):
    """Enable first, then reset/set, so reset/set takes priority over enable."""
    return sorted(kind.controls, key=lambda c: c is not Control.ENABLE)


class ControlRegisters:
    """One Φ1 pipeline register per control net, shared by every user."""

    def __init__(self, builder, clock, trace):
        self.builder = builder
        self.clock = clock
        self.trace = trace
        self._by_net = {}

    def pipelined(self, net, original):
        if net not in self._by_net:
            name = self.builder.fresh_instance_name(f"{sanitize(net)}__ctl_phi1")
            q = self.builder.fresh_net(f"{name}_q")
            self.builder.add_instance(name, BASE_DFF, {"D": net, "C": self.clock, "Q": q})
            self.trace.add(original, name, Role.CONTROL, PhaseTag.PHI1)
            self._by_net[net] = q
        return self._by_net[net]

    def __len__(self):
        return len(self._by_net)


def check_ff_design(netlist, plan):
    if not netlist.has_port(plan.clk1_name) or not netlist.has_port(plan.clk2_name):
        raise TransformError(f"clock ports not initialized: expected {plan.clk1_name} and {plan.clk2_name}")
    if netlist.latches:
        raise TransformError(f"design already contains latches: {netlist.latches[0].name}")
    for ff in netlist.flip_flops:
        kind = netlist.kind_of(ff)
        if kind.name not in SUPPORTED_DFF:
            raise TransformError(f"{ff.name}: unsupported FF kind {kind.name}")
        if ff.pins[kind.clock_pin] != plan.clk1_name:
            raise TransformError(f"{ff.name}: clock pin is not driven by {plan.clk1_name}")


def duplicate_ffs_recirc(netlist, plan):
    """Replace every flip-flop F by the series pair F__phi1 -> F__phi2.

    Both stages keep F's kind. F__phi1 keeps the original control nets;
    F__phi2 receives each control through a shared ``<net>__ctl_phi1``
    register. F__phi2 keeps F's output net.

    Returns:
        tuple[Netlist, TransformTrace]

    Raises:
        TransformError: for unsupported flip-flop kinds or uninitialized clocks
    """
    check_ff_design(netlist, plan)
    builder = NetlistBuilder.from_netlist(netlist)
    trace = TransformTrace()
    controls = ControlRegisters(builder, plan.clk1_name, trace)

    for ff in sorted(netlist.flip_flops, key=lambda i: i.name):
        kind = netlist.kind_of(ff)
        builder.remove_instance(ff.name)
        first = builder.fresh_instance_name(f"{ff.name}__phi1")
        second = builder.fresh_instance_name(f"{ff.name}__phi2")
        mid = builder.fresh_net(f"{ff.name}__phi1_q")

        pins1 = dict(ff.pins)
        pins1[kind.output_pin] = mid
        pins2 = dict(ff.pins)
        pins2[kind.data_pin] = mid
        for control in ordered_controls(kind):
            pin = kind.control_pin(control)
            pins2[pin] = controls.pipelined(ff.pins[pin], ff.name)

        builder.add_instance(first, kind.name, pins1, ff.init)
        builder.add_instance(second, kind.name, pins2, ff.init)
        trace.add(ff.name, first, Role.MAIN, PhaseTag.PHI1)
        trace.add(ff.name, second, Role.MAIN, PhaseTag.PHI2)

    result = builder.build()
    logger.info(
        f"duplicate_ffs_recirc: {len(netlist.flip_flops)} flip-flops -> "
        f"{len(result.sequential_instances)} sequential ({len(controls)} control registers)"
    )
    return result, trace


def transform_recirc(netlist, trace, plan):
    """Lower every full-variant stage to base flip-flops and 2:1 muxes.

    An enable stage becomes ``MUX2(S=ctl, A=recirc.Q, B=data) -> main`` with a
    recirculation register on the opposite phase sampling main.Q. Reset/set
    controls add ``MUX2(S=ctl, A=data, B=constant)`` after the enable mux.
    Asynchronous variants also get an output override mux on the Φ2 stage
    driven by the raw control, so the forced value is visible before the
    clock edge.

    Returns:
        tuple[Netlist, TransformTrace]: only ``_DFF_P_`` sequential cells remain

    Raises:
        TransformError: if the trace does not match the netlist
    """
    require_cells(netlist.library, MUX, BASE_DFF)
    builder = NetlistBuilder.from_netlist(netlist)
    out = TransformTrace(trace.entries)
    const = {0: netlist.const_zero, 1: netlist.const_one}
    lowered = 0

    for original in trace.originals():
        mains = {e.phase: e.name for e in trace.generated(original) if e.role is Role.MAIN}
        if set(mains) != {PhaseTag.PHI1, PhaseTag.PHI2}:
            raise TransformError(f"trace inconsistent with netlist: {original} lacks a Φ1/Φ2 pair")
        for name in mains.values():
            if name not in netlist:
                raise TransformError(f"trace inconsistent with netlist: {name} missing")
        if netlist.instance(mains[PhaseTag.PHI1]).kind != netlist.instance(mains[PhaseTag.PHI2]).kind:
            raise TransformError(f"trace inconsistent with netlist: {original} pair kinds differ")

        for phase in (PhaseTag.PHI1, PhaseTag.PHI2):
            inst = netlist.instance(mains[phase])
            kind = netlist.kind_of(inst)
            if not kind.is_ff:
                raise TransformError(f"trace inconsistent with netlist: {inst.name} is not a flip-flop")
            if not kind.controls:
                continue
            lowered += 1
            clock = inst.pins[kind.clock_pin]
            q = inst.pins[kind.output_pin]
            data = inst.pins[kind.data_pin]

            for control in ordered_controls(kind):
                ctl = inst.pins[kind.control_pin(control)]
                if control is Control.ENABLE:
                    recirc = builder.fresh_instance_name(f"{original}__recirc_phi{phase.opposite.number}")
                    recirc_q = builder.fresh_net(f"{recirc}_q")
                    builder.add_instance(recirc, BASE_DFF, {"D": q, "C": clock, "Q": recirc_q}, inst.init)
                    out.add(original, recirc, Role.RECIRC, phase.opposite)
                    mux = builder.fresh_instance_name(f"{original}__mux_phi{phase.number}")
                    pins = {"A": recirc_q, "B": data, "S": ctl}
                else:
                    mux = builder.fresh_instance_name(f"{original}__rmux_phi{phase.number}")
                    pins = {"A": data, "B": const[control.forced_value], "S": ctl}
                data = builder.fresh_net(f"{mux}_y")
                builder.add_instance(mux, MUX, {**pins, "Y": data})
                out.add(original, mux, Role.MUX, phase)

                if control.is_async and phase is PhaseTag.PHI2:
                    first = netlist.instance(mains[PhaseTag.PHI1])
                    raw = first.pins[kind.control_pin(control)]
                    held = builder.fresh_net(f"{inst.name}_mq")
                    amux = builder.fresh_instance_name(f"{original}__amux")
                    builder.add_instance(amux, MUX, {"A": held, "B": const[control.forced_value], "S": raw, "Y": q})
                    out.add(original, amux, Role.MUX, phase)
                    q = held

            builder.replace_instance(Instance(inst.name, BASE_DFF, {"D": data, "C": clock, "Q": q}, inst.init))

    result = builder.build()
    leftover = [i.name for i in result.flip_flops if i.kind != BASE_DFF]
    if leftover:
        raise TransformError(f"trace inconsistent with netlist: untraced flip-flops {', '.join(leftover)}")
    logger.info(f"transform_recirc: lowered {lowered} stages, {result.counts()}")
    return result, out
