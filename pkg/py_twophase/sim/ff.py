"""
Cycle simulation of edge-triggered flip-flop netlists.

Each cycle applies the inputs, settles the logic, then raises every clock
port in turn (``clk_1`` before ``clk_2``, other clocks by name). Flip-flops
whose clock net rises capture atomically; the clock is lowered again before
the next port is raised. Asynchronous reset/set act as level-sensitive
overrides whenever the logic settles. Outputs are sampled after the last
update of the cycle.
"""
import logging

from ..config import config
from ..errors import SimulationError
from ..models.core.library import Control
from .engine import CompiledNetlist
from .stimulus import Trace

logger = logging.getLogger(__name__)


class _FlipFlop:
    __slots__ = ("name", "q", "d", "clock", "enable", "sync", "async_", "init")

    def __init__(self, compiled, inst):
        kind = compiled.netlist.kind_of(inst)
        idx = compiled.index
        self.name = inst.name
        self.q = idx[inst.pins[kind.output_pin]]
        self.d = idx[inst.pins[kind.data_pin]]
        self.clock = idx[inst.pins[kind.clock_pin]]
        self.enable = None
        self.sync = None
        self.async_ = None
        self.init = inst.init
        for control in kind.controls:
            net = idx[inst.pins[kind.control_pin(control)]]
            if control is Control.ENABLE:
                self.enable = net
            elif control.is_async:
                self.async_ = (net, control.forced_value)
            else:
                self.sync = (net, control.forced_value)

    def next_state(self, v, M):
        d = v[self.d]
        q = v[self.q]
        if self.enable is not None:
            e = v[self.enable]
            d = (e & d) | ((M ^ e) & q)
        if self.sync is not None:
            ctl, forced = self.sync
            d = (d | v[ctl]) if forced else (d & (M ^ v[ctl]))
        return d


def clock_order(netlist, clk1=None, clk2=None):
    clk1 = clk1 or config.clk1_name
    clk2 = clk2 or config.clk2_name
    rank = {clk1: 0, clk2: 1}
    return sorted((p.name for p in netlist.clock_ports), key=lambda n: (rank.get(n, 2), n))


class FlipFlopSimulator:
    def __init__(self, netlist, clocks=None):
        if netlist.latches:
            raise SimulationError(f"simulate_ff needs flip-flops only; {netlist.latches[0].name} is a latch")
        self.netlist = netlist
        self.compiled = CompiledNetlist(netlist)
        self.flops = [_FlipFlop(self.compiled, inst) for inst in netlist.flip_flops]
        self.async_flops = [f for f in self.flops if f.async_ is not None]
        self.clocks = [self.compiled.index[c] for c in (clocks or clock_order(netlist))]

    def settle(self, v, M):
        sweep = self.compiled.sweep
        sweep(v, M)
        for _ in range(len(self.async_flops) + 1):
            changed = False
            for f in self.async_flops:
                ctl, forced = f.async_
                q = v[f.q]
                new = (q | v[ctl]) if forced else (q & (M ^ v[ctl]))
                if new != q:
                    v[f.q] = new
                    changed = True
            if not changed:
                return
            sweep(v, M)
        raise SimulationError("asynchronous controls did not settle")

    def run(self, stimulus, nets=None):
        netlist = self.netlist
        data = {p.name for p in netlist.data_inputs}
        missing = sorted(data - set(stimulus.ports))
        if missing:
            raise SimulationError(f"stimulus lacks inputs {missing}")
        nets = tuple(nets) if nets is not None else tuple(p.name for p in netlist.output_ports)
        idx = self.compiled.index
        sample = [idx[n] for n in nets]
        inputs = [(idx[p], i) for i, p in enumerate(stimulus.ports) if p in idx]

        M = stimulus.mask
        v = self.compiled.values(stimulus.lanes)
        for f in self.flops:
            v[f.q] = M if f.init else 0

        rows = []
        for row in stimulus.vectors:
            for net, i in inputs:
                v[net] = row[i] & M
            for clk in self.clocks:
                v[clk] = 0
            self.settle(v, M)
            for clk in self.clocks:
                before = [v[f.clock] for f in self.flops]
                v[clk] = M
                self.settle(v, M)
                updates = []
                for f, old in zip(self.flops, before):
                    rise = v[f.clock] & (M ^ old)
                    if rise:
                        nxt = f.next_state(v, M)
                        updates.append((f.q, (rise & nxt) | ((M ^ rise) & v[f.q])))
                for q, value in updates:
                    v[q] = value
                self.settle(v, M)
                v[clk] = 0
                self.settle(v, M)
            rows.append(tuple(v[i] for i in sample))
        return Trace(nets, tuple(rows), stimulus.lanes, "post-update")


def simulate_ff(netlist, stimulus, nets=None):
    """Simulate a flip-flop netlist cycle by cycle.

    Args:
        netlist (Netlist): design containing no latches
        stimulus (Stimulus): values for every data input, per cycle
        nets: nets to sample (default: primary outputs)

    Returns:
        Trace: values sampled after each cycle's updates
    """
    return FlipFlopSimulator(netlist).run(stimulus, nets)
