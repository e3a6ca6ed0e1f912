"""
Mutable scratchpad used to construct and rewrite netlists.

Every pass starts from ``NetlistBuilder.from_netlist``, edits, and calls
``build()`` to freeze the result into a new immutable Netlist.
"""
import logging

from ..errors import NetlistError
from .core.mixins import NameAllocator
from .core.netlist import CONST_ONE, CONST_ZERO, Instance, Netlist, Port

logger = logging.getLogger(__name__)


class NetlistBuilder:
    def __init__(self, name, library, constants=(CONST_ZERO, CONST_ONE)):
        self.name = name
        self.library = library
        self.constants = tuple(constants)
        self.ports = []
        self.nets = set()
        self.instances = {}
        self._inst_names = NameAllocator()
        self._net_names = NameAllocator(self.constants)

    @classmethod
    def from_netlist(cls, netlist):
        builder = cls(netlist.name, netlist.library, netlist.constants)
        for p in netlist.ports:
            builder.add_port(p.name, p.dir, p.kind)
        for net in netlist.nets:
            builder.add_net(net)
        for inst in netlist.instances:
            builder.add_instance(inst.name, inst.kind, inst.pins, inst.init)
        return builder

    # -- nets and ports -----------------------------------------------------

    def add_net(self, net):
        self.nets.add(net)
        self._net_names.reserve(net)
        return net

    def _use_net(self, net):
        if net not in self.constants:
            self.add_net(net)

    def fresh_net(self, base):
        return self.add_net(self._net_names.fresh(base))

    def add_port(self, name, dir, kind="data"):
        if any(p.name == name for p in self.ports):
            raise NetlistError(f"duplicate port {name}")
        self.ports.append(Port(name, dir, kind))
        self.add_net(name)
        return name

    def rename_port(self, old, new):
        """Rename a port together with the net it drives or reads."""
        if any(p.name == new for p in self.ports):
            raise NetlistError(f"duplicate port {new}")
        self.ports = [Port(new, p.dir, p.kind) if p.name == old else p for p in self.ports]
        self.rename_net(old, new)

    def set_port_kind(self, name, kind):
        self.ports = [Port(p.name, p.dir, kind) if p.name == name else p for p in self.ports]

    def rename_net(self, old, new):
        if old == new:
            return
        for inst in list(self.instances.values()):
            if old in inst.pins.values():
                pins = {pin: (new if net == old else net) for pin, net in inst.pins.items()}
                self.instances[inst.name] = Instance(inst.name, inst.kind, pins, inst.init)
        self.nets.discard(old)
        self.add_net(new)

    # -- instances ----------------------------------------------------------

    def fresh_instance_name(self, base):
        return self._inst_names.fresh(base)

    def add_instance(self, name, kind, pins, init=0):
        if name in self.instances:
            raise NetlistError(f"duplicate instance {name}")
        self._inst_names.reserve(name)
        for net in pins.values():
            self._use_net(net)
        self.instances[name] = Instance(name, kind, dict(pins), init)
        return name

    def remove_instance(self, name):
        return self.instances.pop(name)

    def replace_instance(self, inst):
        self.instances[inst.name] = inst

    def connect(self, name, pin, net):
        inst = self.instances[name]
        pins = dict(inst.pins)
        pins[pin] = net
        self._use_net(net)
        self.instances[name] = Instance(inst.name, inst.kind, pins, inst.init)

    def set_kind(self, name, kind, pins=None):
        inst = self.instances[name]
        self.instances[name] = Instance(inst.name, kind, dict(pins or inst.pins), inst.init)

    def build(self, prune=False):
        """Freeze into a Netlist.

        Args:
            prune: drop nets that no pin or port references any more
        """
        nets = set(self.nets)
        if prune:
            nets = {p.name for p in self.ports}
            for inst in self.instances.values():
                nets.update(inst.pins.values())
        nets -= set(self.constants)
        instances = tuple(self.instances[n] for n in sorted(self.instances))
        return Netlist(self.name, tuple(self.ports), frozenset(nets), instances, self.library, self.constants)
