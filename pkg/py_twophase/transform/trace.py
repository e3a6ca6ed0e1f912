"""
Phase tags, transform plans and the trace linking generated instances back to
the flip-flops they were derived from.
"""
import json
from dataclasses import dataclass, field
from enum import Enum

from ..config import config
from ..errors import ConfigError, TransformError
from ..models.core.mixins import SerializableMixin


class PhaseTag(str, Enum):
    PHI1 = "phi1"
    PHI2 = "phi2"

    @property
    def number(self):
        return 1 if self is PhaseTag.PHI1 else 2

    @property
    def opposite(self):
        return PhaseTag.PHI2 if self is PhaseTag.PHI1 else PhaseTag.PHI1

    def __str__(self):
        return self.value


class Role(str, Enum):
    MAIN = "main"
    RECIRC = "recirc"
    CONTROL = "control"
    MUX = "mux"
    GATE = "gate"


class Variant(str, Enum):
    CLOCK_GATED = "clock-gated"
    RECIRC_MUX = "recirc-mux"


@dataclass(frozen=True)
class TransformPlan:
    variant: Variant = Variant.RECIRC_MUX
    clock_port_original: str = None
    clk1_name: str = field(default_factory=lambda: config.clk1_name)
    clk2_name: str = field(default_factory=lambda: config.clk2_name)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.clk1_name == self.clk2_name:
            raise ConfigError(f"clock names must differ, both are {self.clk1_name}")

    def clock_for(self, phase):
        return self.clk1_name if PhaseTag(phase) is PhaseTag.PHI1 else self.clk2_name


@dataclass(frozen=True)
class TraceEntry(SerializableMixin):
    name: str
    role: Role
    phase: PhaseTag


class TransformTrace:
    """Mapping original instance -> generated instances with role and phase."""

    def __init__(self, entries=None):
        self.entries = {orig: list(items) for orig, items in (entries or {}).items()}

    def __repr__(self):
        return f"<TransformTrace({len(self.entries)} originals)>"

    def __eq__(self, other):
        return isinstance(other, TransformTrace) and self.entries == other.entries

    def add(self, original, name, role, phase):
        self.entries.setdefault(original, []).append(TraceEntry(name, Role(role), PhaseTag(phase)))

    def generated(self, original):
        return list(self.entries.get(original, []))

    def originals(self):
        return sorted(self.entries)

    def all_entries(self):
        for original in self.originals():
            for entry in self.entries[original]:
                yield original, entry

    def phases(self):
        """Generated instance name -> PhaseTag."""
        return {entry.name: entry.phase for _, entry in self.all_entries()}

    def origin_of(self, name):
        for original, entry in self.all_entries():
            if entry.name == name:
                return original
        return None

    def check(self, netlist):
        """Verify the trace describes ``netlist``.

        Every generated sequential instance must appear exactly once, and every
        original must own at least two generated sequential instances.
        """
        seen = {}
        for original, entry in self.all_entries():
            if entry.name not in netlist:
                raise TransformError(f"trace names {entry.name} which is not in the netlist")
            if netlist.is_sequential(entry.name):
                if entry.name in seen:
                    raise TransformError(f"{entry.name} appears twice in the trace")
                seen[entry.name] = original
        for original in self.originals():
            owned = [e for e in self.entries[original] if e.role in (Role.MAIN, Role.RECIRC, Role.CONTROL)]
            mains = [e for e in owned if e.role is Role.MAIN]
            if len(mains) < 2:
                raise TransformError(f"{original} has fewer than two generated state elements")
        return seen

    def replace(self, mapping):
        """Rename or drop generated instances.

        Args:
            mapping: generated name -> new name, or None to drop the entry
        """
        out = TransformTrace()
        for original, entry in self.all_entries():
            name = mapping.get(entry.name, entry.name)
            if name is not None:
                out.add(original, name, entry.role, entry.phase)
        return out

    def with_phases(self, phases):
        out = TransformTrace()
        for original, entry in self.all_entries():
            out.add(original, entry.name, entry.role, phases.get(entry.name, entry.phase))
        return out

    def to_dict(self):
        return {orig: [e.to_dict() for e in self.entries[orig]] for orig in self.originals()}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data):
        trace = cls()
        for original, items in data.items():
            for item in items:
                trace.add(original, item["name"], item["role"], item["phase"])
        return trace
