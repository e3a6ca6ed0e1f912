"""
Cell library model and JSON loader.

A library is a catalog of cell kinds. Each kind declares its pins with a
direction and a role, a behavior (combinational function, edge-triggered
flip-flop with optional controls, or positive-enable latch) and timing data.
"""
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from ...errors import LibraryError
from .logic import ExpressionError, parse_expression
from .mixins import SerializableMixin

logger = logging.getLogger(__name__)

BASE_DFF = "_DFF_P_"
LATCH = "_DLATCH_P_"


class PinRole(str, Enum):
    DATA = "data"
    CLOCK = "clock"
    ENABLE = "enable"
    RESET = "reset"
    SET = "set"
    SELECT = "select"
    OUTPUT = "output"


class Control(str, Enum):
    ENABLE = "enable"
    SYNC_RESET = "sync-reset-0"
    SYNC_SET = "sync-set-1"
    ASYNC_RESET = "async-reset-0"
    ASYNC_SET = "async-set-1"

    @property
    def role(self):
        if self is Control.ENABLE:
            return PinRole.ENABLE
        if self in (Control.SYNC_RESET, Control.ASYNC_RESET):
            return PinRole.RESET
        return PinRole.SET

    @property
    def is_async(self):
        return self in (Control.ASYNC_RESET, Control.ASYNC_SET)

    @property
    def forced_value(self):
        """Value forced onto Q while a reset/set control is asserted."""
        if self is Control.ENABLE:
            return None
        return 0 if self.role is PinRole.RESET else 1


# Flip-flop kinds the flow knows how to convert, with the controls each carries.
SUPPORTED_DFF = {
    "_DFF_P_": frozenset(),
    "_DFFE_PP_": frozenset({Control.ENABLE}),
    "_DFF_PP0_": frozenset({Control.ASYNC_RESET}),
    "_DFF_PP1_": frozenset({Control.ASYNC_SET}),
    "_SDFF_PP0_": frozenset({Control.SYNC_RESET}),
    "_SDFF_PP1_": frozenset({Control.SYNC_SET}),
}


class BehaviorType(str, Enum):
    COMB = "comb"
    DFF = "dff"
    LATCH = "latch"


@dataclass(frozen=True)
class TimingData(SerializableMixin):
    delay_max: float = 0.0
    delay_min: float = 0.0
    d_to_q_min: float = 0.0
    setup: float = 0.0
    hold: float = 0.0


@dataclass(frozen=True)
class PinSpec(SerializableMixin):
    name: str
    dir: str
    role: PinRole


@dataclass(frozen=True)
class Behavior:
    type: BehaviorType
    function: object = None  # logic.Expr for comb kinds
    controls: frozenset = frozenset()
    level: str = "positive"

    def to_dict(self):
        if self.type is BehaviorType.COMB:
            return {"type": "comb", "function": str(self.function)}
        if self.type is BehaviorType.DFF:
            return {"type": "dff", "controls": sorted(c.value for c in self.controls)}
        return {"type": "latch", "level": self.level}


@dataclass(frozen=True)
class CellKind:
    name: str
    pins: tuple
    behavior: Behavior
    timing: TimingData = field(default_factory=TimingData)

    def __repr__(self):
        return f"<CellKind({self.name})>"

    @property
    def is_comb(self):
        return self.behavior.type is BehaviorType.COMB

    @property
    def is_ff(self):
        return self.behavior.type is BehaviorType.DFF

    @property
    def is_latch(self):
        return self.behavior.type is BehaviorType.LATCH

    @property
    def is_sequential(self):
        return not self.is_comb

    @property
    def controls(self):
        return self.behavior.controls

    def pin(self, name):
        for p in self.pins:
            if p.name == name:
                return p
        raise KeyError(f"{self.name} has no pin {name}")

    @property
    def input_pins(self):
        return [p.name for p in self.pins if p.dir == "in"]

    @property
    def output_pins(self):
        return [p.name for p in self.pins if p.dir == "out"]

    @property
    def output_pin(self):
        return self.output_pins[0]

    def pins_with_role(self, role):
        return [p.name for p in self.pins if p.role is role]

    @property
    def clock_pin(self):
        found = self.pins_with_role(PinRole.CLOCK)
        return found[0] if found else None

    @property
    def data_pin(self):
        found = self.pins_with_role(PinRole.DATA)
        return found[0] if found else None

    def control_pin(self, control):
        """Pin carrying the given control, or None."""
        found = self.pins_with_role(control.role)
        return found[0] if found and control in self.controls else None

    def to_dict(self):
        return {
            "name": self.name,
            "pins": [p.to_dict() for p in self.pins],
            "behavior": self.behavior.to_dict(),
            "timing": self.timing.to_dict(),
        }


@dataclass(frozen=True)
class CellLibrary:
    cells: dict

    def __contains__(self, name):
        return name in self.cells

    def __getitem__(self, name):
        return self.cells[name]

    def get(self, name):
        return self.cells.get(name)

    def to_dict(self):
        return {"cells": [self.cells[n].to_dict() for n in sorted(self.cells)]}


def _cell_error(message, name):
    return LibraryError(f"cell {name}: {message}")


def _load_cell(entry):
    try:
        name = entry["name"]
    except (KeyError, TypeError):
        raise LibraryError("cell entry without name")

    pins = []
    for p in entry.get("pins", []):
        try:
            direction = p["dir"]
            role = PinRole(p["role"])
        except (KeyError, ValueError) as e:
            raise _cell_error(f"bad pin declaration {p!r}", name) from e
        if direction not in ("in", "out"):
            raise _cell_error(f"pin {p['name']} has direction {direction!r}", name)
        pins.append(PinSpec(p["name"], direction, role))
    if len({p.name for p in pins}) != len(pins):
        raise _cell_error("duplicate pin name", name)

    raw = entry.get("behavior") or {}
    try:
        btype = BehaviorType(raw.get("type"))
    except ValueError as e:
        raise _cell_error(f"unknown behavior type {raw.get('type')!r}", name) from e

    inputs = {p.name for p in pins if p.dir == "in"}
    outputs = [p.name for p in pins if p.dir == "out"]
    if btype is BehaviorType.COMB:
        try:
            function = parse_expression(raw.get("function", ""))
        except ExpressionError as e:
            raise _cell_error(f"bad function: {e}", name) from e
        unknown = function.inputs() - inputs
        if unknown:
            raise _cell_error(f"function references undeclared pins {sorted(unknown)}", name)
        if len(outputs) != 1:
            raise _cell_error("combinational kinds must have exactly one output pin", name)
        behavior = Behavior(btype, function=function)
    else:
        clocks = [p for p in pins if p.role is PinRole.CLOCK]
        if not clocks:
            raise LibraryError(f"sequential kind without clock: {name}")
        if len(clocks) > 1:
            raise _cell_error("sequential kind declares more than one clock pin", name)
        if len(outputs) != 1 or not [p for p in pins if p.role is PinRole.DATA]:
            raise _cell_error("sequential kinds need one data pin and one output pin", name)
        if btype is BehaviorType.DFF:
            try:
                controls = frozenset(Control(c) for c in raw.get("controls", []))
            except ValueError as e:
                raise _cell_error(f"unknown control in {raw.get('controls')}", name) from e
            if name not in SUPPORTED_DFF:
                raise _cell_error("unsupported flip-flop kind", name)
            if controls != SUPPORTED_DFF[name]:
                raise _cell_error(
                    f"controls {sorted(c.value for c in controls)} do not match the kind", name
                )
            for control in controls:
                if not [p for p in pins if p.role is control.role]:
                    raise _cell_error(f"no pin with role {control.role.value}", name)
            behavior = Behavior(btype, controls=controls)
        else:
            level = raw.get("level", "positive")
            if level != "positive":
                raise _cell_error("only positive-enable latches are supported", name)
            behavior = Behavior(btype, level=level)

    t = entry.get("timing") or {}
    try:
        timing = TimingData(**{k: float(v) for k, v in t.items()})
    except TypeError as e:
        raise _cell_error(f"bad timing block: {e}", name) from e
    if min(timing.delay_max, timing.delay_min, timing.d_to_q_min, timing.setup, timing.hold) < 0:
        raise _cell_error("timing values must be non-negative", name)
    if timing.delay_min > timing.delay_max:
        raise _cell_error("delay_min exceeds delay_max", name)

    return CellKind(name, tuple(pins), behavior, timing)


def load_library(text):
    """Parse library-file contents into a CellLibrary.

    Args:
        text (str): JSON document ``{"cells": [...]}``

    Returns:
        CellLibrary: validated library

    Raises:
        LibraryError: on malformed JSON (with line/column), duplicate cell
            names, sequential kinds without a clock pin, or other invariant
            violations
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise LibraryError(e.msg, e.lineno, e.colno) from e
    if not isinstance(doc, dict) or not isinstance(doc.get("cells"), list):
        raise LibraryError("library must be an object with a 'cells' list", 1, 1)

    cells = {}
    for entry in doc["cells"]:
        kind = _load_cell(entry)
        if kind.name in cells:
            raise LibraryError(f"duplicate cell name {kind.name}")
        cells[kind.name] = kind
    logger.debug(f"Loaded library with {len(cells)} cell kinds")
    return CellLibrary(cells)


def load_library_file(path):
    return load_library(Path(path).read_text())
