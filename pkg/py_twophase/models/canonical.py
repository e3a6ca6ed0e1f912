"""
Canonical JSON interchange format for netlists.

Document shape::

    {
      "name": "top",
      "ports": [{"name": "clk", "dir": "in", "kind": "clock"}, ...],
      "nets": ["a", "b", ...],
      "constants": {"zero": "const_0", "one": "const_1"},
      "instances": [{"name": "u1", "kind": "INV", "pins": {"A": "a", "Y": "b"}}, ...]
    }

Emitted documents use sorted keys and sorted instance and net arrays, so the
output is byte-stable. Port order is kept as declared.
"""
import json
import logging

from ..errors import CanonicalFormatError
from .builder import NetlistBuilder
from .core.netlist import CONST_ONE, CONST_ZERO, validate

logger = logging.getLogger(__name__)


def netlist_to_dict(netlist):
    return {
        "name": netlist.name,
        "ports": [p.to_dict() for p in netlist.ports],
        "nets": sorted(netlist.nets),
        "constants": {"zero": netlist.const_zero, "one": netlist.const_one},
        "instances": [inst.to_dict() for inst in sorted(netlist.instances, key=lambda i: i.name)],
    }


def emit_canonical(netlist):
    return json.dumps(netlist_to_dict(netlist), indent=2, sort_keys=True) + "\n"


def parse_canonical(text, library, check=True):
    """Parse a canonical JSON document.

    Args:
        text (str): document contents
        library (CellLibrary): library the instances resolve against
        check (bool): raise on structural diagnostics (multiple drivers,
            dangling pins, unknown kinds, combinational cycles)

    Returns:
        Netlist: the parsed design

    Raises:
        CanonicalFormatError: on JSON syntax errors or invalid structure
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CanonicalFormatError(f"{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise CanonicalFormatError("document must be a JSON object")

    try:
        constants = doc.get("constants") or {}
        builder = NetlistBuilder(
            doc["name"], library, (constants.get("zero", CONST_ZERO), constants.get("one", CONST_ONE))
        )
        for p in doc.get("ports", []):
            if p["dir"] not in ("in", "out"):
                raise CanonicalFormatError(f"port {p['name']}: bad direction {p['dir']!r}")
            builder.add_port(p["name"], p["dir"], p.get("kind", "data"))
        for net in doc.get("nets", []):
            builder.add_net(net)
        for entry in doc.get("instances", []):
            if entry["name"] in builder.instances:
                raise CanonicalFormatError(f"duplicate instance {entry['name']}")
            builder.add_instance(entry["name"], entry["kind"], entry.get("pins", {}), int(entry.get("init", 0)))
    except (KeyError, TypeError, AttributeError) as e:
        raise CanonicalFormatError(f"malformed document: missing or invalid field {e}") from e

    netlist = builder.build()
    if check:
        found = validate(netlist, library)
        errors = [d for d in found if d.severity == "error"]
        if errors:
            raise CanonicalFormatError("; ".join(str(d) for d in errors))
        for d in found:
            if d.severity == "warning":
                logger.warning(f"{netlist.name}: {d}")
    logger.debug(f"Parsed canonical netlist {netlist.name} with {len(netlist.instances)} instances")
    return netlist
