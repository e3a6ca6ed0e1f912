"""
Mixins and small helpers shared by the netlist models.
"""
import json
import re
from dataclasses import asdict, fields, is_dataclass
from enum import Enum


def _plain(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if is_dataclass(value):
        return _plain(asdict(value))
    return value


class SerializableMixin:
    """Mixin giving dataclasses a JSON-ready ``to_dict`` and ``to_json``."""

    def to_dict(self):
        """Convert the dataclass instance to plain dicts/lists/scalars."""
        return {f.name: _plain(getattr(self, f.name)) for f in fields(self)}

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True) + "\n"


class NameAllocator:
    """Hands out identifiers that do not collide with names already in use.

    Collisions are resolved by appending ``_<n>`` with the smallest free n.
    """

    def __init__(self, taken=()):
        self._taken = set(taken)

    def reserve(self, name):
        self._taken.add(name)

    def __contains__(self, name):
        return name in self._taken

    def fresh(self, base):
        if base not in self._taken:
            self._taken.add(base)
            return base
        n = 1
        while f"{base}_{n}" in self._taken:
            n += 1
        name = f"{base}_{n}"
        self._taken.add(name)
        return name


_UNSAFE = re.compile(r"[^A-Za-z0-9_]")


def sanitize(name):
    """Make a net or instance name usable as a suffix base."""
    return _UNSAFE.sub("_", name)
