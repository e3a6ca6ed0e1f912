"""
Stimulus, sampled traces and the two-phase sub-step schedule.

Values are bit-parallel: each net value is a Python int whose bit k is the
value in simulation lane k. A single-lane stimulus uses plain 0/1.
"""
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..config import config
from ..errors import SimulationError

MAX_LANES = 64


def lane_mask(lanes):
    return (1 << lanes) - 1


def _pack(bits):
    """Pack a (..., lanes) 0/1 array into ints along the last axis."""
    weights = np.left_shift(np.uint64(1), np.arange(bits.shape[-1], dtype=np.uint64))
    return (bits.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


@dataclass(frozen=True)
class Stimulus:
    ports: tuple
    vectors: tuple  # per cycle: tuple of packed ints aligned with ports
    lanes: int = 1
    seeds: tuple = ()

    def __post_init__(self):
        if not 1 <= self.lanes <= MAX_LANES:
            raise SimulationError(f"lane count {self.lanes} outside 1..{MAX_LANES}")
        for cycle, row in enumerate(self.vectors):
            if len(row) != len(self.ports):
                raise SimulationError(f"cycle {cycle} assigns {len(row)} of {len(self.ports)} inputs")

    def __len__(self):
        return len(self.vectors)

    @property
    def mask(self):
        return lane_mask(self.lanes)

    def at(self, cycle):
        return dict(zip(self.ports, self.vectors[cycle]))

    @classmethod
    def from_rows(cls, ports, rows):
        """Single-lane stimulus from per-cycle rows (dicts or sequences of 0/1)."""
        ports = tuple(ports)
        vectors = []
        for row in rows:
            if isinstance(row, dict):
                missing = set(ports) - set(row)
                if missing:
                    raise SimulationError(f"stimulus row lacks inputs {sorted(missing)}")
                row = [row[p] for p in ports]
            vectors.append(tuple(int(v) & 1 for v in row))
        return cls(ports, tuple(vectors))

    @classmethod
    def random(cls, ports, cycles, seeds):
        """One lane per seed; lane k draws its bits from ``default_rng(seeds[k])``."""
        ports = tuple(ports)
        seeds = tuple(int(s) for s in seeds)
        if not 1 <= len(seeds) <= MAX_LANES:
            raise SimulationError(f"need 1..{MAX_LANES} seeds, got {len(seeds)}")
        bits = np.stack(
            [np.random.default_rng(s).integers(0, 2, size=(cycles, len(ports)), dtype=np.uint8) for s in seeds],
            axis=-1,
        )
        packed = _pack(bits) if len(ports) else np.zeros((cycles, 0), dtype=np.uint64)
        vectors = tuple(tuple(int(v) for v in row) for row in packed)
        return cls(ports, vectors, lanes=len(seeds), seeds=seeds)

    def lane(self, k):
        vectors = tuple(tuple((v >> k) & 1 for v in row) for row in self.vectors)
        seeds = (self.seeds[k],) if self.seeds else ()
        return Stimulus(self.ports, vectors, 1, seeds)


@dataclass(frozen=True)
class Trace:
    nets: tuple
    values: tuple  # per cycle: tuple of packed ints aligned with nets
    lanes: int = 1
    sampling: str = "post-update"

    def __len__(self):
        return len(self.values)

    def value(self, cycle, net, lane=0):
        return (self.values[cycle][self.nets.index(net)] >> lane) & 1

    def column(self, net, lane=0):
        i = self.nets.index(net)
        return [(row[i] >> lane) & 1 for row in self.values]

    def lane(self, k):
        values = tuple(tuple((v >> k) & 1 for v in row) for row in self.values)
        return Trace(self.nets, values, 1, self.sampling)

    def to_frame(self, lane=0):
        """Long-format table with columns cycle, net, value."""
        rows = [
            (cycle, net, (row[i] >> lane) & 1)
            for cycle, row in enumerate(self.values)
            for i, net in enumerate(self.nets)
        ]
        return pd.DataFrame(rows, columns=["cycle", "net", "value"])


@dataclass(frozen=True)
class SubStep:
    name: str
    high: frozenset  # clock ports held high during the sub-step


@dataclass(frozen=True)
class PhaseSchedule:
    """Ordered sub-steps of one cycle; at most one phase clock high per step."""

    clk1: str = field(default_factory=lambda: config.clk1_name)
    clk2: str = field(default_factory=lambda: config.clk2_name)
    steps: tuple = None

    def __post_init__(self):
        if self.steps is None:
            steps = (
                SubStep("phi1", frozenset({self.clk1})),
                SubStep("gap", frozenset()),
                SubStep("phi2", frozenset({self.clk2})),
                SubStep("gap", frozenset()),
            )
            object.__setattr__(self, "steps", steps)
        for step in self.steps:
            if {self.clk1, self.clk2} <= step.high:
                raise SimulationError(f"sub-step {step.name} makes both phases transparent")

    @property
    def clocks(self):
        return (self.clk1, self.clk2)
