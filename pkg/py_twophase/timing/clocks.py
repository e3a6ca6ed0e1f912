"""
Two-phase clock waveforms and the per-latch skew table.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..config import config
from ..errors import ConfigError
from ..transform.trace import PhaseTag


@dataclass(frozen=True)
class ClockSpec:
    """Non-overlapping two-phase clock.

    Φ1 is transparent over [0, duty·T) and Φ2 over [offset·T, offset·T + duty·T)
    within each period T.
    """

    period: float = field(default_factory=lambda: config.period)
    duty: float = field(default_factory=lambda: config.duty)
    phase2_offset: float = field(default_factory=lambda: config.phase2_offset)
    skew: dict = field(default_factory=dict)  # latch -> ns
    clk1: str = field(default_factory=lambda: config.clk1_name)
    clk2: str = field(default_factory=lambda: config.clk2_name)

    def __post_init__(self):
        if self.period <= 0:
            raise ConfigError(f"period must be positive, got {self.period}")
        if not 0 < self.duty:
            raise ConfigError(f"duty must be positive, got {self.duty}")
        eps = config.epsilon
        if self.duty > self.phase2_offset + eps or self.duty > 1 - self.phase2_offset + eps:
            raise ConfigError(
                f"phases overlap: duty {self.duty} with phase-2 offset {self.phase2_offset}"
            )

    @property
    def pulse_width(self):
        return self.duty * self.period

    def open(self, phase):
        return 0.0 if PhaseTag(phase) is PhaseTag.PHI1 else self.phase2_offset * self.period

    def close(self, phase):
        return self.open(phase) + self.pulse_width

    def window(self, phase):
        return self.open(phase), self.close(phase)

    def skew_of(self, latch):
        return self.skew.get(latch, 0.0)

    def separation(self, launch, capture):
        """Time from the launching phase's open edge to the capturing one's, in [0, T)."""
        return (self.open(capture) - self.open(launch)) % self.period

    def skew_max(self, latches=()):
        """Largest pairwise skew difference over ``latches`` and the table."""
        values = [self.skew_of(n) for n in latches] + list(self.skew.values())
        return max(values) - min(values) if values else 0.0

    def with_skew(self, skew):
        return ClockSpec(self.period, self.duty, self.phase2_offset, dict(skew), self.clk1, self.clk2)


def load_skew_table(path):
    """Read a JSON object mapping latch names to clock skew in ns."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: {e.msg} at line {e.lineno}") from None
    if not isinstance(data, dict) or not all(isinstance(v, (int, float)) for v in data.values()):
        raise ConfigError(f"{path}: skew table must map latch names to numbers")
    return {str(k): float(v) for k, v in data.items()}
