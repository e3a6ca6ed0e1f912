"""
Default settings for the two-phase flow.

Environment Variables:
    TWOPHASE_LIBRARY: Path to the cell library JSON (default: bundled cells.json)
    TWOPHASE_PERIOD: Default clock period in ns (default: 10.0)
    TWOPHASE_DUTY: Default per-phase duty cycle (default: 0.49)
    TWOPHASE_SEEDS: Default number of equivalence seeds (default: 16)
    TWOPHASE_CYCLES: Default number of equivalence cycles (default: 1000)
    TWOPHASE_LOG_LEVEL: Logging level used by the CLI (default: INFO)
"""

import os
from dataclasses import dataclass, field
from pathlib import Path

FIXTURE_DIR = Path(__file__).parent / "fixtures"


@dataclass(frozen=True)
class FlowConfig:
    library_path: Path = field(
        default_factory=lambda: Path(os.getenv("TWOPHASE_LIBRARY", FIXTURE_DIR / "cells.json"))
    )
    clk1_name: str = "clk_1"
    clk2_name: str = "clk_2"
    period: float = field(default_factory=lambda: float(os.getenv("TWOPHASE_PERIOD", 10.0)))
    duty: float = field(default_factory=lambda: float(os.getenv("TWOPHASE_DUTY", 0.49)))
    phase2_offset: float = 0.5
    seeds: int = field(default_factory=lambda: int(os.getenv("TWOPHASE_SEEDS", 16)))
    cycles: int = field(default_factory=lambda: int(os.getenv("TWOPHASE_CYCLES", 1000)))
    epsilon: float = 1e-9
    log_level: str = field(default_factory=lambda: os.getenv("TWOPHASE_LOG_LEVEL", "INFO"))


config = FlowConfig()
