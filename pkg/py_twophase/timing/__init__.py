"""
Latch-aware static timing with time borrowing.
"""

from .clocks import ClockSpec, load_skew_table
from .sta import (
    HoldCheck,
    LatchTimingPoint,
    TimingReport,
    compute_arrivals,
    hold_check,
    hold_slack,
    latch_paths,
    report,
    setup_check,
)

__all__ = [
    'ClockSpec',
    'load_skew_table',
    'HoldCheck',
    'LatchTimingPoint',
    'TimingReport',
    'compute_arrivals',
    'hold_check',
    'hold_slack',
    'latch_paths',
    'report',
    'setup_check',
]
