"""
Trace dumps: long-format CSV and a minimal VCD waveform.
"""
import logging
from datetime import datetime, timezone

logger = logging.getLogger(__name__)


def write_trace_csv(trace, path, lane=0):
    trace.to_frame(lane).to_csv(path, index=False)
    logger.debug(f"Wrote {len(trace)} cycles to {path}")


def _vcd_id(n):
    chars = []
    n += 1
    while n:
        n, r = divmod(n - 1, 94)
        chars.append(chr(33 + r))
    return "".join(chars)


def trace_to_vcd(trace, lane=0, timescale="1ns", period=10, module="top", date=None):
    """Render one lane of a trace as VCD text, one sample per clock period."""
    date = date or datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S")
    trace = trace.lane(lane)
    ids = {net: _vcd_id(i) for i, net in enumerate(trace.nets)}
    lines = [
        f"$date {date} $end",
        "$version py_twophase $end",
        f"$timescale {timescale} $end",
        f"$scope module {module} $end",
    ]
    for net in trace.nets:
        lines.append(f"$var wire 1 {ids[net]} {net.replace(' ', '_')} $end")
    lines += ["$upscope $end", "$enddefinitions $end"]

    last = {}
    for cycle, row in enumerate(trace.values):
        changes = []
        for net, bit in zip(trace.nets, row):
            if last.get(net) != bit:
                changes.append(f"{bit}{ids[net]}")
                last[net] = bit
        if changes or cycle == 0:
            lines.append(f"#{cycle * period}")
            lines.extend(changes)
    lines.append(f"#{len(trace) * period}")
    return "\n".join(lines) + "\n"


def write_trace_vcd(trace, path, lane=0, **kwargs):
    with open(path, "w") as f:
        f.write(trace_to_vcd(trace, lane, **kwargs))
