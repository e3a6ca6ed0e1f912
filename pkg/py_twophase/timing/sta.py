"""
Latch timing with time borrowing.

Arrival times are relative to the start of the capturing latch's period.
A latch transparent when data arrives passes it on (borrowing from the next
stage); otherwise data departs at the opening edge. Primary inputs act as one
Φ2 launch point. Only paths ending on latch data pins are timed.
"""
import logging
from dataclasses import dataclass, field, replace

from ..config import config
from ..errors import InfeasiblePeriod, TimingError
from ..models.core.mixins import SerializableMixin
from ..models.core.netlist import topo_order_comb
from ..transform.trace import PhaseTag
from ..verify.latch_graph import clock_domain_of
from .clocks import ClockSpec

logger = logging.getLogger(__name__)

INPUTS = "$inputs"


@dataclass(frozen=True)
class LatchTimingPoint(SerializableMixin):
    name: str
    phase: PhaseTag
    arrival: float
    departure: float
    borrow: float
    max_borrow: float
    setup_slack: float = None
    fanin: dict = field(default_factory=dict)  # launching latch -> (min delay, max delay)

    def to_dict(self):
        return {
            "name": self.name,
            "phase": self.phase.value,
            "arrival": self.arrival,
            "borrow": self.borrow,
            "max_borrow": self.max_borrow,
            "setup_slack": self.setup_slack,
        }


@dataclass(frozen=True)
class HoldCheck(SerializableMixin):
    source: str
    target: str
    slack: float


@dataclass(frozen=True)
class TimingReport(SerializableMixin):
    period: float
    duty: float
    feasible: bool
    iterations: int
    max_tb: float = None
    act_tb: float = None
    worst_setup_slack: float = None
    worst_hold_slack: float = None
    skew_max: float = 0.0
    latches: tuple = ()
    holds: tuple = ()
    looping: tuple = ()
    late: tuple = ()  # latches whose arrival settles past close - setup

    @property
    def passed(self):
        """Feasible with no negative setup or hold slack."""
        eps = config.epsilon
        return self.feasible and all(
            s is None or s >= -eps for s in (self.worst_setup_slack, self.worst_hold_slack)
        )

    def to_dict(self):
        data = {
            "period": self.period,
            "duty": self.duty,
            "feasible": self.feasible,
            "iterations": self.iterations,
            "max_tb": self.max_tb,
            "act_tb": self.act_tb,
            "worst_setup_slack": self.worst_setup_slack,
            "worst_hold_slack": self.worst_hold_slack,
            "skew_max": self.skew_max,
            "latches": [p.to_dict() for p in self.latches],
        }
        if self.looping:
            data["looping"] = list(self.looping)
        if self.late:
            data["late"] = list(self.late)
        return data


def latch_paths(netlist, library=None):
    """Min and max combinational delay between launch points and latch data pins.

    Returns:
        dict: (launch, capture) -> (min ns, max ns); launch is a latch name
        or ``INPUTS`` for the primary inputs
    """
    library = library or netlist.library
    order = topo_order_comb(netlist)
    latches = netlist.latches
    if netlist.flip_flops:
        raise TimingError(f"timing needs a latch netlist; {netlist.flip_flops[0].name} is a flip-flop")
    data_pins = {}
    for inst in latches:
        data_pins.setdefault(inst.pins[library[inst.kind].data_pin], []).append(inst.name)

    launches = [(INPUTS, [p.name for p in netlist.data_inputs])]
    launches += [(inst.name, [inst.pins[library[inst.kind].output_pin]]) for inst in latches]

    paths = {}
    for launch, nets in launches:
        early = {net: 0.0 for net in nets}
        late = dict(early)
        for name in order:
            inst = netlist.instance(name)
            kind = library[inst.kind]
            reached = [inst.pins[p] for p in kind.input_pins if inst.pins[p] in late]
            if not reached:
                continue
            out = inst.pins[kind.output_pin]
            late[out] = max(late[n] for n in reached) + kind.timing.delay_max
            early[out] = min(early[n] for n in reached) + kind.timing.delay_min
        for net in sorted(late):
            for capture in data_pins.get(net, ()):
                paths[(launch, capture)] = (early[net], late[net])
    return paths


def _phases(netlist, clocks):
    return {inst.name: clock_domain_of(netlist, inst, clocks.clk1, clocks.clk2) for inst in netlist.latches}


def _propagate(netlist, clocks, library, phases, paths):
    """Gauss-Seidel arrival sweeps; returns (arrival, departure, sweeps)."""
    period = clocks.period
    names = sorted(phases)
    fanin = {n: [] for n in names}
    for (launch, capture), (_, late) in paths.items():
        fanin[capture].append((launch, late))
    dq = {n: library[netlist.instance(n).kind].timing.delay_max for n in names}
    start = {n: clocks.open(phases[n]) + clocks.skew_of(n) for n in names}
    departure = {n: start[n] + dq[n] for n in names}
    departure[INPUTS] = clocks.open(PhaseTag.PHI2)
    phase_of = dict(phases)
    phase_of[INPUTS] = PhaseTag.PHI2

    arrival = {}
    limit = len(names) + 1
    for sweep in range(1, limit + 1):
        changed = []
        for n in names:
            if fanin[n]:
                opens = clocks.open(phases[n])
                a = max(
                    departure[j] + late + (0.0 if opens > clocks.open(phase_of[j]) else -period)
                    for j, late in fanin[n]
                )
            else:
                a = start[n]
            if n not in arrival or abs(a - arrival[n]) > config.epsilon:
                changed.append(n)
            arrival[n] = a
            departure[n] = max(a, start[n]) + dq[n]
        if not changed:
            return arrival, departure, sweep
    raise InfeasiblePeriod(changed, limit)


def compute_arrivals(netlist, clocks=None, library=None):
    """Per-latch arrival, departure and borrow at the fixed point.

    Raises:
        InfeasiblePeriod: arrivals still grow after #latches + 1 sweeps
            (names the latches that changed in the last sweep), or some
            latch's settled arrival lies past its closing edge minus setup
            (names those latches)
    """
    clocks = clocks or ClockSpec()
    library = library or netlist.library
    phases = _phases(netlist, clocks)
    paths = latch_paths(netlist, library)
    arrival, departure, sweeps = _propagate(netlist, clocks, library, phases, paths)
    points = _points(netlist, clocks, library, phases, paths, arrival, departure)
    late = late_latches(setup_check(points, clocks, library, netlist))
    if late:
        raise InfeasiblePeriod(late, sweeps, loop=False)
    logger.info(f"compute_arrivals: {len(points)} latches converged in {sweeps} sweeps")
    return points


def late_latches(points):
    """Names of checked points whose data arrives after close - setup."""
    return [p.name for p in points if p.setup_slack is not None and p.setup_slack < -config.epsilon]


def _points(netlist, clocks, library, phases, paths, arrival, departure):
    points = []
    for n in sorted(phases):
        setup = library[netlist.instance(n).kind].timing.setup
        opens = clocks.open(phases[n]) + clocks.skew_of(n)
        points.append(
            LatchTimingPoint(
                name=n,
                phase=phases[n],
                arrival=arrival[n],
                departure=departure[n],
                borrow=max(0.0, arrival[n] - opens),
                max_borrow=clocks.pulse_width - setup,
                fanin={j: d for (j, c), d in sorted(paths.items()) if c == n},
            )
        )
    return points


def setup_check(points, clocks=None, library=None, netlist=None):
    """Fill in each point's setup slack: close - (arrival + setup + skew).

    ``library`` and ``netlist`` supply the latch setup times; without them
    setup is taken as 0.
    """
    clocks = clocks or ClockSpec()
    checked = []
    for p in points:
        setup = 0.0
        if netlist is not None:
            setup = (library or netlist.library)[netlist.instance(p.name).kind].timing.setup
        slack = clocks.close(p.phase) - (p.arrival + setup + clocks.skew_of(p.name))
        checked.append(replace(p, setup_slack=slack))
    return checked


def hold_slack(d_to_q, min_path, separation, pulse_width, hold, skew_capture, skew_launch, period):
    """(δ_DQ + δ_path + S) - (T_i + hold + skew_i - skew_j - T_c)."""
    return (d_to_q + min_path + separation) - (pulse_width + hold + skew_capture - skew_launch - period)


def hold_check(netlist, clocks=None, library=None, launch_dq=False):
    """Hold slack per latch-to-latch data path.

    Args:
        launch_dq: use the launching latch's minimum D-to-Q delay instead of
            the capturing latch's

    Returns:
        list[HoldCheck]: sorted by (source, target)
    """
    clocks = clocks or ClockSpec()
    library = library or netlist.library
    phases = _phases(netlist, clocks)
    return _holds(netlist, clocks, library, phases, latch_paths(netlist, library), launch_dq)


def _holds(netlist, clocks, library, phases, paths, launch_dq):
    checks = []
    for (j, i), (early, _) in sorted(paths.items()):
        if j == INPUTS:
            continue
        capture = library[netlist.instance(i).kind].timing
        launch = library[netlist.instance(j).kind].timing
        slack = hold_slack(
            (launch if launch_dq else capture).d_to_q_min,
            early,
            clocks.separation(phases[j], phases[i]),
            clocks.pulse_width,
            capture.hold,
            clocks.skew_of(i),
            clocks.skew_of(j),
            clocks.period,
        )
        checks.append(HoldCheck(j, i, slack))
    return checks


def report(netlist, clocks=None, library=None, launch_dq=False):
    """Full timing report; an infeasible period yields ``feasible=False``.

    A borrowing loop leaves ``latches`` empty and names the loop in
    ``looping``. Arrivals that settle past a closing edge keep the per-latch
    points (with their negative setup slack) and are named in ``late``.
    """
    clocks = clocks or ClockSpec()
    library = library or netlist.library
    phases = _phases(netlist, clocks)
    paths = latch_paths(netlist, library)
    skew_max = clocks.skew_max(phases)
    try:
        arrival, departure, sweeps = _propagate(netlist, clocks, library, phases, paths)
    except InfeasiblePeriod as e:
        logger.warning(f"report: {e}")
        return TimingReport(
            clocks.period, clocks.duty, False, e.iterations, skew_max=skew_max, looping=tuple(e.latches)
        )
    points = _points(netlist, clocks, library, phases, paths, arrival, departure)
    points = setup_check(points, clocks, library, netlist)
    holds = _holds(netlist, clocks, library, phases, paths, launch_dq)
    late = late_latches(points)
    if late:
        logger.warning(f"report: {InfeasiblePeriod(late, sweeps, loop=False)}")
    result = TimingReport(
        period=clocks.period,
        duty=clocks.duty,
        feasible=not late,
        iterations=sweeps,
        max_tb=max((p.max_borrow for p in points), default=0.0),
        act_tb=max((p.borrow for p in points), default=0.0),
        worst_setup_slack=min((p.setup_slack for p in points), default=None),
        worst_hold_slack=min((h.slack for h in holds), default=None),
        skew_max=skew_max,
        latches=tuple(points),
        holds=tuple(holds),
        late=tuple(late),
    )
    logger.info(
        f"report: period {clocks.period:g}, act TB {result.act_tb:g}, "
        f"worst setup {result.worst_setup_slack}, worst hold {result.worst_hold_slack}"
    )
    return result
