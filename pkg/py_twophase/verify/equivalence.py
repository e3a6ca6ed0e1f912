"""
Bounded sequential equivalence by co-simulation on random stimuli.
"""
import logging
from dataclasses import dataclass, field

from ..config import config
from ..errors import NetlistError, SimulationError
from ..models.builder import NetlistBuilder
from ..models.core.library import PinRole
from ..models.core.mixins import SerializableMixin
from ..sim.ff import simulate_ff
from ..sim.stimulus import MAX_LANES, Stimulus
from ..sim.two_phase import simulate_two_phase

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Divergence(SerializableMixin):
    cycle: int
    port: str
    expected: int
    got: int
    seed: int


@dataclass(frozen=True)
class EquivVerdict(SerializableMixin):
    equivalent: bool
    cycles: int
    seeds: tuple = field(default_factory=tuple)
    divergence: Divergence = None

    def __post_init__(self):
        if self.equivalent != (self.divergence is None):
            raise ValueError("a divergence is present exactly when the designs differ")

    def __bool__(self):
        return self.equivalent

    def to_dict(self):
        data = {"equivalent": self.equivalent, "cycles": self.cycles, "seeds": list(self.seeds)}
        if self.divergence is not None:
            data["divergence"] = self.divergence.to_dict()
        return data


def simulate(netlist, stimulus, schedule=None):
    """Latch designs go through the sub-step simulator, the rest cycle by cycle."""
    if netlist.latches:
        return simulate_two_phase(netlist, stimulus, schedule)
    return simulate_ff(netlist, stimulus)


def _ports(netlist):
    data = sorted(p.name for p in netlist.data_inputs)
    outputs = sorted(p.name for p in netlist.output_ports)
    return data, outputs


def check_equivalence(original, transformed, schedule=None, n_cycles=None, n_seeds=None, warmup=0, seeds=None):
    """Compare primary outputs of two designs under identical random inputs.

    Cycle k of one design is matched with cycle k of the other; the first
    ``warmup`` cycles are not compared. Lane k of the stimulus draws from
    seed k.

    Args:
        original (Netlist): reference design
        transformed (Netlist): design under check
        schedule (PhaseSchedule): sub-steps for latch designs
        n_cycles (int): cycles per seed (default from config)
        n_seeds (int): number of seeds 0..n-1 (default from config)
        warmup (int): leading cycles excluded from the comparison
        seeds: explicit seeds, overriding ``n_seeds``

    Returns:
        EquivVerdict: with the first divergence (lowest cycle, then port,
        then seed) when the designs differ

    Raises:
        SimulationError: data input or output port lists differ
    """
    cycles = n_cycles if n_cycles is not None else config.cycles
    seeds = tuple(seeds) if seeds is not None else tuple(range(n_seeds if n_seeds is not None else config.seeds))
    data, outputs = _ports(original)
    if _ports(transformed) != (data, outputs):
        raise SimulationError(
            f"port mismatch: {original.name} has inputs {data} outputs {outputs}, "
            f"{transformed.name} has inputs {_ports(transformed)[0]} outputs {_ports(transformed)[1]}"
        )

    first = None
    for start in range(0, len(seeds), MAX_LANES):
        chunk = seeds[start:start + MAX_LANES]
        stimulus = Stimulus.random(data, cycles, chunk)
        expected = simulate(original, stimulus, schedule)
        got = simulate(transformed, stimulus, schedule)
        found = _first_divergence(expected, got, outputs, warmup, chunk)
        if found and (first is None or (found.cycle, found.port, found.seed) < (first.cycle, first.port, first.seed)):
            first = found

    verdict = EquivVerdict(first is None, cycles, seeds, first)
    if verdict:
        logger.info(f"check_equivalence: {original.name} == {transformed.name} over {cycles} cycles x {len(seeds)} seeds")
    else:
        logger.info(f"check_equivalence: {transformed.name} diverges at cycle {first.cycle} on {first.port}")
    return verdict


def _first_divergence(expected, got, outputs, warmup, seeds):
    for cycle in range(warmup, len(expected)):
        for port in outputs:
            a = expected.values[cycle][expected.nets.index(port)]
            b = got.values[cycle][got.nets.index(port)]
            diff = a ^ b
            if diff:
                lane = (diff & -diff).bit_length() - 1
                return Divergence(cycle, port, (a >> lane) & 1, (b >> lane) & 1, seeds[lane])
    return None


def swap_mux_inputs(netlist, instance):
    """Exchange the two data inputs of a select-driven cell (fault injection)."""
    inst = netlist.instance(instance)
    kind = netlist.kind_of(inst)
    if not kind.pins_with_role(PinRole.SELECT):
        raise NetlistError(f"{instance} ({inst.kind}) has no select input")
    data = [p for p in kind.input_pins if kind.pin(p).role is not PinRole.SELECT]
    if len(data) != 2:
        raise NetlistError(f"{instance} ({inst.kind}) does not have exactly two data inputs")
    a, b = data
    builder = NetlistBuilder.from_netlist(netlist)
    builder.connect(inst.name, a, inst.pins[b])
    builder.connect(inst.name, b, inst.pins[a])
    return builder.build()
