"""
End-to-end conversion flow shared by the CLI and the tests.

    parse -> init_clock_ports -> variant transform -> retime -> assign phases
          -> connect_clk per phase -> map_dff_to_latch

Every pass is logged with its cell counts; the same records form the stage
log written next to the converted netlist.
"""
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .config import config
from .errors import ConfigError, RetimeError
from .models.canonical import emit_canonical, parse_canonical
from .models.core.library import load_library_file
from .retime import apply_retiming, assign_phases, build_retime_graph, min_area_retime, min_delay_retime
from .transform import (
    PhaseTag,
    TransformPlan,
    Variant,
    connect_clk,
    duplicate_ffs_recirc,
    init_clock_ports,
    map_dff_to_latch,
    transform_clock_gated,
    transform_recirc,
)
from .verify import check_equivalence
from .verilog import emit_verilog, parse_verilog

logger = logging.getLogger(__name__)

RETIME_MODES = ("off", "min-delay", "min-area", "both")
FORMATS = ("verilog", "canonical")


@dataclass
class PipelineConfig:
    input: str = None
    format: str = None  # inferred from the input suffix when unset
    library: str = field(default_factory=lambda: str(config.library_path))
    variant: str = Variant.RECIRC_MUX.value
    retime: str = "off"
    period: float = field(default_factory=lambda: config.period)
    duty: float = field(default_factory=lambda: config.duty)
    skew_table: str = None
    cycles: int = field(default_factory=lambda: config.cycles)
    seeds: int = field(default_factory=lambda: config.seeds)
    out: str = "out"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.variant not in {v.value for v in Variant}:
            raise ConfigError(f"unknown variant {self.variant!r}; expected one of {[v.value for v in Variant]}")
        if self.retime not in RETIME_MODES:
            raise ConfigError(f"unknown retime mode {self.retime!r}; expected one of {list(RETIME_MODES)}")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; expected one of {list(FORMATS)}")
        if not self.period > 0:
            raise ConfigError(f"period must be positive, got {self.period}")
        if self.cycles < 1 or self.seeds < 1:
            raise ConfigError("cycles and seeds must be at least 1")

    @classmethod
    def load(cls, path=None, **overrides):
        """Build from an optional JSON file; non-None ``overrides`` win."""
        data = {}
        if path is not None:
            try:
                data = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read config {path}: {e}") from None
            known = {f.name for f in fields(cls)}
            unknown = sorted(set(data) - known)
            if unknown:
                raise ConfigError(f"{path}: unknown config keys {unknown}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    @property
    def input_format(self):
        if self.format:
            return self.format
        return "canonical" if str(self.input).endswith(".json") else "verilog"

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class StageRecord:
    name: str
    sequential: int
    combinational: int
    total: int

    @classmethod
    def of(cls, name, netlist):
        counts = netlist.counts()
        logger.info(
            f"{name}: {counts['sequential']} sequential, {counts['combinational']} combinational, "
            f"{counts['total']} total"
        )
        return cls(name, counts["sequential"], counts["combinational"], counts["total"])


@dataclass
class FlowResult:
    netlist: object
    trace: object
    stages: list
    lags: object = None
    retimed: bool = False

    @property
    def warmup(self):
        return self.lags.max_abs if self.lags is not None and self.retimed else 0

    def stage_log(self):
        return [asdict(s) for s in self.stages]


def load_netlist(path, library, format=None):
    """Parse a Verilog or canonical JSON file (format inferred from the suffix)."""
    path = Path(path)
    text = path.read_text()
    fmt = format or ("canonical" if path.suffix == ".json" else "verilog")
    if fmt == "canonical":
        return parse_canonical(text, library)
    return parse_verilog(text, library, filename=str(path))


def retime_netlist(netlist, trace, mode, cycles=None, seeds=None):
    """Retime the single-clock flip-flop netlist, confirm equivalence and assign phases.

    Returns:
        tuple: (netlist, trace, lags, phases); phases is None when the lags
        are all zero and nothing moved

    Raises:
        RetimeError: the lags could not be realized, the retimed netlist is
            not equivalent to its input, or its registers cannot be split
            into two phases
    """
    graph = build_retime_graph(netlist)
    if mode == "min-area":
        lags = min_area_retime(graph)
    else:
        lags = min_delay_retime(graph)
        if mode == "both":
            lags = min_area_retime(graph, lags, period=lags.period)
    if lags.is_zero:
        return netlist, trace, lags, None
    retimed, new_trace = apply_retiming(netlist, graph, lags, trace)
    verdict = check_equivalence(netlist, retimed, n_cycles=cycles, n_seeds=seeds, warmup=lags.max_abs)
    if not verdict:
        d = verdict.divergence
        raise RetimeError(f"retimed netlist diverges at cycle {d.cycle} on {d.port} (seed {d.seed})")
    phases = assign_phases(retimed)
    return retimed, new_trace.with_phases(phases), lags, phases


def full_transform(netlist, variant=Variant.RECIRC_MUX, retime="off", plan=None, cycles=None, seeds=None):
    """Convert a single-clock flip-flop netlist into a two-phase latch netlist.

    Args:
        netlist (Netlist): validated flip-flop design with one clock port
        variant (Variant | str): control lowering
        retime (str): one of RETIME_MODES
        plan (TransformPlan): clock names (default from config)
        cycles, seeds: equivalence budget for the retiming check

    Returns:
        FlowResult
    """
    plan = plan or TransformPlan(variant=variant)
    if plan.variant is not Variant(variant):
        plan = replace(plan, variant=Variant(variant))
    stages = [StageRecord.of("parse", netlist)]

    n = init_clock_ports(netlist, plan)
    stages.append(StageRecord.of("init_clock_ports", n))
    if plan.variant is Variant.RECIRC_MUX:
        n, trace = duplicate_ffs_recirc(n, plan)
        stages.append(StageRecord.of("duplicate_ffs_recirc", n))
        n, trace = transform_recirc(n, trace, plan)
        stages.append(StageRecord.of("transform_recirc", n))
    else:
        n, trace = transform_clock_gated(n, plan)
        stages.append(StageRecord.of("transform_clock_gated", n))
    trace.check(n)

    lags, phases = None, None
    if retime != "off":
        try:
            n, trace, lags, phases = retime_netlist(n, trace, retime, cycles, seeds)
        except RetimeError as e:
            logger.warning(f"retiming skipped, keeping the unretimed placement: {e}")
        stages.append(StageRecord.of(f"retime[{retime}]", n))

    retimed = phases is not None
    if not retimed:
        phases = {name: phase for name, phase in trace.phases().items() if n.is_sequential(name)}
    stages.append(StageRecord.of("assign_phases", n))

    for phase in (PhaseTag.PHI1, PhaseTag.PHI2):
        group = [name for name, p in phases.items() if p is phase]
        n = connect_clk(n, group, plan.clock_for(phase))
    stages.append(StageRecord.of("connect_clk", n))

    n = map_dff_to_latch(n, phases, plan)
    stages.append(StageRecord.of("map_dff_to_latch", n))
    return FlowResult(n, trace, stages, lags, retimed)


def write_atomically(files):
    """Write every ``path -> text`` to a temporary file first, then rename all."""
    staged = []
    try:
        for path, text in files.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except OSError:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)
    return [path for _, path in staged]


def run_convert(cfg):
    """Body of ``twophase convert``: parse, transform, write all artifacts.

    Returns:
        tuple[FlowResult, list[Path]]: the flow result and the files written
    """
    library = load_library_file(cfg.library)
    netlist = load_netlist(cfg.input, library, cfg.input_format)
    result = full_transform(netlist, cfg.variant, cfg.retime, cycles=cfg.cycles, seeds=cfg.seeds)

    out = Path(cfg.out)
    stem = netlist.name
    files = {
        out / f"{stem}.v": emit_verilog(result.netlist),
        out / f"{stem}.json": emit_canonical(result.netlist),
        out / f"{stem}.trace.json": result.trace.to_json(),
        out / f"{stem}.stages.json": json.dumps(result.stage_log(), indent=2) + "\n",
    }
    if result.lags is not None:
        files[out / f"{stem}.lags.json"] = result.lags.to_json()
    written = write_atomically(files)
    logger.info(f"run_convert: wrote {len(written)} files to {out}")
    return result, written
