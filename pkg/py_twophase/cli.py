"""
Command-line entry point: ``twophase {convert,verify,sta,report,parse,simulate}``.

Exit codes: 0 success, 1 verification or timing failure, 2 usage, parse
or pass error.
"""
import json
import logging
import sys
from pathlib import Path

import click
import pandas as pd

from .config import config
from .errors import TwoPhaseError
from .models.canonical import emit_canonical
from .models.core.library import load_library_file
from .models.core.netlist import validate
from .pipeline import FORMATS, RETIME_MODES, PipelineConfig, load_netlist, run_convert, write_atomically
from .sim import Stimulus, write_trace_csv, write_trace_vcd
from .timing import ClockSpec, load_skew_table, report as timing_report
from .transform import Variant
from .verify import build_latch_graph, check_equivalence
from .verify import simulate as run_simulation
from .verilog import emit_verilog

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def _fail(e):
    click.echo(f"error: {e}", err=True)
    sys.exit(EXIT_ERROR)


def _run(fn):
    """Run a command body, mapping pass and I/O errors to exit status 2."""
    try:
        return fn()
    except TwoPhaseError as e:
        logger.debug(f"{type(e).__name__} in {fn.__qualname__}", exc_info=True)
        _fail(e)
    except OSError as e:
        logger.error(f"I/O error: {e}", exc_info=True)
        _fail(e)


def _clocks(period, duty, skew_table):
    skew = load_skew_table(skew_table) if skew_table else {}
    return ClockSpec(
        period=period if period is not None else config.period,
        duty=duty if duty is not None else config.duty,
        skew=skew,
    )


def _library(path):
    return load_library_file(path or config.library_path)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
def main(verbose):
    """Convert single-clock flip-flop netlists into two-phase latch netlists."""
    level = logging.DEBUG if verbose else getattr(logging, str(config.log_level).upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


@main.command()
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="JSON pipeline config.")
@click.option("--format", type=click.Choice(FORMATS), help="Input format (default: from suffix).")
@click.option("--library", type=click.Path(exists=True, dir_okay=False), help="Cell library JSON.")
@click.option("--variant", type=click.Choice([v.value for v in Variant]), help="Control lowering variant.")
@click.option("--retime", type=click.Choice(RETIME_MODES), help="Retiming mode.")
@click.option("--period", type=float, help="Clock period in ns.")
@click.option("--duty", type=float, help="Per-phase duty cycle.")
@click.option("--skew-table", type=click.Path(exists=True, dir_okay=False), help="Per-latch skew JSON.")
@click.option("--seeds", type=int, help="Equivalence seeds.")
@click.option("--cycles", type=int, help="Equivalence cycles per seed.")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
def convert(input, config_path, **flags):
    """Run the full conversion flow on INPUT and write the artifacts."""
    def body():
        cfg = PipelineConfig.load(config_path, input=input, **flags)
        result, written = run_convert(cfg)
        for path in written:
            click.echo(str(path))
        return result

    _run(body)


@main.command()
@click.argument("netlist", type=click.Path(exists=True, dir_okay=False))
@click.argument("original", type=click.Path(exists=True, dir_okay=False))
@click.option("--library", type=click.Path(exists=True, dir_okay=False))
@click.option("--seeds", type=int, help="Equivalence seeds.")
@click.option("--cycles", type=int, help="Equivalence cycles per seed.")
@click.option("--warmup", type=int, default=0, show_default=True, help="Leading cycles not compared.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the report JSON here.")
def verify(netlist, original, library, seeds, cycles, warmup, out_path):
    """Two-color check NETLIST and compare it against ORIGINAL."""
    def body():
        lib = _library(library)
        transformed = load_netlist(netlist, lib)
        reference = load_netlist(original, lib)
        _, violations = build_latch_graph(transformed)
        warnings = [d for d in validate(transformed) if d.severity == "warning"]
        verdict = check_equivalence(reference, transformed, n_cycles=cycles, n_seeds=seeds, warmup=warmup)
        return violations, warnings, verdict

    violations, warnings, verdict = _run(body)
    data = {
        "two_color": {"violations": [v.to_dict() for v in violations], "warnings": [str(d) for d in warnings]},
        "equivalence": verdict.to_dict(),
    }
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if out_path:
        write_atomically({out_path: text})
    click.echo(text, nl=False)
    sys.exit(EXIT_OK if not violations and verdict.equivalent else EXIT_FAILED)


@main.command()
@click.argument("netlist", type=click.Path(exists=True, dir_okay=False))
@click.option("--library", type=click.Path(exists=True, dir_okay=False))
@click.option("--period", type=float, help="Clock period in ns.")
@click.option("--duty", type=float, help="Per-phase duty cycle.")
@click.option("--skew-table", type=click.Path(exists=True, dir_okay=False), help="Per-latch skew JSON.")
@click.option("--launch-dq", is_flag=True, help="Hold check uses the launching latch's D-to-Q delay.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the report JSON here.")
def sta(netlist, library, period, duty, skew_table, launch_dq, out_path):
    """Latch timing report for NETLIST."""
    def body():
        lib = _library(library)
        design = load_netlist(netlist, lib)
        return timing_report(design, _clocks(period, duty, skew_table), launch_dq=launch_dq)

    result = _run(body)
    text = result.to_json()
    if out_path:
        write_atomically({out_path: text})
    click.echo(text, nl=False)
    sys.exit(EXIT_OK if result.passed else EXIT_FAILED)


def summary_row(path, design, result):
    counts = design.counts()
    return {
        "design": design.name,
        "file": Path(path).name,
        "period": result.period,
        "max_tb": result.max_tb,
        "act_tb": result.act_tb,
        "worst_setup": result.worst_setup_slack,
        "worst_hold": result.worst_hold_slack,
        "seq": counts["sequential"],
        "comb": counts["combinational"],
        "total": counts["total"],
    }


@main.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--library", type=click.Path(exists=True, dir_okay=False))
@click.option("--period", type=float, help="Clock period in ns.")
@click.option("--duty", type=float, help="Per-phase duty cycle.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), help="Also write the table as CSV.")
def report(paths, library, period, duty, csv_path):
    """Summary table over converted netlists."""
    def body():
        lib = _library(library)
        clocks = _clocks(period, duty, None)
        rows = []
        for path in paths:
            design = load_netlist(path, lib)
            rows.append(summary_row(path, design, timing_report(design, clocks)))
        return pd.DataFrame(rows)

    table = _run(body)
    if csv_path:
        write_atomically({csv_path: table.to_csv(index=False)})
    click.echo(table.to_string(index=False))


@main.command()
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("--library", type=click.Path(exists=True, dir_okay=False))
@click.option("--to", "target", type=click.Choice(FORMATS), required=True, help="Output format.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Output file (default: stdout).")
def parse(input, library, target, out_path):
    """Convert INPUT between structural Verilog and canonical JSON."""
    def body():
        design = load_netlist(input, _library(library))
        return emit_canonical(design) if target == "canonical" else emit_verilog(design)

    text = _run(body)
    if out_path:
        write_atomically({out_path: text})
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("netlist", type=click.Path(exists=True, dir_okay=False))
@click.option("--library", type=click.Path(exists=True, dir_okay=False))
@click.option("--cycles", type=int, default=20, show_default=True, help="Cycles to simulate.")
@click.option("--seed", type=int, default=0, show_default=True, help="Random stimulus seed.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), help="Write the trace as CSV.")
@click.option("--vcd", "vcd_path", type=click.Path(dir_okay=False), help="Write the trace as VCD.")
def simulate(netlist, library, cycles, seed, csv_path, vcd_path):
    """Simulate NETLIST on random inputs and print the output trace."""
    def body():
        design = load_netlist(netlist, _library(library))
        inputs = sorted(p.name for p in design.data_inputs)
        return design, run_simulation(design, Stimulus.random(inputs, cycles, [seed]))

    design, trace = _run(body)
    if csv_path:
        write_trace_csv(trace, csv_path)
    if vcd_path:
        write_trace_vcd(trace, vcd_path, module=design.name)
    table = trace.to_frame().pivot(index="cycle", columns="net", values="value")
    click.echo(table.to_string())


if __name__ == "__main__":
    main()
