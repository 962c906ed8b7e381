# The MIT License (MIT)
# © 2026 sysflow contributors
# fmt: off

"""
sysflow command line.

Usage:
    sysflow analyze   -m M -n N -p P [--format json]
    sysflow recommend -m M -n N -p P [--format json]
    sysflow simulate  -m M -n N -p P --flow {ws,is,os} [--seed S] [--show-trace]
    sysflow sweep     [--config sweep.json] [--csv sweep.csv] [--svg sweep.svg]

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

# Standard library
import sys
import json
import argparse

# Third party
import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table
from matplotlib.ticker import EngFormatter

# Local
from .chart import emit_chart
from .config import ENV_HELP, load_sweep_spec, pe_config_from_env
from .errors import CrossValidationError, OutputError, TraceTooLargeError
from .logging import logger, debug, trace_logging
from .model import Dataflow, MatrixDims, cost_report, cycle_count, map_dims, recommend
from .schemas import PEConfig
from .simulator import random_operands, reference_matmul, render_trace, simulate, trace
from .sweep import emit_csv, optimal_by_config, run_sweep

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

SIMULATE_DIM_LIMIT = 64

JOULES = EngFormatter(unit="J", places=3)
SECONDS = EngFormatter(unit="s", places=3)


class UsageError(Exception):
    """Raised by command handlers for bad input discovered after parsing."""


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text}")
    return value


def dataflow_arg(text: str) -> Dataflow:
    try:
        return Dataflow.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--debug', action='store_true', help='Enable debug logging')
    common.add_argument('--trace-log', action='store_true', help='Log every simulated cycle')
    common.add_argument('--format', choices=('text', 'json'), default='text', help='Output format')

    dims = argparse.ArgumentParser(add_help=False)
    dims.add_argument('-m', type=positive_int, required=True, help='Rows of W and O')
    dims.add_argument('-n', type=positive_int, required=True, help='Columns of W, rows of I')
    dims.add_argument('-p', type=positive_int, required=True, help='Columns of I and O')

    energy = argparse.ArgumentParser(add_help=False)
    energy.add_argument('--power-w', type=positive_float, default=None, help='Power per PE in watts')
    energy.add_argument('--clock-hz', type=positive_float, default=None, help='PE clock frequency in hertz')

    parser = argparse.ArgumentParser(
        prog='sysflow',
        description='Systolic-array dataflow cost model, functional simulator and sweep harness.',
        epilog=ENV_HELP,
    )
    commands = parser.add_subparsers(dest='command', required=True)

    analyze = commands.add_parser(
        'analyze', parents=[common, dims, energy], epilog=ENV_HELP,
        help='Cycles, PEs and energy of WS/IS/OS for one GEMM',
    )
    analyze.set_defaults(handler=cmd_analyze)

    rec = commands.add_parser(
        'recommend', parents=[common, dims, energy], epilog=ENV_HELP,
        help='Minimum-energy dataflow with a rationale',
    )
    rec.set_defaults(handler=cmd_recommend)

    sim = commands.add_parser(
        'simulate', parents=[common, dims], epilog=ENV_HELP,
        help='Run the cycle-stepped simulator on seeded random operands and verify it',
    )
    sim.add_argument('--flow', type=dataflow_arg, required=True, help='ws, is or os')
    sim.add_argument('--seed', type=int, default=0, help='Seed for the operand generator (PCG64)')
    sim.add_argument(
        '--allow-large', action='store_true',
        help=f'Allow dimensions above {SIMULATE_DIM_LIMIT} (and traces above 16)',
    )
    sim.add_argument('--show-trace', action='store_true', help='Print the per-cycle trace')
    sim.set_defaults(handler=cmd_simulate)

    sweep = commands.add_parser(
        'sweep', parents=[common, energy], epilog=ENV_HELP,
        help='Evaluate a grid of matrix sizes and write CSV and SVG reports',
    )
    sweep.add_argument('--config', default=None, help='Sweep JSON document (default: ./sweep.json if present)')
    sweep.add_argument('--csv', default='sweep.csv', help='CSV output path')
    sweep.add_argument('--svg', default='sweep.svg', help='SVG chart output path')
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def resolve_cfg(args) -> PEConfig:
    """Built-in defaults, then environment overrides, then command-line flags."""
    cfg = pe_config_from_env()
    overrides = {}
    if getattr(args, 'power_w', None) is not None:
        overrides['power_per_pe'] = args.power_w
    if getattr(args, 'clock_hz', None) is not None:
        overrides['clock_hz'] = args.clock_hz
    return cfg.model_copy(update=overrides) if overrides else cfg


def _dims(args) -> MatrixDims:
    return MatrixDims(args.m, args.n, args.p)


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _console() -> Console:
    return Console(width=120, highlight=False)


def _flows(flows) -> str:
    return ", ".join(flow.value for flow in flows)


def cmd_analyze(args) -> int:
    report = cost_report(_dims(args), resolve_cfg(args))
    if args.format == 'json':
        _emit_json(report.to_dict())
        return EXIT_OK

    table = Table(title=f"GEMM {report.dims.m}×{report.dims.n}×{report.dims.p}")
    for column in ("Dataflow", "S_R", "S_C", "T", "N_PE", "N_C", "Energy", "Latency", "Util.", "Optimal"):
        table.add_column(column, justify="left" if column == "Dataflow" else "right", no_wrap=True)
    for cost in report.per_dataflow:
        table.add_row(
            cost.flow.value,
            str(cost.shape.s_r), str(cost.shape.s_c), str(cost.shape.t),
            str(cost.n_pe), str(cost.n_c),
            JOULES(cost.energy_j), SECONDS(cost.latency_s),
            f"{cost.utilization:.1%}",
            "yes" if report.is_optimal(cost.flow) else "",
        )
    console = _console()
    console.print(table)
    console.print(f"Optimal: {_flows(report.optimal)}")
    return EXIT_OK


def cmd_recommend(args) -> int:
    rec = recommend(_dims(args), resolve_cfg(args))
    if args.format == 'json':
        _emit_json(rec.to_dict())
        return EXIT_OK
    headline = _flows(rec.optimal)
    if len(rec.optimal) > 1:
        headline += f" ({len(rec.optimal)}-way tie)"
    print(f"Recommended: {headline}")
    print(rec.rationale)
    return EXIT_OK


def cmd_simulate(args) -> int:
    dims = _dims(args)
    if max(dims.as_tuple()) > SIMULATE_DIM_LIMIT and not args.allow_large:
        raise UsageError(
            f"Dimensions above {SIMULATE_DIM_LIMIT} are slow to simulate; pass --allow-large to run {dims}"
        )
    flow = args.flow
    w, i = random_operands(dims, np.random.default_rng(args.seed))
    trace_text = None
    if args.show_trace:
        trace_text = render_trace(trace(flow, w, i, allow_large=args.allow_large))

    result = simulate(flow, w, i)
    expected_cycles = cycle_count(map_dims(dims, flow))
    output_matches = bool(np.array_equal(result.output, reference_matmul(w, i)))
    passed = output_matches and result.cycles == expected_cycles and result.mac_count == dims.macs
    verdict = "PASS" if passed else "FAIL"

    if args.format == 'json':
        payload = {
            "dataflow": flow.value,
            "dims": {"m": dims.m, "n": dims.n, "p": dims.p},
            "seed": args.seed,
            "cycles": result.cycles,
            "expected_cycles": expected_cycles,
            "mac_count": result.mac_count,
            "expected_macs": dims.macs,
            "output_matches": output_matches,
            "verdict": verdict,
        }
        if trace_text is not None:
            payload["trace"] = trace_text
        _emit_json(payload)
    else:
        if trace_text is not None:
            print(trace_text)
        print(f"{flow.value} {dims} seed={args.seed}")
        print(f"cycles: {result.cycles} (model {expected_cycles})")
        print(f"MACs: {result.mac_count} (expected {dims.macs})")
        print(f"output: {'matches' if output_matches else 'DIFFERS FROM'} the reference product")
        print(verdict)
    if not passed:
        logger.error(f"Simulation of {flow.value} {dims} failed verification")
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_sweep(args) -> int:
    spec = load_sweep_spec(args.config, base_cfg=pe_config_from_env())
    overrides = {}
    if args.power_w is not None:
        overrides['power_per_pe_w'] = args.power_w
    if args.clock_hz is not None:
        overrides['clock_hz'] = args.clock_hz
    if overrides:
        spec = spec.model_copy(update=overrides)

    rows = run_sweep(spec)
    csv_path = emit_csv(rows, args.csv)
    svg_path = emit_chart(rows, args.svg)
    optimal = optimal_by_config(rows)

    if args.format == 'json':
        _emit_json({
            "csv": str(csv_path),
            "svg": str(svg_path),
            "rows": len(rows),
            "optimal": {str(dims): [flow.value for flow in flows] for dims, flows in optimal.items()},
        })
        return EXIT_OK

    table = Table(title=f"{len(optimal)} configurations, {len(rows)} rows")
    table.add_column("M×N×P", no_wrap=True)
    table.add_column("Optimal", no_wrap=True)
    for dims, flows in optimal.items():
        table.add_row(f"{dims.m}×{dims.n}×{dims.p}", _flows(flows))
    console = _console()
    console.print(table)
    console.print(f"CSV: {csv_path}")
    console.print(f"SVG: {svg_path}")
    return EXIT_OK


def _report_validation(e: ValidationError) -> None:
    for error in e.errors():
        where = ".".join(str(part) for part in error["loc"]) or "<document>"
        print(f"config error: {where}: {error['msg']}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.debug:
        debug()
    if args.trace_log:
        trace_logging()

    try:
        return args.handler(args)
    except ValidationError as e:
        _report_validation(e)
        return EXIT_USAGE
    except (UsageError, TraceTooLargeError, FileNotFoundError, ValueError, OutputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CrossValidationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY_FAILED


__all__ = ["main", "build_parser", "cmd_analyze", "cmd_recommend", "cmd_simulate", "cmd_sweep"]
