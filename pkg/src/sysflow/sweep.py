# The MIT License (MIT)
# © 2026 sysflow contributors
# fmt: off

# Global imports
import os
import csv
import asyncio
import itertools
from pathlib import Path
from dataclasses import dataclass
import numpy as np

# Local imports
from .errors import CrossValidationError, OutputError
from .logging import logger, P, T
from .model import Dataflow, MatrixDims, CostReport, cost_report
from .schemas import SweepSpec
from .simulator import random_operands, reference_matmul, simulate

CSV_HEADER = (
    "m", "n", "p", "dataflow", "s_r", "s_c", "t", "n_pe", "n_c", "energy_j", "is_optimal",
)


@dataclass(frozen=True)
class SweepRow:
    m: int
    n: int
    p: int
    flow: Dataflow
    s_r: int
    s_c: int
    t: int
    n_pe: int
    n_c: int
    energy_j: float
    is_optimal: bool

    @property
    def dims(self) -> MatrixDims:
        return MatrixDims(self.m, self.n, self.p)

    def to_record(self) -> list[str]:
        return [
            str(self.m), str(self.n), str(self.p), self.flow.value,
            str(self.s_r), str(self.s_c), str(self.t),
            str(self.n_pe), str(self.n_c),
            format_energy(self.energy_j),
            "true" if self.is_optimal else "false",
        ]


def format_energy(joules: float) -> str:
    """Scientific notation with six fractional mantissa digits and a bare exponent: ``3.975750e-8``."""
    mantissa, exponent = f"{joules:.6e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def generate_configs(spec: SweepSpec) -> list[MatrixDims]:
    """Cartesian product of the per-axis values, deduplicated, in lexicographic (m, n, p) order."""
    return sorted({
        MatrixDims(m, n, p)
        for m, n, p in itertools.product(spec.m_values, spec.n_values, spec.p_values)
    })


def rows_from_report(report: CostReport) -> list[SweepRow]:
    dims = report.dims
    return [
        SweepRow(
            m=dims.m, n=dims.n, p=dims.p, flow=cost.flow,
            s_r=cost.shape.s_r, s_c=cost.shape.s_c, t=cost.shape.t,
            n_pe=cost.n_pe, n_c=cost.n_c, energy_j=cost.energy_j,
            is_optimal=report.is_optimal(cost.flow),
        )
        for cost in report.per_dataflow
    ]


def cross_validate(report: CostReport, seed: int = 0) -> None:
    """
    Runs the functional simulator for every dataflow of ``report.dims`` and checks it
    against the reference product and the analytical cycle count.

    Raises:
        CrossValidationError: On the first disagreement, naming the config and flow.
    """
    dims = report.dims
    rng = np.random.default_rng([seed, dims.m, dims.n, dims.p])
    w, i = random_operands(dims, rng)
    expected = reference_matmul(w, i)
    for cost in report.per_dataflow:
        result = simulate(cost.flow, w, i)
        where = f"config {dims} flow {cost.flow.value}"
        if not np.array_equal(result.output, expected):
            raise CrossValidationError(f"{where}: simulator output differs from the reference product")
        if result.cycles != cost.n_c:
            raise CrossValidationError(
                f"{where}: simulator took {result.cycles} cycles, the model predicts {cost.n_c}"
            )
        if result.mac_count != dims.macs:
            raise CrossValidationError(
                f"{where}: simulator performed {result.mac_count} MACs, expected {dims.macs}"
            )
    logger.debug(f"Cross-validated {dims} against the simulator for all dataflows")


def evaluate_config(dims: MatrixDims, spec: SweepSpec) -> list[SweepRow]:
    """The three rows of one configuration; cross-validates small configurations first."""
    start = T()
    report = cost_report(dims, spec.cfg)
    if max(dims.as_tuple()) <= spec.cross_validate_limit:
        cross_validate(report, spec.seed)
    optimal = ", ".join(flow.value for flow in report.optimal)
    logger.debug(f"{P(str(dims), T() - start)} optimal: {optimal}")
    return rows_from_report(report)


async def _evaluate_all(configs: list[MatrixDims], spec: SweepSpec) -> list[list[SweepRow]]:
    # gather keeps input order, so the result does not depend on completion order
    return await asyncio.gather(*[asyncio.to_thread(evaluate_config, dims, spec) for dims in configs])


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """
    Evaluates every configuration of ``spec`` under all three dataflows.

    Returns:
        list[SweepRow]: Three rows per configuration, configurations in lexicographic
        order and dataflows in WS, IS, OS order.

    Raises:
        CrossValidationError: If the simulator disagrees with the model on a small config.
    """
    start = T()
    configs = generate_configs(spec)
    logger.info(
        f"Sweeping {len(configs)} configurations (cross-validating dims <= {spec.cross_validate_limit})"
    )
    try:
        groups = asyncio.run(_evaluate_all(configs, spec))
    except CrossValidationError as e:
        logger.error(f"Sweep aborted: {e}")
        raise
    rows = [row for group in groups for row in group]
    for group in groups:
        optimal = ", ".join(row.flow.value for row in group if row.is_optimal)
        logger.info(f"{group[0].dims}: optimal {{{optimal}}}")
    logger.info(f"{P('sweep', T() - start)} {len(rows)} rows")
    return rows


def optimal_by_config(rows: list[SweepRow]) -> dict[MatrixDims, tuple[Dataflow, ...]]:
    """Optimal flows per configuration, in row order."""
    result: dict[MatrixDims, tuple[Dataflow, ...]] = {}
    for row in rows:
        flows = result.setdefault(row.dims, ())
        if row.is_optimal:
            result[row.dims] = flows + (row.flow,)
    return result


def emit_csv(rows: list[SweepRow], path: str | os.PathLike) -> Path:
    """
    Writes rows as CSV with the header ``m,n,p,dataflow,s_r,s_c,t,n_pe,n_c,energy_j,is_optimal``.

    Raises:
        ValueError: If ``rows`` is empty; no file is created.
        OutputError: If the file cannot be written.
    """
    if not rows:
        raise ValueError("No sweep rows to write")
    path = Path(path)
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            writer.writerows(row.to_record() for row in rows)
    except OSError as e:
        logger.error(f"Could not write CSV {path}: {e}")
        raise OutputError(path, e) from e
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def read_csv(path: str | os.PathLike) -> list[SweepRow]:
    """Parses a CSV written by ``emit_csv``; energy comes back with the written precision."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path} does not have the sweep CSV header")
        return [
            SweepRow(
                m=int(record["m"]), n=int(record["n"]), p=int(record["p"]),
                flow=Dataflow.parse(record["dataflow"]),
                s_r=int(record["s_r"]), s_c=int(record["s_c"]), t=int(record["t"]),
                n_pe=int(record["n_pe"]), n_c=int(record["n_c"]),
                energy_j=float(record["energy_j"]),
                is_optimal=record["is_optimal"] == "true",
            )
            for record in reader
        ]


__all__ = [
    "SweepRow",
    "CSV_HEADER",
    "format_energy",
    "generate_configs",
    "rows_from_report",
    "cross_validate",
    "evaluate_config",
    "run_sweep",
    "optimal_by_config",
    "emit_csv",
    "read_csv",
]
