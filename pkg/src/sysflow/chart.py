# The MIT License (MIT)
# © 2026 sysflow contributors
# fmt: off

# Global imports
import os
from pathlib import Path
import matplotlib
from matplotlib.figure import Figure

# Local imports
from .errors import OutputError
from .logging import logger
from .model import DATAFLOWS
from .sweep import SweepRow

FLOW_COLORS = {
    "WS": "#4a90d9",
    "IS": "#e8a33d",
    "OS": "#5aa469",
}
OPTIMAL_HATCH = "//"
BAR_WIDTH = 0.26

# Fixed ids and no timestamp, so the same rows always give the same bytes.
SVG_RC = {
    "svg.hashsalt": "sysflow",
    "svg.fonttype": "path",
}
SVG_METADATA = {"Date": None}


def _group(rows: list[SweepRow]) -> list[tuple[str, list[SweepRow]]]:
    groups: dict[tuple[int, int, int], list[SweepRow]] = {}
    for row in rows:
        groups.setdefault((row.m, row.n, row.p), []).append(row)
    return [(f"{m}×{n}×{p}", group) for (m, n, p), group in groups.items()]


def build_chart(rows: list[SweepRow]) -> Figure:
    """
    Grouped bar chart of energy per configuration: one group per (M, N, P) in row
    order, one bar per dataflow, log-scale energy axis. Optimal bars are hatched
    and outlined.
    """
    if not rows:
        raise ValueError("No sweep rows to plot")
    groups = _group(rows)

    # no pyplot: the host program keeps its backend
    fig = Figure(figsize=(max(6.0, 1.1 * len(groups) + 2.0), 4.5), layout="tight")
    ax = fig.subplots()
    for offset, flow in enumerate(DATAFLOWS):
        xs, heights, hatches, edges = [], [], [], []
        for index, (_, group) in enumerate(groups):
            row = next((r for r in group if r.flow is flow), None)
            if row is None:
                continue
            xs.append(index + (offset - 1) * BAR_WIDTH)
            heights.append(row.energy_j)
            hatches.append(OPTIMAL_HATCH if row.is_optimal else "")
            edges.append("black" if row.is_optimal else "none")
        if not xs:
            continue
        bars = ax.bar(
            xs, heights, width=BAR_WIDTH, color=FLOW_COLORS[flow.value],
            edgecolor=edges, linewidth=1.0, label=flow.value,
        )
        for bar, hatch in zip(bars, hatches):
            bar.set_hatch(hatch)

    ax.set_yscale("log")
    ax.set_xticks(range(len(groups)))
    ax.set_xticklabels([label for label, _ in groups], rotation=30, ha="right")
    ax.set_xlabel("Matrix configuration (M×N×P)")
    ax.set_ylabel("Energy (J, log scale)")
    ax.set_title("Dataflow energy comparison (hatched: minimum energy)")
    ax.grid(axis="y", which="major", color="#e0e0e0", linewidth=0.8)
    ax.set_axisbelow(True)
    ax.legend(title="Dataflow")
    return fig


def emit_chart(rows: list[SweepRow], path: str | os.PathLike) -> Path:
    """
    Writes the energy comparison chart as a standalone SVG.

    Raises:
        ValueError: If ``rows`` is empty.
        OutputError: If the file cannot be written.
    """
    path = Path(path)
    with matplotlib.rc_context(SVG_RC):
        fig = build_chart(rows)
        try:
            fig.savefig(path, format="svg", metadata=SVG_METADATA)
        except OSError as e:
            logger.error(f"Could not write chart {path}: {e}")
            raise OutputError(path, e) from e
    logger.info(f"Wrote energy chart to {path}")
    return path


__all__ = ["build_chart", "emit_chart", "FLOW_COLORS"]
