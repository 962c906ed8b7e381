# The MIT License (MIT)
# © 2026 sysflow contributors
# fmt: off

"""
Cycle-stepped functional model of a systolic array computing ``O = W · I``.

The grid is sized to the stationary matrix (see ``model.map_dims``). Every cycle each
PE latches the values its west and north neighbours presented at the end of the
previous cycle (edge PEs latch the skewed edge feeds), performs at most one MAC and
presents its east and south outputs. Cycles are numbered from 1.

    WS  PE(r,c) holds W[r][c]. I[c][j] streams down column c, partial sums for
        O[r][j] move east along row r and leave at the east edge.
    IS  PE(r,c) holds I[r][c]. W[j][r] streams east along row r, partial sums for
        O[j][c] move south along column c and leave at the south edge.
    OS  PE(r,c) accumulates O[r][c]. W[r][j] streams east along row r, I[j][c]
        streams down column c. After the last MAC the accumulators shift south one
        row per cycle into the output buffer.

WS and IS spend S_R prefill cycles shifting the stationary matrix in from the top.
With these conventions the last output is written at cycle 2·S_R + S_C + T − 2 for
all three dataflows; docs/simulator.md walks through the derivation.
"""

# Global imports
from enum import Enum
from dataclasses import dataclass, field
from typing import Iterator
import numpy as np

# Local imports
from .errors import DimensionMismatchError, TraceTooLargeError
from .logging import logger, TRACE_LEVEL_NUM
from .model import Dataflow, MatrixDims, map_dims

TRACE_DIM_LIMIT = 16
OPERAND_LOW = -8
OPERAND_HIGH = 8


class Phase(str, Enum):
    PREFILL = "prefill"
    STREAM = "stream"
    DRAIN = "drain"


@dataclass
class ProcessingElement:
    """
    One MAC unit and its registers.

    ``stationary`` holds the resident weight (WS), input (IS) or accumulator (OS).
    ``west``/``north`` are the operands latched this cycle; ``east``/``south`` are
    what the PE presents to its neighbours at the end of the cycle.
    """

    row: int
    col: int
    stationary: float | None = None
    west: float | None = None
    north: float | None = None
    east: float | None = None
    south: float | None = None
    macs: int = 0

    def partial_sum(self, flow: Dataflow) -> float | None:
        if flow is Dataflow.WS:
            return self.east
        if flow is Dataflow.IS:
            return self.south
        return self.stationary

    def step(self, flow: Dataflow) -> None:
        """Performs this cycle's work for the streaming phase."""
        if flow is Dataflow.WS:
            # north: input element, west: partial sum
            x, psum = self.north, self.west
            if x is None or psum is None:
                self.east, self.south = None, None
                return
            self.east = psum + self.stationary * x
            self.south = x
        elif flow is Dataflow.IS:
            # west: weight element, north: partial sum
            w, psum = self.west, self.north
            if w is None or psum is None:
                self.east, self.south = None, None
                return
            self.south = psum + w * self.stationary
            self.east = w
        else:
            w, x = self.west, self.north
            self.east, self.south = w, x
            if w is None or x is None:
                return
            self.stationary = self.stationary + w * x
        self.macs += 1


@dataclass(frozen=True)
class PESnapshot:
    row: int
    col: int
    stationary: float | None
    west: float | None
    north: float | None
    partial_sum: float | None


@dataclass(frozen=True)
class CycleSnapshot:
    cycle: int
    phase: Phase
    pes: tuple[PESnapshot, ...]
    output: tuple[tuple[float | None, ...], ...]

    @property
    def written(self) -> int:
        return sum(value is not None for row in self.output for value in row)

    @property
    def total(self) -> int:
        return sum(len(row) for row in self.output)


@dataclass(frozen=True, eq=False)
class SimResult:
    output: np.ndarray
    cycles: int
    mac_count: int

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimResult):
            return NotImplemented
        return (
            self.cycles == other.cycles
            and self.mac_count == other.mac_count
            and self.output.dtype == other.output.dtype
            and np.array_equal(self.output, other.output)
        )


def as_matrix(values, name: str) -> np.ndarray:
    """Converts array-like ``values`` into a non-empty 2-D float64 matrix."""
    matrix = np.array(values, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a 2-D matrix, got {matrix.ndim} dimension(s)")
    if matrix.size == 0:
        raise DimensionMismatchError(f"{name} must not be empty, got shape {matrix.shape}")
    return matrix


def _check_operands(w, i) -> tuple[np.ndarray, np.ndarray]:
    w = as_matrix(w, "w")
    i = as_matrix(i, "i")
    if w.shape[1] != i.shape[0]:
        raise DimensionMismatchError(
            f"w is {w.shape[0]}x{w.shape[1]} but i is {i.shape[0]}x{i.shape[1]}; "
            "w.cols must equal i.rows"
        )
    return w, i


def reference_matmul(w, i) -> np.ndarray:
    """Straightforward triple-loop product, the correctness oracle for the simulator."""
    w, i = _check_operands(w, i)
    m, n = w.shape
    p = i.shape[1]
    out = np.zeros((m, p), dtype=np.float64)
    for r in range(m):
        for c in range(p):
            acc = 0.0
            for k in range(n):
                acc += w[r, k] * i[k, c]
            out[r, c] = acc
    return out


def random_operands(dims: MatrixDims, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """
    Integer-valued W (m×n) and I (n×p) with entries in [-8, 8].

    ``rng`` should come from ``numpy.random.default_rng(seed)`` (PCG64) so the
    operands, and therefore PASS/FAIL verdicts, are the same on every platform.
    """
    w = rng.integers(OPERAND_LOW, OPERAND_HIGH + 1, size=(dims.m, dims.n)).astype(np.float64)
    i = rng.integers(OPERAND_LOW, OPERAND_HIGH + 1, size=(dims.n, dims.p)).astype(np.float64)
    return w, i


class SystolicArray:
    """
    A grid of PEs wired for one dataflow and one pair of operands.

    Single-use: ``run`` steps the grid to completion once. Distinct instances share
    no state and may run in parallel.
    """

    def __init__(self, flow: Dataflow, w, i):
        self.flow = flow
        self.w, self.i = _check_operands(w, i)
        self.dims = MatrixDims(int(self.w.shape[0]), int(self.w.shape[1]), int(self.i.shape[1]))
        self.shape = map_dims(self.dims, flow)
        self.rows, self.cols, self.depth = self.shape.as_tuple()

        self.grid = [
            [ProcessingElement(row=r, col=c) for c in range(self.cols)]
            for r in range(self.rows)
        ]
        self.output: list[list[float | None]] = [[None] * self.dims.p for _ in range(self.dims.m)]
        self.remaining = self.dims.m * self.dims.p
        # per exit lane: how many values have left it so far
        self._exits = [0] * (self.rows if flow is Dataflow.WS else self.cols)

        if flow is Dataflow.OS:
            self.stationary = None
            self.stream_start = 1
            for row in self.grid:
                for pe in row:
                    pe.stationary = 0.0
        else:
            self.stationary = self.w if flow is Dataflow.WS else self.i
            self.stream_start = self.rows + 1

        self.cycle = 0
        self.phase = Phase.PREFILL if self.stationary is not None else Phase.STREAM
        self._drain_cycles = 0

    @property
    def mac_count(self) -> int:
        return sum(pe.macs for row in self.grid for pe in row)

    @property
    def done(self) -> bool:
        return self.remaining == 0

    # Edge feeds, skewed by lane index. ``j`` is the element index within the lane's stream.

    def _feed_west(self, r: int) -> float | None:
        j = self.cycle - self.stream_start - r
        if not 0 <= j < self.depth:
            return None
        if self.flow is Dataflow.WS:
            return 0.0
        if self.flow is Dataflow.IS:
            return float(self.w[j, r])
        return float(self.w[r, j])

    def _feed_north(self, c: int) -> float | None:
        j = self.cycle - self.stream_start - c
        if not 0 <= j < self.depth:
            return None
        if self.flow is Dataflow.WS:
            return float(self.i[c, j])
        if self.flow is Dataflow.IS:
            return 0.0
        return float(self.i[j, c])

    def _write(self, r: int, c: int, value: float) -> None:
        self.output[r][c] = value
        self.remaining -= 1

    def _prefill(self) -> None:
        # row S_R-k enters at the top on prefill cycle k, everything below shifts down
        incoming = self.stationary[self.rows - self.cycle]
        for c in range(self.cols):
            for r in range(self.rows - 1, 0, -1):
                self.grid[r][c].stationary = self.grid[r - 1][c].stationary
            self.grid[0][c].stationary = float(incoming[c])
        if self.cycle == self.rows:
            self.phase = Phase.STREAM

    def _stream(self) -> None:
        west = [
            [self._feed_west(r) if c == 0 else self.grid[r][c - 1].east for c in range(self.cols)]
            for r in range(self.rows)
        ]
        north = [
            [self._feed_north(c) if r == 0 else self.grid[r - 1][c].south for c in range(self.cols)]
            for r in range(self.rows)
        ]
        for r, row in enumerate(self.grid):
            for c, pe in enumerate(row):
                pe.west = west[r][c]
                pe.north = north[r][c]
                pe.step(self.flow)

        if self.flow is Dataflow.WS:
            for r in range(self.rows):
                value = self.grid[r][self.cols - 1].east
                if value is not None:
                    self._write(r, self._exits[r], value)
                    self._exits[r] += 1
        elif self.flow is Dataflow.IS:
            for c in range(self.cols):
                value = self.grid[self.rows - 1][c].south
                if value is not None:
                    self._write(self._exits[c], c, value)
                    self._exits[c] += 1
        elif all(pe.macs == self.depth for row in self.grid for pe in row):
            self.phase = Phase.DRAIN

    def _drain(self) -> None:
        # accumulators shift south one row per cycle; the bottom row enters the output buffer
        for c in range(self.cols):
            self._write(self.rows - 1 - self._exits[c], c, self.grid[self.rows - 1][c].stationary)
            self._exits[c] += 1
            for r in range(self.rows - 1, 0, -1):
                self.grid[r][c].stationary = self.grid[r - 1][c].stationary
            self.grid[0][c].stationary = None
            for r in range(self.rows):
                self.grid[r][c].west = self.grid[r][c].north = None
                self.grid[r][c].east = self.grid[r][c].south = None
        self._drain_cycles += 1

    def step(self) -> Phase:
        """Advances one clock cycle and returns the phase that cycle belonged to."""
        self.cycle += 1
        phase = self.phase
        if phase is Phase.PREFILL:
            self._prefill()
        elif phase is Phase.STREAM:
            self._stream()
        else:
            self._drain()
        return phase

    def snapshot(self, phase: Phase) -> CycleSnapshot:
        pes = tuple(
            PESnapshot(
                row=pe.row,
                col=pe.col,
                stationary=pe.stationary,
                west=pe.west,
                north=pe.north,
                partial_sum=pe.partial_sum(self.flow) if phase is Phase.STREAM else None,
            )
            for row in self.grid for pe in row
        )
        output = tuple(tuple(row) for row in self.output)
        return CycleSnapshot(cycle=self.cycle, phase=phase, pes=pes, output=output)

    def run(self, snapshots: bool = False) -> Iterator[CycleSnapshot | Phase]:
        """
        Steps until the last output element is written.

        Yields one ``CycleSnapshot`` per cycle when ``snapshots`` is set, otherwise
        the phase of each cycle.
        """
        # a correct schedule finishes in 2·S_R + S_C + T − 2 cycles; anything far beyond is a bug
        budget = 4 * (self.rows + self.cols + self.depth)
        while not self.done:
            if self.cycle >= budget:
                raise RuntimeError(
                    f"{self.flow.value} schedule for {self.dims} did not finish within {budget} cycles"
                )
            phase = self.step()
            if logger.isEnabledFor(TRACE_LEVEL_NUM):
                logger.log(
                    TRACE_LEVEL_NUM,
                    f"{self.flow.value} {self.dims} cycle {self.cycle} {phase.value}: "
                    f"{self.dims.m * self.dims.p - self.remaining} outputs written",
                )
            yield self.snapshot(phase) if snapshots else phase

    def result(self) -> SimResult:
        if not self.done:
            raise RuntimeError("simulation has not finished")
        output = np.array(self.output, dtype=np.float64)
        output.setflags(write=False)
        return SimResult(output=output, cycles=self.cycle, mac_count=self.mac_count)


def simulate(flow: Dataflow, w, i) -> SimResult:
    """
    Runs ``O = W · I`` through a grid sized for ``flow``.

    Args:
        flow (Dataflow): The stationary operand.
        w: M×N weight matrix (array-like).
        i: N×P input matrix (array-like).

    Returns:
        SimResult: The output matrix, the makespan in cycles and the number of MACs.

    Raises:
        DimensionMismatchError: If ``w.cols != i.rows`` or an operand is empty.
    """
    array = SystolicArray(flow, w, i)
    for _ in array.run():
        pass
    result = array.result()
    logger.debug(
        f"Simulated {flow.value} {array.dims}: {result.cycles} cycles, {result.mac_count} MACs"
    )
    return result


def trace(flow: Dataflow, w, i, allow_large: bool = False) -> list[CycleSnapshot]:
    """
    Per-cycle snapshots of every PE, for reading a schedule by eye.

    Raises:
        TraceTooLargeError: If any of M, N, P exceeds 16 and ``allow_large`` is not set.
    """
    array = SystolicArray(flow, w, i)
    if not allow_large and max(array.dims.as_tuple()) > TRACE_DIM_LIMIT:
        raise TraceTooLargeError(
            f"Refusing to trace {array.dims}: every dimension must be <= {TRACE_DIM_LIMIT} "
            "(pass allow_large=True to override)"
        )
    return list(array.run(snapshots=True))


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:g}"


def render_trace(snapshots: list[CycleSnapshot]) -> str:
    """
    Renders snapshots as line-oriented text, one block per cycle:

        cycle=<n> phase=<phase> written=<k>/<total>
          pe=<r>,<c> stationary=<v> west=<v> north=<v> psum=<v>

    ``-`` marks an empty register. Blocks are separated by a blank line.
    """
    blocks = []
    for snap in snapshots:
        lines = [f"cycle={snap.cycle} phase={snap.phase.value} written={snap.written}/{snap.total}"]
        for pe in snap.pes:
            lines.append(
                f"  pe={pe.row},{pe.col} stationary={_fmt(pe.stationary)} "
                f"west={_fmt(pe.west)} north={_fmt(pe.north)} psum={_fmt(pe.partial_sum)}"
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


__all__ = [
    "Phase",
    "ProcessingElement",
    "PESnapshot",
    "CycleSnapshot",
    "SimResult",
    "SystolicArray",
    "as_matrix",
    "reference_matmul",
    "random_operands",
    "simulate",
    "trace",
    "render_trace",
    "TRACE_DIM_LIMIT",
]
