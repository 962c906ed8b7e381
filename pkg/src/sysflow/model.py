# The MIT License (MIT)
# © 2026 sysflow contributors
# fmt: off

"""
Analytical cost model for a GEMM ``O = W · I`` on a systolic array.

``W`` is M×N, ``I`` is N×P and ``O`` is M×P. The array is sized to the stationary
matrix of the chosen dataflow:

    dataflow  S_R  S_C  T
    WS        M    N    P
    IS        N    P    M
    OS        M    P    N

    N_PE = S_R · S_C
    N_C  = 2·S_R + S_C + T − 2
    E    = N_PE · P_PE · N_C · T_clk

Every PE is billed for every cycle, fill and drain included.
"""

# Global imports
import itertools
from enum import Enum
from dataclasses import dataclass

# Local imports
from .logging import logger
from .schemas import PEConfig


class Dataflow(Enum):
    """Which operand stays resident in the PE grid. Definition order is the canonical order."""

    WS = "WS"
    IS = "IS"
    OS = "OS"

    @property
    def rank(self) -> int:
        return _RANK[self]

    @property
    def long_name(self) -> str:
        return _LONG_NAMES[self]

    @property
    def stationary_operand(self) -> str:
        """Name of the matrix held in the grid: W, I or O."""
        return _STATIONARY[self][0]

    @property
    def stationary_label(self) -> str:
        """Shape of the stationary matrix in problem dimensions, e.g. ``M×N``."""
        return _STATIONARY[self][1]

    def __lt__(self, other: "Dataflow") -> bool:
        if not isinstance(other, Dataflow):
            return NotImplemented
        return self.rank < other.rank

    @classmethod
    def parse(cls, text: str) -> "Dataflow":
        """Accepts ``ws``, ``WS``, ``weight-stationary``, ``weight_stationary`` and the like."""
        key = text.strip().lower().replace("_", "-")
        for flow in cls:
            if key in (flow.value.lower(), flow.long_name):
                return flow
        raise ValueError(f"Unknown dataflow {text!r}; expected one of WS, IS, OS")


_RANK = {flow: rank for rank, flow in enumerate(Dataflow)}
_LONG_NAMES = {
    Dataflow.WS: "weight-stationary",
    Dataflow.IS: "input-stationary",
    Dataflow.OS: "output-stationary",
}
_STATIONARY = {
    Dataflow.WS: ("W", "M×N"),
    Dataflow.IS: ("I", "N×P"),
    Dataflow.OS: ("O", "M×P"),
}

DATAFLOWS: tuple[Dataflow, ...] = tuple(Dataflow)


def _require_positive(owner: str, **fields: int) -> None:
    for name, value in fields.items():
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"{owner}.{name} must be an integer, got {value!r}")
        if value < 1:
            raise ValueError(f"{owner}.{name} must be >= 1, got {value}")


@dataclass(frozen=True, order=True)
class MatrixDims:
    """GEMM problem size: W is m×n, I is n×p, O is m×p. Orders lexicographically by (m, n, p)."""

    m: int
    n: int
    p: int

    def __post_init__(self):
        _require_positive("MatrixDims", m=self.m, n=self.n, p=self.p)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.p)

    @property
    def macs(self) -> int:
        return self.m * self.n * self.p

    def __str__(self) -> str:
        return f"{self.m}x{self.n}x{self.p}"


@dataclass(frozen=True)
class ArrayShape:
    """Physical rows and columns of the PE grid plus the number of streamed elements."""

    s_r: int
    s_c: int
    t: int

    def __post_init__(self):
        _require_positive("ArrayShape", s_r=self.s_r, s_c=self.s_c, t=self.t)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.s_r, self.s_c, self.t)


@dataclass(frozen=True)
class DataflowCost:
    """Cost of one dataflow for one problem size."""

    flow: Dataflow
    shape: ArrayShape
    n_pe: int
    n_c: int
    energy_j: float
    latency_s: float
    power_w: float
    utilization: float

    def to_dict(self) -> dict:
        return {
            "dataflow": self.flow.value,
            "s_r": self.shape.s_r,
            "s_c": self.shape.s_c,
            "t": self.shape.t,
            "n_pe": self.n_pe,
            "n_c": self.n_c,
            "energy_j": self.energy_j,
            "latency_s": self.latency_s,
            "power_w": self.power_w,
            "utilization": self.utilization,
        }


@dataclass(frozen=True)
class CostReport:
    """All three dataflows for one problem size, in canonical order, plus the energy-argmin set."""

    dims: MatrixDims
    cfg: PEConfig
    per_dataflow: tuple[DataflowCost, ...]
    optimal: tuple[Dataflow, ...]

    def cost(self, flow: Dataflow) -> DataflowCost:
        return self.per_dataflow[flow.rank]

    def is_optimal(self, flow: Dataflow) -> bool:
        return flow in self.optimal

    def to_dict(self) -> dict:
        return {
            "dims": {"m": self.dims.m, "n": self.dims.n, "p": self.dims.p},
            "power_per_pe_w": self.cfg.power_per_pe,
            "clock_hz": self.cfg.clock_hz,
            "per_dataflow": [cost.to_dict() for cost in self.per_dataflow],
            "optimal": [flow.value for flow in self.optimal],
        }


@dataclass(frozen=True)
class Recommendation:
    optimal: tuple[Dataflow, ...]
    rationale: str
    heuristic: tuple[Dataflow, ...]
    report: CostReport

    @property
    def heuristic_agrees(self) -> bool:
        return bool(set(self.optimal) & set(self.heuristic))

    def to_dict(self) -> dict:
        return {
            "optimal": [flow.value for flow in self.optimal],
            "rationale": self.rationale,
            "smallest_pair_flows": [flow.value for flow in self.heuristic],
            "heuristic_agrees": self.heuristic_agrees,
            "energy_j": {cost.flow.value: cost.energy_j for cost in self.report.per_dataflow},
        }


def map_dims(dims: MatrixDims, flow: Dataflow) -> ArrayShape:
    """Maps (M, N, P) onto (S_R, S_C, T) for a dataflow."""
    if flow is Dataflow.WS:
        return ArrayShape(s_r=dims.m, s_c=dims.n, t=dims.p)
    if flow is Dataflow.IS:
        return ArrayShape(s_r=dims.n, s_c=dims.p, t=dims.m)
    if flow is Dataflow.OS:
        return ArrayShape(s_r=dims.m, s_c=dims.p, t=dims.n)
    raise ValueError(f"Unknown dataflow {flow!r}")


def num_pes(shape: ArrayShape) -> int:
    return shape.s_r * shape.s_c


def cycle_count(shape: ArrayShape) -> int:
    return 2 * shape.s_r + shape.s_c + shape.t - 2


def energy(shape: ArrayShape, cfg: PEConfig) -> float:
    """
    Total energy in joules: every PE draws ``cfg.power_per_pe`` for every cycle.

    Raises:
        OverflowError: When N_PE · N_C cannot be represented as a double.
    """
    # exact integer first, so equal N_PE · N_C always scale to the same double
    return (num_pes(shape) * cycle_count(shape)) * cfg.power_per_pe * cfg.clock_period


def dataflow_cost(dims: MatrixDims, flow: Dataflow, cfg: PEConfig) -> DataflowCost:
    shape = map_dims(dims, flow)
    n_pe = num_pes(shape)
    n_c = cycle_count(shape)
    return DataflowCost(
        flow=flow,
        shape=shape,
        n_pe=n_pe,
        n_c=n_c,
        energy_j=energy(shape, cfg),
        latency_s=n_c * cfg.clock_period,
        power_w=n_pe * cfg.power_per_pe,
        utilization=dims.macs / (n_pe * n_c),
    )


def cost_report(dims: MatrixDims, cfg: PEConfig | None = None) -> CostReport:
    """
    Evaluates every dataflow and collects the minimum-energy set.

    The argmin is taken on the exact integer N_PE · N_C: P_PE and T_clk are shared by
    all flows, so ties stay exact whatever constants are configured.
    """
    cfg = cfg or PEConfig()
    per_dataflow = tuple(dataflow_cost(dims, flow, cfg) for flow in DATAFLOWS)
    best = min(cost.n_pe * cost.n_c for cost in per_dataflow)
    optimal = tuple(cost.flow for cost in per_dataflow if cost.n_pe * cost.n_c == best)
    return CostReport(dims=dims, cfg=cfg, per_dataflow=per_dataflow, optimal=optimal)


def heuristic_flows(dims: MatrixDims) -> tuple[Dataflow, ...]:
    """Flows whose spatial pair (S_R, S_C) is the two smallest of (M, N, P), as a multiset."""
    smallest_pair = sorted(dims.as_tuple())[:2]
    return tuple(
        flow for flow in DATAFLOWS
        if sorted(map_dims(dims, flow).as_tuple()[:2]) == smallest_pair
    )


def _dims_text(dims: MatrixDims) -> str:
    return f"M={dims.m}, N={dims.n}, P={dims.p}"


def _describe(cost: DataflowCost) -> str:
    return (
        f"{cost.flow.value} keeps the {cost.flow.stationary_label} {cost.flow.stationary_operand} matrix "
        f"stationary on a {cost.shape.s_r}×{cost.shape.s_c} array "
        f"({cost.n_pe} PEs, {cost.n_c} cycles)"
    )


def recommend(dims: MatrixDims, cfg: PEConfig | None = None) -> Recommendation:
    """
    Picks the minimum-energy dataflow(s) and explains the choice.

    The choice always comes from the energy argmin. The smallest-two-dimensions rule
    is only quoted when one of the minimum-energy flows follows it.
    """
    report = cost_report(dims, cfg)
    heuristic = heuristic_flows(dims)
    optimal = report.optimal

    lines = []
    if len(optimal) == 1:
        lines.append(f"{optimal[0].value} is the minimum-energy dataflow for {_dims_text(dims)}.")
    else:
        names = ", ".join(flow.value for flow in optimal)
        lines.append(f"{len(optimal)}-way tie between {names} for {_dims_text(dims)}.")
    for flow in optimal:
        lines.append(_describe(report.cost(flow)) + ".")
    lines.append("Stationary matrix per dataflow: (M×N)↦WS, (N×P)↦IS, (M×P)↦OS.")

    agreeing = [flow.value for flow in optimal if flow in heuristic]
    if agreeing:
        pair = sorted(dims.as_tuple())[:2]
        verb = "keeps" if len(agreeing) == 1 else "keep"
        lines.append(
            f"{', '.join(agreeing)} {verb} the two smallest dimensions ({pair[0]}, {pair[1]}) "
            "on the array, so the array stays as small as possible."
        )
    return Recommendation(
        optimal=optimal,
        rationale="\n".join(lines),
        heuristic=heuristic,
        report=report,
    )


def _energy_factor(s_r: int, s_c: int, t: int) -> int:
    # E is this integer times P_PE · T_clk.
    return s_r * s_c * (2 * s_r + s_c + t - 2)


def heuristic_divergences(limit: int = 64) -> list[MatrixDims]:
    """
    Every problem size with pairwise-distinct dimensions in [1, limit] where the
    smallest-two-dimensions flow is not among the minimum-energy flows.

    Works on the integer energy factor N_PE · N_C; the common P_PE · T_clk scale
    cannot change the argmin.
    """
    found = []
    for m, n, p in itertools.permutations(range(1, limit + 1), 3):
        factors = (
            _energy_factor(m, n, p),  # WS
            _energy_factor(n, p, m),  # IS
            _energy_factor(m, p, n),  # OS
        )
        best = min(factors)
        largest = max(m, n, p)
        # the heuristic flow is the one whose temporal dimension is the largest
        heuristic = (p, m, n).index(largest)
        if factors[heuristic] != best:
            found.append(MatrixDims(m, n, p))
    if found:
        logger.warning(
            f"Smallest-pair rule disagrees with the energy argmin on {len(found)} of "
            f"{limit * (limit - 1) * (limit - 2)} distinct-dimension problems up to {limit}, "
            f"e.g. {found[0]}"
        )
    return found


__all__ = [
    "Dataflow",
    "DATAFLOWS",
    "MatrixDims",
    "ArrayShape",
    "DataflowCost",
    "CostReport",
    "Recommendation",
    "map_dims",
    "num_pes",
    "cycle_count",
    "energy",
    "dataflow_cost",
    "cost_report",
    "heuristic_flows",
    "recommend",
    "heuristic_divergences",
]
