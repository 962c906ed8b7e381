# The MIT License (MIT)
# © 2026 sysflow contributors
# fmt: off

# Global imports
from typing import Annotated
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt

# Energy-model constants: a 32-bit floating-point MAC PE on 28nm, clocked at 700MHz.
DEFAULT_POWER_PER_PE_W = 2.17e-3
DEFAULT_CLOCK_HZ = 700e6

DEFAULT_AXIS_VALUES = (5, 500)
DEFAULT_CROSS_VALIDATE_LIMIT = 16

PositiveFinite = Annotated[float, Field(gt=0, allow_inf_nan=False)]
AxisValues = Annotated[tuple[PositiveInt, ...], Field(min_length=1)]


class PEConfig(BaseModel):
    """Per-PE power and clock frequency used by the energy model."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    power_per_pe: PositiveFinite = DEFAULT_POWER_PER_PE_W
    clock_hz: PositiveFinite = DEFAULT_CLOCK_HZ

    @property
    def clock_period(self) -> float:
        """Clock period in seconds (1 / clock_hz)."""
        return 1.0 / self.clock_hz

    def scaled(self, power: float = 1.0, period: float = 1.0) -> "PEConfig":
        """Returns a copy with power multiplied by ``power`` and the clock period by ``period``."""
        return PEConfig(
            power_per_pe=self.power_per_pe * power,
            clock_hz=self.clock_hz / period,
        )


class SweepSpec(BaseModel):
    """
    A design-space sweep: per-axis candidate dimensions plus the energy constants.

    Field names match the keys of the JSON sweep document, so validation errors
    point at the offending key.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    m_values: AxisValues = DEFAULT_AXIS_VALUES
    n_values: AxisValues = DEFAULT_AXIS_VALUES
    p_values: AxisValues = DEFAULT_AXIS_VALUES
    power_per_pe_w: PositiveFinite = DEFAULT_POWER_PER_PE_W
    clock_hz: PositiveFinite = DEFAULT_CLOCK_HZ
    cross_validate_limit: NonNegativeInt = DEFAULT_CROSS_VALIDATE_LIMIT
    seed: NonNegativeInt = 0

    @property
    def cfg(self) -> PEConfig:
        return PEConfig(power_per_pe=self.power_per_pe_w, clock_hz=self.clock_hz)


__all__ = [
    "PEConfig",
    "SweepSpec",
    "DEFAULT_POWER_PER_PE_W",
    "DEFAULT_CLOCK_HZ",
    "DEFAULT_AXIS_VALUES",
    "DEFAULT_CROSS_VALIDATE_LIMIT",
]
