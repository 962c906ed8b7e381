# The MIT License (MIT)
# © 2026 sysflow contributors
# fmt: off

# Global imports
import os
import json
from pathlib import Path
from dotenv import load_dotenv
from pydantic import ValidationError

# Local imports
from .logging import logger
from .schemas import PEConfig, SweepSpec

ENV_POWER_PER_PE = "SYSFLOW_PE_POWER_W"
ENV_CLOCK_HZ = "SYSFLOW_CLOCK_HZ"

DEFAULT_SWEEP_FILE = "sweep.json"

ENV_HELP = (
    f"environment: {ENV_POWER_PER_PE} overrides the per-PE power in watts (default 2.17e-3), "
    f"{ENV_CLOCK_HZ} the clock frequency in hertz (default 700e6). "
    "A .env file in the working directory is honoured."
)


def pe_config_from_env() -> PEConfig:
    """
    Builds the default PEConfig, letting environment variables override the built-in constants.

    Returns:
        PEConfig: Validated energy-model constants.

    Raises:
        pydantic.ValidationError: When an override is not a positive finite number.
    """
    load_dotenv()
    overrides = {}
    if (power := os.environ.get(ENV_POWER_PER_PE)) is not None:
        overrides["power_per_pe"] = power
    if (clock := os.environ.get(ENV_CLOCK_HZ)) is not None:
        overrides["clock_hz"] = clock
    try:
        return PEConfig(**overrides)
    except ValidationError as e:
        logger.error(f"Invalid PE configuration in environment: {e}")
        raise


def create_sweep_spec(document: dict, base_cfg: PEConfig | None = None) -> SweepSpec:
    """
    Validates a sweep document, filling the energy constants it omits from ``base_cfg``.

    Args:
        document (dict): Parsed JSON sweep document; every key is optional.
        base_cfg (PEConfig, optional): Constants used when the document has none.

    Returns:
        SweepSpec: The validated sweep.
    """
    if not isinstance(document, dict):
        raise ValueError(f"Sweep document must be a JSON object, got {type(document).__name__}")
    base_cfg = base_cfg or pe_config_from_env()
    merged = {"power_per_pe_w": base_cfg.power_per_pe, "clock_hz": base_cfg.clock_hz}
    merged.update(document)
    return SweepSpec.model_validate(merged)


def load_sweep_spec(path: str | os.PathLike | None = None, base_cfg: PEConfig | None = None) -> SweepSpec:
    """
    Load a sweep specification from a JSON file.

    When no path is given the default ``sweep.json`` is tried and, if absent, the
    built-in {5, 500} sweep is used. An explicitly named file must exist.

    Args:
        path (str, optional): Path to the sweep JSON file.
        base_cfg (PEConfig, optional): Energy constants for keys the file omits.

    Returns:
        SweepSpec: The validated sweep.

    Example:
        spec = load_sweep_spec("custom.json")
        print(spec.m_values, spec.cfg.clock_period)
    """
    explicit = path is not None
    sweep_file = Path(path if explicit else DEFAULT_SWEEP_FILE)
    try:
        with open(sweep_file, "r") as f:
            document = json.load(f)
        return create_sweep_spec(document, base_cfg)
    except FileNotFoundError:
        if explicit:
            logger.error(f"Sweep file {sweep_file} not found")
            raise
        logger.warning(f"No {sweep_file} found, using the default sweep")
        return create_sweep_spec({}, base_cfg)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {sweep_file}: {e}")
        raise
    except ValidationError as e:
        logger.error(f"Invalid sweep specification in {sweep_file}: {e.error_count()} error(s)")
        raise


__all__ = [
    "pe_config_from_env",
    "create_sweep_spec",
    "load_sweep_spec",
    "ENV_POWER_PER_PE",
    "ENV_CLOCK_HZ",
    "ENV_HELP",
    "DEFAULT_SWEEP_FILE",
]
