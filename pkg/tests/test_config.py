import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from sysflow import PEConfig, SweepSpec
from sysflow.config import (
    ENV_CLOCK_HZ,
    ENV_POWER_PER_PE,
    create_sweep_spec,
    load_sweep_spec,
    pe_config_from_env,
)

REPO_SWEEP = Path(__file__).resolve().parents[1] / "sweep.json"


def test_pe_config_defaults():
    cfg = PEConfig()
    assert cfg.power_per_pe == 2.17e-3
    assert cfg.clock_hz == 700e6
    assert cfg.clock_period == pytest.approx(1 / 700e6, rel=1e-15)


@pytest.mark.parametrize("field", ["power_per_pe", "clock_hz"])
@pytest.mark.parametrize("value", [0, -1.0, float("inf"), float("nan")])
def test_pe_config_rejects_non_positive(field, value):
    with pytest.raises(ValidationError):
        PEConfig(**{field: value})


def test_pe_config_is_frozen_and_strict():
    cfg = PEConfig()
    with pytest.raises(ValidationError):
        cfg.power_per_pe = 1.0
    with pytest.raises(ValidationError):
        PEConfig(voltage=0.9)


def test_scaled_config():
    cfg = PEConfig().scaled(power=2.0, period=4.0)
    assert cfg.power_per_pe == 2 * 2.17e-3
    assert cfg.clock_hz == 700e6 / 4


def test_env_defaults():
    assert pe_config_from_env() == PEConfig()


def test_env_overrides(monkeypatch):
    monkeypatch.setenv(ENV_POWER_PER_PE, "1e-3")
    monkeypatch.setenv(ENV_CLOCK_HZ, "1e9")
    cfg = pe_config_from_env()
    assert cfg.power_per_pe == 1e-3
    assert cfg.clock_hz == 1e9


def test_env_override_must_be_positive(monkeypatch):
    monkeypatch.setenv(ENV_CLOCK_HZ, "-5")
    with pytest.raises(ValidationError):
        pe_config_from_env()


def test_create_sweep_spec_fills_defaults():
    spec = create_sweep_spec({"m_values": [8, 16]}, base_cfg=PEConfig())
    assert spec.m_values == (8, 16)
    assert spec.n_values == (5, 500)
    assert spec.cfg == PEConfig()
    assert spec.cross_validate_limit == 16
    assert spec.seed == 0


def test_create_sweep_spec_document_beats_base_cfg():
    base = PEConfig(power_per_pe=1.0, clock_hz=1.0)
    spec = create_sweep_spec({"clock_hz": 2e9}, base_cfg=base)
    assert spec.power_per_pe_w == 1.0
    assert spec.clock_hz == 2e9


def test_create_sweep_spec_uses_environment(monkeypatch):
    monkeypatch.setenv(ENV_POWER_PER_PE, "3e-3")
    assert create_sweep_spec({}).power_per_pe_w == 3e-3


@pytest.mark.parametrize(
    "document, location",
    [
        ({"m_values": [0]}, ("m_values", 0)),
        ({"n_values": []}, ("n_values",)),
        ({"p_values": [5, "x"]}, ("p_values", 1)),
        ({"power_per_pe_w": -1}, ("power_per_pe_w",)),
        ({"seed": -2}, ("seed",)),
        ({"q_values": [5]}, ("q_values",)),
    ],
)
def test_create_sweep_spec_rejects_bad_documents(document, location):
    with pytest.raises(ValidationError) as info:
        create_sweep_spec(document, base_cfg=PEConfig())
    assert info.value.errors()[0]["loc"] == location


def test_create_sweep_spec_requires_an_object():
    with pytest.raises(ValueError):
        create_sweep_spec([5, 500], base_cfg=PEConfig())


def test_repository_sweep_file_is_the_default_sweep():
    assert load_sweep_spec(REPO_SWEEP, base_cfg=PEConfig()) == SweepSpec()


def test_load_sweep_spec_explicit_file(tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps({"m_values": [2], "n_values": [3], "p_values": [4], "seed": 9}))
    spec = load_sweep_spec(path, base_cfg=PEConfig())
    assert (spec.m_values, spec.n_values, spec.p_values, spec.seed) == ((2,), (3,), (4,), 9)


def test_load_sweep_spec_missing_explicit_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_sweep_spec(tmp_path / "nope.json")


def test_load_sweep_spec_falls_back_to_defaults(tmp_path, monkeypatch, caplog):
    monkeypatch.chdir(tmp_path)
    assert load_sweep_spec(base_cfg=PEConfig()) == SweepSpec()
    assert "using the default sweep" in caplog.text


def test_load_sweep_spec_reads_default_file_from_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "sweep.json").write_text('{"p_values": [7]}')
    assert load_sweep_spec(base_cfg=PEConfig()).p_values == (7,)


def test_load_sweep_spec_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(json.JSONDecodeError):
        load_sweep_spec(path, base_cfg=PEConfig())
