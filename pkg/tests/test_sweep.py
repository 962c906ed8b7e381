import pytest

from sysflow import (
    CSV_HEADER,
    CrossValidationError,
    Dataflow,
    MatrixDims,
    OutputError,
    SweepSpec,
    cost_report,
    emit_csv,
    evaluate_config,
    format_energy,
    generate_configs,
    optimal_by_config,
    read_csv,
    run_sweep,
)
from sysflow import sweep as sweep_module
from sysflow.simulator import SimResult, simulate

WS, IS, OS = Dataflow.WS, Dataflow.IS, Dataflow.OS

DEFAULT_OPTIMAL = {
    (5, 5, 5): (WS, IS, OS),
    (5, 5, 500): (WS,),
    (5, 500, 5): (OS,),
    (5, 500, 500): (WS, OS),
    (500, 5, 5): (IS,),
    (500, 5, 500): (IS,),
    (500, 500, 5): (IS, OS),
    (500, 500, 500): (WS, IS, OS),
}


@pytest.fixture(scope="module")
def default_rows():
    return run_sweep(SweepSpec())


def test_generate_configs_default():
    configs = generate_configs(SweepSpec())
    assert [dims.as_tuple() for dims in configs] == sorted(DEFAULT_OPTIMAL)


def test_generate_configs_edge_cases():
    assert generate_configs(SweepSpec(m_values=[4], n_values=[4], p_values=[4])) == [MatrixDims(4, 4, 4)]
    spec = SweepSpec(m_values=[3, 2, 3], n_values=[2], p_values=[2])
    assert generate_configs(spec) == [MatrixDims(2, 2, 2), MatrixDims(3, 2, 2)]


def test_default_sweep_shape(default_rows):
    assert len(default_rows) == 24
    assert [row.flow for row in default_rows[:3]] == [WS, IS, OS]
    assert [row.dims for row in default_rows[::3]] == generate_configs(SweepSpec())


def test_default_sweep_optimal_sets(default_rows):
    optimal = optimal_by_config(default_rows)
    assert {dims.as_tuple(): flows for dims, flows in optimal.items()} == DEFAULT_OPTIMAL


def test_default_sweep_pinned_rows(default_rows):
    by_key = {(row.dims.as_tuple(), row.flow): row for row in default_rows}
    ws = by_key[((5, 5, 500), WS)]
    assert (ws.s_r, ws.s_c, ws.t, ws.n_pe, ws.n_c) == (5, 5, 500, 25, 513)
    assert ws.energy_j == pytest.approx(3.97575e-8, rel=1e-12)
    assert ws.is_optimal
    for flow in (WS, OS):
        row = by_key[((5, 500, 500), flow)]
        assert (row.n_pe, row.n_c) == (2500, 1008)
    energies = {by_key[((500, 500, 500), flow)].energy_j for flow in (WS, IS, OS)}
    assert len(energies) == 1


def test_rows_agree_with_the_model(default_rows):
    for row in default_rows:
        cost = cost_report(row.dims).cost(row.flow)
        assert (row.s_r, row.s_c, row.t) == cost.shape.as_tuple()
        assert (row.n_pe, row.n_c, row.energy_j) == (cost.n_pe, cost.n_c, cost.energy_j)


def test_optimal_flag_matches_group_minimum(default_rows):
    for start in range(0, len(default_rows), 3):
        group = default_rows[start:start + 3]
        best = min(row.energy_j for row in group)
        assert [row.is_optimal for row in group] == [row.energy_j == best for row in group]


def test_distinct_corners_map_the_two_smallest_dimensions(default_rows):
    for dims, flows in optimal_by_config(default_rows).items():
        if len(set(dims.as_tuple())) == 1:
            continue
        smallest = sorted(dims.as_tuple())[:2]
        for row in default_rows:
            if row.dims == dims and row.flow in flows:
                assert sorted((row.s_r, row.s_c)) == smallest


def test_tied_rows_share_energy_and_optimal_flag():
    spec = SweepSpec(m_values=[32], n_values=[14], p_values=[38], cross_validate_limit=0)
    ws, is_, os_ = run_sweep(spec)
    assert ws.n_pe != is_.n_pe
    assert ws.energy_j == is_.energy_j < os_.energy_j
    assert (ws.is_optimal, is_.is_optimal, os_.is_optimal) == (True, True, False)


def test_rows_do_not_depend_on_completion_order():
    spec = SweepSpec(m_values=[1, 3, 9], n_values=[2, 7], p_values=[4, 6])
    sequential = [row for dims in generate_configs(spec) for row in evaluate_config(dims, spec)]
    assert run_sweep(spec) == sequential
    assert run_sweep(spec) == run_sweep(spec)


def test_small_configs_are_cross_validated(monkeypatch):
    calls = []

    def counting_simulate(flow, w, i):
        calls.append(flow)
        return simulate(flow, w, i)

    monkeypatch.setattr(sweep_module, "simulate", counting_simulate)
    run_sweep(SweepSpec(m_values=[2, 20], n_values=[3], p_values=[4]))
    # only 2x3x4 is under the limit
    assert calls == [WS, IS, OS]


def test_cross_validation_can_be_disabled(monkeypatch):
    def fail(*args):
        raise AssertionError("simulator should not run")

    monkeypatch.setattr(sweep_module, "simulate", fail)
    rows = run_sweep(SweepSpec(m_values=[2], n_values=[2], p_values=[2], cross_validate_limit=0))
    assert len(rows) == 3


def test_cross_validation_failure_names_config_and_flow(monkeypatch):
    def off_by_one(flow, w, i):
        result = simulate(flow, w, i)
        if flow is IS:
            return SimResult(output=result.output, cycles=result.cycles + 1, mac_count=result.mac_count)
        return result

    monkeypatch.setattr(sweep_module, "simulate", off_by_one)
    with pytest.raises(CrossValidationError, match=r"config 5x5x5 flow IS"):
        run_sweep(SweepSpec())


def test_energy_constants_flow_through():
    rows = run_sweep(SweepSpec(m_values=[5], n_values=[5], p_values=[500], power_per_pe_w=4.34e-3))
    assert rows[0].energy_j == pytest.approx(2 * 3.97575e-8, rel=1e-12)


@pytest.mark.parametrize(
    "joules, text",
    [
        (3.97575e-8, "3.975750e-8"),
        (6.2e-12, "6.200000e-12"),
        (1.5, "1.500000e0"),
        (12345.678, "1.234568e4"),
    ],
)
def test_format_energy(joules, text):
    assert format_energy(joules) == text


def test_emit_csv_golden(tmp_path):
    rows = run_sweep(SweepSpec(m_values=[5], n_values=[5], p_values=[500]))
    path = emit_csv(rows, tmp_path / "sweep.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "m,n,p,dataflow,s_r,s_c,t,n_pe,n_c,energy_j,is_optimal"
    assert lines[0].split(",") == list(CSV_HEADER)
    assert lines[1] == "5,5,500,WS,5,5,500,25,513,3.975750e-8,true"
    assert lines[2].startswith("5,5,500,IS,5,500,5,2500,")
    assert lines[2].endswith(",false")
    assert len(lines) == 4


def test_emit_csv_is_byte_identical(tmp_path, default_rows):
    first = emit_csv(default_rows, tmp_path / "a.csv").read_bytes()
    second = emit_csv(run_sweep(SweepSpec()), tmp_path / "b.csv").read_bytes()
    assert first == second
    assert first.count(b"\n") == 25
    assert b"\r" not in first


def test_csv_parses_back(tmp_path, default_rows):
    path = emit_csv(default_rows, tmp_path / "sweep.csv")
    parsed = read_csv(path)
    assert len(parsed) == len(default_rows)
    for written, row in zip(default_rows, parsed):
        assert (row.dims, row.flow, row.n_pe, row.n_c, row.is_optimal) == (
            written.dims, written.flow, written.n_pe, written.n_c, written.is_optimal,
        )
        expected = row.n_pe * 2.17e-3 * row.n_c / 700e6
        assert row.energy_j == pytest.approx(expected, rel=1e-6)


def test_read_csv_rejects_foreign_files(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_emit_csv_rejects_empty_rows(tmp_path):
    path = tmp_path / "empty.csv"
    with pytest.raises(ValueError):
        emit_csv([], path)
    assert not path.exists()


def test_emit_csv_reports_io_failure(tmp_path, default_rows):
    path = tmp_path / "missing" / "sweep.csv"
    with pytest.raises(OutputError) as info:
        emit_csv(default_rows, path)
    assert info.value.path == str(path)
    assert str(path) in str(info.value)
