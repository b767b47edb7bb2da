import json
import os

import numpy as np
import pytest

from mdrscreen import (
    SimulationSpec,
    ValidationError,
    load_csv,
    mdr_index_all,
    mdr_is,
    partition_slices,
    read_result,
    run_experiment,
    select_top,
    write_result,
)
from mdrscreen.errors import ILLEGAL_STATUS
from mdrscreen.io import MissingColumnError, ParseError

from conftest import random_survival_data


def _write_csv(path, header, rows):
    with open(path, "w") as handle:
        handle.write(header + "\n")
        for row in rows:
            handle.write(",".join(str(v) for v in row) + "\n")


def test_load_csv_basic(tmp_path):
    path = tmp_path / "d.csv"
    _write_csv(path, "t,d,g1,g2", [(1.0, 1, 0.5, 2.0), (2.0, 0, 1.5, 3.0), (3.0, 1, 2.5, 4.0)])
    data, names = load_csv(path, "t", "d")
    assert data.n == 3 and data.p == 2
    assert names == {1: "g1", 2: "g2"}
    assert np.array_equal(data.covariates[:, 1], [2.0, 3.0, 4.0])


def test_load_csv_id_column_skipped(tmp_path):
    path = tmp_path / "d.csv"
    _write_csv(path, "id,t,d,g1", [("a", 1.0, 1, 0.5), ("b", 2.0, 0, 1.5)])
    data, names = load_csv(path, "t", "d", id_col="id")
    assert data.p == 1 and names == {1: "g1"}


def test_load_csv_illegal_status_located(tmp_path):
    path = tmp_path / "d.csv"
    _write_csv(path, "t,d,g1", [(1.0, 1, 0.5), (2.0, 2, 1.5), (3.0, 0, 2.5)])
    with pytest.raises(ValidationError) as err:
        load_csv(path, "t", "d")
    (violation,) = err.value.violations
    assert violation.code == ILLEGAL_STATUS
    assert violation.location == (1, "d")


def test_load_csv_missing_column(tmp_path):
    path = tmp_path / "d.csv"
    _write_csv(path, "t,d,g1", [(1.0, 1, 0.5)])
    with pytest.raises(MissingColumnError):
        load_csv(path, "time", "d")


def test_load_csv_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ParseError):
        load_csv(path, "t", "d")


def test_load_csv_non_numeric_covariate_located(tmp_path):
    path = tmp_path / "d.csv"
    _write_csv(path, "t,d,g1", [(1.0, 1, 0.5), (2.0, 0, "oops")])
    with pytest.raises(ParseError, match="oops"):
        load_csv(path, "t", "d")


def _screening_result(rng):
    data = random_survival_data(rng, 50, 5)
    part = partition_slices(data)
    return select_top(mdr_index_all(data, part), 3)


def test_screening_roundtrip_lossless(tmp_path, rng):
    result = _screening_result(rng)
    path = tmp_path / "r.jsonl"
    write_result(result, path, format="jsonl")
    back = read_result(path)
    assert back["selected"] == result.selected
    assert np.array_equal(back["ids"], result.indices.covariate_ids)
    assert np.array_equal(back["values"], result.indices.values)  # full precision


def test_stage_and_frequency_records_roundtrip(tmp_path, rng):
    data = random_survival_data(rng, 60, 8)
    part = partition_slices(data)
    result = mdr_is(data, part, (3, 2))
    path = tmp_path / "r.jsonl"
    write_result(result, path, format="jsonl")
    back = read_result(path)
    assert back["stage_sizes"] == (3, 2)
    assert back["stage_members"] == result.stage_members


def test_table_format_rows_sorted(tmp_path, rng):
    result = _screening_result(rng)
    path = tmp_path / "r.txt"
    write_result(result, path, format="table", names={k: f"g{k}" for k in range(1, 6)})
    lines = path.read_text().splitlines()
    data_rows = [l for l in lines if l and l[0].isdigit()]
    assert len(data_rows) == 3
    values = [float(row.split()[-1]) for row in data_rows]
    assert values == sorted(values, reverse=True)


def test_simulation_report_roundtrip_and_timing_excluded(tmp_path):
    spec = SimulationSpec(model="M1", n=60, p=8, rho=0.0, replications=3, seed=2,
                          method="mdr-sis", top=4)
    report = run_experiment(spec)
    path = tmp_path / "rep.jsonl"
    write_result(report, path, format="jsonl")
    text = path.read_text()
    assert "timing" not in text
    back = read_result(path)
    assert back["proportions"] == report.proportions
    assert back["all_proportion"] == report.all_proportion
    assert back["meta"]["config"]["model"] == "M1"
    write_result(report, path, format="jsonl", include_timing=True)
    assert "timing" in path.read_text()


def test_report_table_layout(tmp_path):
    spec = SimulationSpec(model="M5", n=60, p=8, rho=0.0, replications=2, seed=3,
                          method="mdr-sis", top=6)
    report = run_experiment(spec)
    path = tmp_path / "rep.txt"
    write_result(report, path, format="table")
    lines = path.read_text().splitlines()
    assert lines[0].split() == ["covariate", "1", "2", "3", "6", "all"]
    assert lines[1].startswith("proportion")


def test_write_is_atomic_on_serialization_error(tmp_path):
    target = tmp_path / "out.txt"
    with pytest.raises(TypeError):
        write_result(object(), target)
    assert not target.exists()
    assert not [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]


def test_jsonl_lines_are_valid_json(tmp_path, rng):
    result = _screening_result(rng)
    path = tmp_path / "r.jsonl"
    write_result(result, path, format="jsonl")
    for line in path.read_text().splitlines():
        json.loads(line)


def test_read_result_rejects_non_result_file(tmp_path):
    path = tmp_path / "x.jsonl"
    path.write_text('{"record": "index", "id": 1, "value": 2.0}\n')
    with pytest.raises(ParseError):
        read_result(path)
