import json

import numpy as np
import pytest

from corrwitness import reports
from corrwitness.errors import UsageError
from corrwitness.types import MEASURES, CheckResult, ConcurrenceMap, FrequencyCurve, MeasureKind, RunManifest


def _curve():
    counts = {kind: np.array([0, 3, 10]) for kind in MEASURES}
    return FrequencyCurve("swapped", np.array([0.0, 0.5, 1.0]), counts, samples=10, master_seed=42)


def test_fmt_is_exact():
    for x in (0.1, 1 / 3, np.pi * 1e-17, -2.5e300, 0.0):
        assert float(reports.fmt(x)) == x
    assert reports.fmt(np.int64(7)) == "7"
    assert reports.fmt(0.5) == "0.5"


def test_csv_text_layout():
    text = reports.csv_text(["a", "b"], [[1, 0.25], [2, 1 / 3]])
    assert text.splitlines()[0] == "a,b"
    assert "\r" not in text
    assert text.endswith("\n")
    assert text.splitlines()[2] == "2,0.33333333333333331"


def test_frequency_csv_columns(tmp_path):
    path = reports.write_text(str(tmp_path / "f.csv"), reports.frequency_csv(_curve()))
    header, rows = reports.read_csv(path)
    assert header == ["lambda", "f_T", "f_B", "f_H", "f_J", "samples", "seed", "se_T", "se_B", "se_H", "se_J"]
    assert rows.shape == (3, 11)
    assert np.array_equal(rows[:, 1], [0.0, 0.3, 1.0])
    assert np.array_equal(rows[:, 5], [10, 10, 10])
    assert np.array_equal(rows[:, 6], [42, 42, 42])
    assert abs(rows[1, 7] - np.sqrt(0.3 * 0.7 / 10)) < 1e-15


def test_spinstar_csv_columns():
    text = reports.spinstar_csv(_curve(), n_bath=20, a0=1.0)
    header = text.splitlines()[0].split(",")
    assert header[:9] == ["lambda", "f_T", "f_B", "f_H", "f_J", "n_bath", "a0", "samples", "seed"]
    assert text.splitlines()[1].split(",")[5:9] == ["20", "1", "10", "42"]


def test_timetrace_csv_round_trip(tmp_path):
    times = np.linspace(0, 1, 4)
    deltas = {kind: np.random.default_rng(0).normal(size=4) for kind in MEASURES}
    path = reports.write_text(str(tmp_path / "t.csv"), reports.timetrace_csv([(0.1, times, deltas)]))
    header, rows = reports.read_csv(path)
    assert header == ["lambda", "t", "delta_T", "delta_B", "delta_H", "delta_J"]
    assert np.array_equal(rows[:, 1], times)
    assert np.array_equal(rows[:, 2], deltas[MeasureKind.TRACE])


def test_concurrence_outputs():
    cmap = ConcurrenceMap(np.array([0.0, 1.0]), np.array([0.0, 0.5]), np.array([[0.0, 0.1], [0.2, 0.3]]), None)
    lines = reports.concurrence_csv(cmap).splitlines()
    assert lines[0] == "lambda,t,concurrence"
    assert lines[1:] == ["0,0,0", "0,0.5,0.10000000000000001", "1,0,0.20000000000000001", "1,0.5,0.29999999999999999"]
    assert reports.concurrence_summary(cmap) == "threshold_lambda,none\n"
    cmap.threshold_lambda = 0.34
    assert reports.concurrence_summary(cmap) == "threshold_lambda,0.34000000000000002\n"


def test_manifest_round_trip(tmp_path):
    out = str(tmp_path / "run.csv")
    manifest = RunManifest("frequency", {"samples": 10, "family": "swapped"}, 42, "1.0.0", [out])
    path = reports.write_manifest(out, manifest)
    assert path.name == "run.csv.manifest.json"
    data = json.loads(path.read_text())
    assert list(data) == sorted(data)
    assert reports.read_manifest(path) == manifest
    assert reports.write_manifest("-", manifest) is None


def test_read_manifest_errors(tmp_path):
    with pytest.raises(UsageError):
        reports.read_manifest(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(UsageError):
        reports.read_manifest(bad)
    bad.write_text(json.dumps({"command": "verify"}))
    with pytest.raises(UsageError):
        reports.read_manifest(bad)


def test_verify_report():
    results = [
        CheckResult("oracles", "closed form", 1e-12, 1e-8, "PASS"),
        CheckResult("bounds", "witness", 2.0, 0.0, "FAIL", "50 states"),
    ]
    text = reports.verify_report(results)
    assert "----- Oracles -----" in text
    assert "----- Bounds -----" in text
    assert "(50 states)" in text
    assert text.rstrip().endswith("1/2 checks passed")
