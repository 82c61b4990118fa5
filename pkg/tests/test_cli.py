import json

import pytest

from geocoherence.cli import main

from conftest import WORKED_EXAMPLE_CSV


@pytest.fixture
def trace_file(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text(WORKED_EXAMPLE_CSV)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_ingest_summary(trace_file, capsys):
    code, out, _ = run_cli(capsys, "ingest", trace_file)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "2 users, 7 samples"
    assert "  user1: 3" in lines
    assert "  user2: 4" in lines
    assert any(l.startswith("span 2020-01-16") for l in lines)
    assert any(l.startswith("bbox lat [35.64") for l in lines)


def test_ingest_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text("user_id,timestamp,latitude,longitude\n")
    code, out, _ = run_cli(capsys, "ingest", str(path))
    assert code == 0
    assert out.splitlines()[0] == "0 users, 0 samples"


def test_ingest_missing_file(capsys):
    code, _, err = run_cli(capsys, "ingest", "/nonexistent/trace.csv")
    assert code == 2
    assert "data error" in err


def test_ingest_garbage_strict(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("user_id,timestamp,latitude,longitude\nu1,not-a-time,35.0,139.0\n")
    code, _, err = run_cli(capsys, "ingest", str(path), "--strict")
    assert code == 2
    assert "data error" in err


def test_ingest_lenient_skips(tmp_path, capsys):
    path = tmp_path / "mixed.csv"
    path.write_text(
        "user_id,timestamp,latitude,longitude\n"
        "u1,2020-01-16T10:55,35.0,139.0\n"
        "u1,not-a-time,35.0,139.0\n"
    )
    code, out, err = run_cli(capsys, "ingest", str(path))
    assert code == 0
    assert "skipped 1 malformed row(s)" in err
    assert out.splitlines()[0] == "1 users, 1 samples"


def test_unknown_command_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "frobnicate")
    assert code == 1
    assert "usage error" in err


def test_extract_column_counts(trace_file, capsys):
    code, out, err = run_cli(capsys, "extract", trace_file, "--alpha", "6")
    assert code == 0
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "user_id"
    assert len(header) == 1 + 7 + 6
    assert header[8:] == [f"dc_{z}" for z in range(1, 7)]
    assert len(lines) == 1 + 7
    assert "coherence cell(s)" in err


def test_extract_alpha_zero_base_only(trace_file, capsys):
    code, out, _ = run_cli(capsys, "extract", trace_file, "--alpha", "0")
    header = out.splitlines()[0].split(",")
    assert code == 0
    assert len(header) == 1 + 7


def test_extract_reruns_byte_identical(trace_file, capsys):
    _, out1, _ = run_cli(capsys, "extract", trace_file)
    _, out2, _ = run_cli(capsys, "extract", trace_file)
    assert out1 == out2


def test_extract_to_file(trace_file, tmp_path, capsys):
    out_path = tmp_path / "matrix.csv"
    code, out, _ = run_cli(capsys, "extract", trace_file, "--out", str(out_path))
    assert code == 0
    assert out == ""
    assert out_path.read_text().startswith("user_id,lat,lon,")


def test_stats_csv_layout(trace_file, capsys):
    code, out, _ = run_cli(capsys, "stats", trace_file, "--alpha", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("feature,mean,se,median,sd,")
    names = [l.split(",")[0] for l in lines[1:]]
    assert names == ["lat", "lon", "month", "day", "hour", "minute", "weekday", "dc_1", "dc_2"]


def test_stats_json_constant_column(tmp_path, capsys):
    path = tmp_path / "t.csv"
    path.write_text(
        "user_id,timestamp,latitude,longitude\n"
        + "".join(f"u1,2020-01-0{i}T10:00,35.000000,139.000000\n" for i in range(1, 5))
    )
    code, out, _ = run_cli(capsys, "--format", "json", "stats", str(path), "--alpha", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["lat"]["sd"] == 0.0
    assert doc["lat"]["skewness"] is None  # undefined for a constant column


def test_evaluate_header_and_metrics(trace_file, capsys):
    code, out, _ = run_cli(
        capsys, "evaluate", trace_file, "--estimators", "3", "--folds", "2"
    )
    assert code == 0
    lines = out.splitlines()
    assert "algorithm=rf" in lines[0]
    assert "alpha=3" in lines[0]  # rf default
    assert "k=2" in lines[0]
    assert lines[1].startswith("f1")
    assert len(lines) == 7


def test_evaluate_json_settings_echo(trace_file, capsys):
    code, out, _ = run_cli(
        capsys, "--format", "json", "--seed", "5", "evaluate", trace_file,
        "--algorithm", "et", "--estimators", "2", "--folds", "2",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["settings"]["algorithm"] == "extratrees"
    assert doc["settings"]["alpha"] == 4  # extratrees default
    assert doc["settings"]["seed"] == 5
    assert set(doc["metrics"]) == {"f1", "accuracy", "precision", "recall", "fpr", "fnr"}


def test_evaluate_single_fold_rejected(trace_file, capsys):
    code, _, err = run_cli(capsys, "evaluate", trace_file, "--folds", "1")
    assert code == 1
    assert "usage error" in err


def test_evaluate_deterministic(trace_file, capsys):
    argv = ("--seed", "3", "evaluate", trace_file, "--estimators", "4", "--folds", "2")
    _, out1, _ = run_cli(capsys, *argv)
    _, out2, _ = run_cli(capsys, *argv)
    assert out1 == out2


def test_sweep_csv_output(trace_file, tmp_path, capsys):
    out_path = tmp_path / "sweep.csv"
    code, out, _ = run_cli(
        capsys, "--format", "csv", "sweep", trace_file,
        "--algorithms", "rf", "--alpha-min", "1", "--alpha-max", "2",
        "--estimators", "2", "--folds", "2", "--out", str(out_path),
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("algorithm,alpha,f1,")
    assert [l.split(",")[1] for l in lines[1:]] == ["0", "1", "2"]
    assert out_path.read_text() == out


def test_sweep_bad_alpha_range(trace_file, capsys):
    code, _, err = run_cli(
        capsys, "sweep", trace_file, "--alpha-min", "4", "--alpha-max", "2"
    )
    assert code == 1
    assert "usage error" in err


def test_synth_writes_parseable_csv(tmp_path, capsys):
    out_path = tmp_path / "synth.csv"
    code, _, err = run_cli(
        capsys, "--seed", "1", "synth", "--users", "3", "--samples", "5",
        "--out", str(out_path),
    )
    assert code == 0
    assert "wrote 15 samples for 3 users" in err
    text = out_path.read_text()
    assert text.startswith("user_id,timestamp,latitude,longitude\n")
    assert len(text.strip().splitlines()) == 16


def test_synth_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run_cli(capsys, "--seed", "7", "synth", "--users", "2", "--samples", "8",
                "--out", str(path))
    assert a.read_text() == b.read_text()


def test_threat_table_output(capsys):
    code, out, _ = run_cli(capsys, "threat", "--forge", "1e-4", "--tries", "4")
    assert code == 0
    assert "pr_adversary" in out
    assert "4e-10" in out
    assert "pr_post_compromise 0.0001 (0.01%)" in out


def test_threat_json_values(capsys):
    code, out, _ = run_cli(capsys, "--format", "json", "threat", "--forge", "1e-4",
                           "--tries", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["pr_adversary"] == pytest.approx(6e-10, rel=1e-12)
    assert doc["pr_post_compromise"] == 1e-4
    assert doc["params"]["tau"] == 6


def test_threat_overflow_is_data_error(capsys):
    code, _, err = run_cli(capsys, "threat", "--forge", "0.1", "--digits", "400")
    assert code == 2
    assert "data error" in err


def test_threat_invalid_forge_rate(capsys):
    code, _, err = run_cli(capsys, "threat", "--forge", "1.5")
    assert code == 1
    assert "usage error" in err
