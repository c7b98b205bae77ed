"""Command-line interface: reports, configuration, exit codes and determinism."""

import json
import subprocess
import sys

import pytest

from bvf import cli
from bvf.errors import QuadratureError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_report_schema(capsys):
    code, out, _ = run(capsys, "pointset", "--pointset", "lattice:2")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"schema", "tool_version", "command", "config", "config_hash", "seed", "ok", "result"}
    assert doc["schema"] == "bvf/1"
    assert doc["result"]["N"] == 4
    assert len(doc["config_hash"]) == 16


def test_catalog_lists_shapes(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    names = {row["name"] for row in json.loads(out)["result"]["shapes"]}
    assert {"square", "disk", "whisker"} <= names


def test_validation_error_exit_code(capsys):
    code, _, err = run(capsys, "tail", "--Rmax", "-3")
    assert code == 1
    assert "validation error" in err


def test_unknown_shape_exit_code(capsys):
    code, _, err = run(capsys, "spectral-asymptote", "--shape", "hexagram", "--Rmax", "10")
    assert code == 1 and "hexagram" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["discrepancy", "--method", "bogus"])
    assert exc.value.code == 1


def test_numerical_failure_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise QuadratureError("forced")

    monkeypatch.setattr(cli.spectral, "jump_estimate_cutoff", boom)
    code, _, err = run(capsys, "spectral-asymptote", "--shape", "square", "--Rmax", "10")
    assert code == 2
    assert "numerical failure" in err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"pointset": "lattice:3", "seed": 5}))
    code, out, _ = run(capsys, "pointset", "--config", str(cfg))
    doc = json.loads(out)
    assert doc["result"]["N"] == 9 and doc["seed"] == 5
    code, out, _ = run(capsys, "pointset", "--config", str(cfg), "--pointset", "lattice:2")
    assert json.loads(out)["result"]["N"] == 4
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    code, _, err = run(capsys, "pointset", "--config", str(bad))
    assert code == 1 and "unknown config keys" in err


def test_csv_output(tmp_path, capsys):
    path = tmp_path / "trace.csv"
    code, _, _ = run(capsys, "tail", "--shape", "disk", "--Rmax", "20", "--csv", str(path))
    assert code == 0
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "param,estimate,uncertainty"
    assert len(lines) > 5


def test_out_file_matches_stdout(tmp_path, capsys):
    path = tmp_path / "r.json"
    run(capsys, "cm-check", "--pointset", "random:8", "--M", "3", "--out", str(path))
    _, out, _ = run(capsys, "cm-check", "--pointset", "random:8", "--M", "3")
    assert path.read_text() == out


def test_hash_ignores_plumbing(capsys):
    _, a, _ = run(capsys, "pointset", "--threads", "1")
    _, b, _ = run(capsys, "pointset", "--threads", "2")
    assert a == b


def test_discrepancy_both_methods_agree(capsys):
    code, out, _ = run(capsys, "discrepancy", "--u", "ball:0.25", "--pointset", "lattice:2", "--method", "both",
                       "--samples", "20000", "--seed", "3")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_subprocess_is_byte_deterministic():
    cmd = [sys.executable, "-m", "bvf.cli", "discrepancy", "--pointset", "random:5", "--method", "mc",
           "--samples", "5000", "--seed", "9"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.endswith(b"\n")
