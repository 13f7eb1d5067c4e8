import csv
import json
import subprocess
import sys

import pytest

from flatbilliards import corpus
from flatbilliards.cli import EXIT_INVALID, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, run


@pytest.fixture()
def square_json(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(corpus.get("square").to_json())
    return path


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(line for line in fh if not line.startswith("#")))


def test_double(tmp_path, square_json, capsys):
    out = tmp_path / "surface.json"
    assert run(["double", "--in", str(square_json), "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert len(doc["cone_points"]) == 4
    assert "4 cone points" in capsys.readouterr().out


def test_trace_polygon_and_surface(tmp_path, square_json):
    out = tmp_path / "orbit.json"
    svg = tmp_path / "orbit.svg"
    assert run(["trace", "--in", str(square_json), "--out", str(out), "--start", "1/2", "3/10",
                "--dir", "1", "0", "--length", "10", "--svg", str(svg)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["termination"]["kind"] == "periodic"
    assert svg.read_text().startswith("<svg")
    surf = tmp_path / "surface.json"
    run(["double", "--in", str(square_json), "--out", str(surf)])
    assert run(["trace", "--in", str(surf), "--out", str(out), "--start", "0.5", "0.5",
                "--dir", "1", "1", "--length", "10"]) == EXIT_OK
    assert json.loads(out.read_text())["termination"]["kind"] == "hit_cone"


def test_cylinders(tmp_path, square_json, capsys):
    surf = tmp_path / "surface.json"
    run(["double", "--in", str(square_json), "--out", str(surf)])
    out, svg = tmp_path / "cyl.json", tmp_path / "cyl.svg"
    assert run(["cylinders", "--in", str(surf), "--eps", "1/10", "--out", str(out), "--svg", str(svg)]) == EXIT_OK
    assert len(json.loads(out.read_text())["cylinders"]) == 20
    assert svg.exists()


def test_check_cc_is_deterministic(tmp_path, square_json):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["check-cc", "--in", str(square_json), "--eps", "0.2", "--samples", "50", "--length", "50",
            "--seed", "7"]
    assert run(args + ["--out", str(a)]) == EXIT_OK
    assert run(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["seed"] == 7


def test_spectrum(tmp_path, square_json):
    out, svg = tmp_path / "spectrum.csv", tmp_path / "u.svg"
    assert run(["spectrum", "--in", str(square_json), "--out", str(out), "--h", "0.05", "--k", "5",
                "--svg", str(svg), "--plot", "2"]) == EXIT_OK
    rows = _rows(out)
    assert rows[0] == ["k", "lambda_sq", "residual"]
    assert len(rows) == 6
    assert out.read_text().startswith("# seed=0")
    assert "color_scale" in svg.read_text()


def test_control(tmp_path, square_json):
    out = tmp_path / "report.csv"
    assert run(["control", "--in", str(square_json), "--eps", "0.25", "--bc", "dirichlet", "--k", "100",
                "--h", "0.02", "--out", str(out)]) == EXIT_OK
    assert len(_rows(out)) == 101
    summary = json.loads((tmp_path / "report.json").read_text())
    assert summary["c_hat"] > 0
    assert summary["k_max"] == 100


def test_bz_check(tmp_path, monkeypatch):
    monkeypatch.setenv("FLATBILLIARDS_WORKERS", "2")
    out, summ = tmp_path / "bz.csv", tmp_path / "bz.json"
    assert run(["bz-check", "--out", str(out), "--count", "5", "--n", "80", "--band", "16",
                "--summary", str(summ)]) == EXIT_OK
    assert len(_rows(out)) == 6
    assert json.loads(summ.read_text())["max_ratio"] > 0


def test_exit_codes(tmp_path, square_json):
    out = tmp_path / "x.json"
    assert run([]) == EXIT_USAGE
    assert run(["nonsense"]) == EXIT_USAGE
    assert run(["double", "--out", str(out)]) == EXIT_USAGE
    assert run(["double", "--in", str(tmp_path / "missing.json"), "--out", str(out)]) == EXIT_INVALID
    bad = tmp_path / "bowtie.json"
    bad.write_text(json.dumps({"outer": [["0", "0"], ["1", "1"], ["1", "0"], ["0", "1"]]}))
    assert run(["double", "--in", str(bad), "--out", str(out)]) == EXIT_INVALID
    assert run(["cylinders", "--in", str(square_json), "--eps", "0", "--out", str(out)]) == EXIT_INVALID
    assert run(["spectrum", "--in", str(square_json), "--out", str(out), "--h", "-1"]) == EXIT_INVALID
    assert run(["spectrum", "--in", str(bad), "--out", str(out), "--h", "0.1"]) == EXIT_SOLVER


def test_failed_write_leaves_no_partial_file(tmp_path, square_json):
    target = tmp_path / "nodir" / "out.json"
    assert run(["double", "--in", str(square_json), "--out", str(target)]) == EXIT_INVALID
    assert not target.exists()


def test_console_entry_point(tmp_path, square_json):
    out = tmp_path / "surface.json"
    proc = subprocess.run([sys.executable, "-m", "flatbilliards.cli", "double", "--in", str(square_json),
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "flatbilliards.cli", "--bogus"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
    assert "usage" in proc.stderr
