import json
import subprocess
import sys

import pytest

from aztec_dimers.cli import main
from aztec_dimers.lattice import WeightScheme


@pytest.fixture
def weights(tmp_path):
    def write(ws, name="w.json"):
        path = tmp_path / name
        path.write_text(ws.to_json())
        return str(path)
    return write


def test_sample_writes_svg_and_json(tmp_path, weights):
    w = weights(WeightScheme.two_periodic(0.7))
    out, svg = tmp_path / "s.json", tmp_path / "t.svg"
    assert main(["sample", "--weights", w, "--order-n", "2", "--seed", "1", "--out", str(out),
                 "--svg", str(svg), "--threads", "1"]) == 0
    data = json.loads(out.read_text())
    assert data["order"] == 8 and data["config"]["seed"] == 1
    assert "artifact_version" in data
    assert len(data["assignment"]) == 8 * 9
    assert svg.read_text().count("<rect") == 8 * 9


def test_sample_csv_has_one_row_per_sample(tmp_path, weights):
    w = weights(WeightScheme.two_periodic(0.7))
    csv = tmp_path / "z.csv"
    assert main(["sample", "--weights", w, "--order-n", "3", "--count", "100", "--csv", str(csv),
                 "--mesh-exponent", "0", "--threads", "1", "--out", str(tmp_path / "o.json")]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0].startswith("#") and lines[1].startswith("sample,")
    assert len(lines) == 102


def test_bad_weights_is_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"k": 2}')
    assert main(["sample", "--weights", str(bad), "--order-n", "1"]) == 2
    assert main(["sample", "--weights", str(tmp_path / "missing.json"), "--order-n", "1"]) == 2
    assert main(["sample", "--order-n", "1"]) == 2


def test_verify_suites_and_mutation(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["pass"] and set(data["suites"]) == {"kasteleyn", "sampler", "spectral"}
    assert main(["verify", "--suite", "kasteleyn", "--signs", "1,1,1,1", "--out", str(out)]) == 1
    assert main(["verify", "--suite", "nonsense", "--out", str(out)]) == 2


def test_spectral_reports_period(tmp_path, weights):
    out, png = tmp_path / "p.json", tmp_path / "a.png"
    w = weights(WeightScheme.two_periodic(0.7))
    assert main(["spectral", "--weights", w, "--out", str(out), "--png", str(png),
                 "--resolution", "150"]) == 0
    data = json.loads(out.read_text())
    assert data["bounded_components"] == 1
    B = complex(*data["genus1"]["B"])
    assert abs(B.real) < 1e-8 and B.imag > 0
    assert png.stat().st_size > 0


def test_degenerate_weights_is_runtime_error(tmp_path, weights):
    w = weights(WeightScheme.two_periodic(1.0))
    assert main(["spectral", "--weights", w, "--out", str(tmp_path / "p.json"),
                 "--resolution", "150"]) == 3


def test_experiment_is_byte_identical(tmp_path, weights):
    w = weights(WeightScheme.two_periodic(0.7))
    outs = []
    for i in range(2):
        out = tmp_path / f"e{i}.json"
        assert main(["experiment", "--weights", w, "--order-n", "4", "--count", "30", "--seed", "5",
                     "--facet=-0.15,-0.15,0.15,0.15", "--mesh-exponent", "0", "--threads", "1",
                     "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert main(["experiment", "--weights", w, "--order-n", "4", "--count", "1"]) == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "aztec_dimers.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
