import json
import shutil
import subprocess

import numpy as np
import pytest

from conetda.cli import main
from conetda.io import write_diagrams_json
from conetda.persistence import INF, PersistenceDiagram


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_transport_wasserstein(tmp_path, capsys):
    np.savetxt(tmp_path / "d.csv", [[0.0, 1.0], [1.0, 0.0]], delimiter=",")
    np.savetxt(tmp_path / "a.csv", [1.0, 0.0])
    np.savetxt(tmp_path / "b.csv", [0.5, 0.5])
    argv = ["transport", "wasserstein", "--p", "1", "--dist", str(tmp_path / "d.csv"),
            "--alpha", str(tmp_path / "a.csv"), "--beta", str(tmp_path / "b.csv"),
            "--coupling-out", str(tmp_path / "c.csv")]
    assert main(argv) == 0
    assert _json_out(capsys)["value"] == pytest.approx(0.5)
    assert np.allclose(np.loadtxt(tmp_path / "c.csv", delimiter=","), [[0.5, 0.5], [0.0, 0.0]])


def test_transport_bottleneck(tmp_path, capsys):
    write_diagrams_json(tmp_path / "a.json", {1: PersistenceDiagram(1, ((0.0, 1.0),))})
    write_diagrams_json(tmp_path / "b.json", {1: PersistenceDiagram(1, ((0.0, INF),))})
    assert main(["transport", "bottleneck", "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "b.json")]) == 0
    assert _json_out(capsys)["value"] == "inf"
    assert main(["transport", "bottleneck", "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "a.json")]) == 0
    assert _json_out(capsys)["value"] == 0.0


@pytest.fixture
def well_image(tmp_path):
    yy, xx = np.mgrid[0:9, 0:9]
    img = np.clip(np.abs(np.hypot(yy - 4, xx - 4) - 2.5) - 0.75, 0, 1.0)
    np.savetxt(tmp_path / "img.csv", img, delimiter=",")
    return tmp_path / "img.csv"


def test_diagram_and_cone(well_image, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["diagram", "--image", str(well_image), "--cone", "--out", str(out), "--format", "csv"]) == 0
    coned = {d["dim"]: d["pairs"] for d in _json_out(capsys)["diagrams"]}
    assert coned[1] == [[0.0, 1.0]]
    assert (out / "diagrams.csv").exists() and (out / "barcode_dim1.svg").exists()
    assert main(["diagram", "--image", str(well_image)]) == 0
    raw = {d["dim"]: d["pairs"] for d in _json_out(capsys)["diagrams"]}
    assert raw[1] == [[0.0, 1.0]]
    assert main(["cone", "--image", str(well_image), "--out", str(tmp_path / "cone.json")]) == 0
    assert _json_out(capsys)["agree"] is True


def test_missing_file_exits_2(tmp_path, capsys):
    assert main(["diagram", "--image", str(tmp_path / "none.csv")]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_input_exits_2(tmp_path):
    np.savetxt(tmp_path / "d.csv", [[0.0, 1.0], [1.0, 0.0]], delimiter=",")
    np.savetxt(tmp_path / "a.csv", [0.7, 0.7])
    argv = ["transport", "wasserstein", "--dist", str(tmp_path / "d.csv"),
            "--alpha", str(tmp_path / "a.csv"), "--beta", str(tmp_path / "a.csv")]
    assert main(argv) == 2


def test_verify_fault_exits_1_and_is_deterministic(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "small.toml"
    cfg.write_text("trials = 30\ncomplexes = 10\n")
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("TDA_OUT_DIR", str(tmp_path / "b"))
    assert main(["verify", "--config", str(cfg)]) == 0
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    assert main(["verify", "--config", str(cfg), "--fault", "skip-diagonal-zeroing", "--out", str(tmp_path / "c")]) == 1
    assert "VIOLATED" in capsys.readouterr().out


@pytest.mark.skipif(shutil.which("tda") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["tda", "diagram", "--image", str(tmp_path / "none.csv")], capture_output=True)
    assert res.returncode == 2
