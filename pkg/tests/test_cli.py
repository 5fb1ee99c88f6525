import json

import numpy as np
import pytest

from mixholder.cli import main, parse_scales
from mixholder.kaczmarz import draw_samples, save_samples_csv


def test_parse_scales():
    assert parse_scales("5..12") == (5, 12)
    assert parse_scales("7") == (7, 7)
    with pytest.raises(Exception):
        parse_scales("9..3")


def test_experiment_csv_to_stdout(capsys):
    assert main(["experiment", "--dim", "2", "--scales", "3..4", "--test-points", "2000",
                 "--fbm-levels", "6", "--no-timing"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "m,n,p,err2,err_inf,err_int,seconds" and len(lines) == 3


def test_experiment_json_file_and_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d": 2, "test_points": 1000, "fbm_levels": 6}))
    out = tmp_path / "r.json"
    assert main(["experiment", "--config", str(cfg), "--scale", "3", "--format", "json",
                 "--output", str(out), "--seed", "4", "--shifts", "2"]) == 0
    recs = json.loads(out.read_text())
    assert [r["m"] for r in recs] == [3]


def test_guard_violation_exit_code(capsys):
    assert main(["experiment", "--scales", "5..30"]) == 2
    assert "error" in capsys.readouterr().err


def test_fit_eval_integrate(tmp_path, capsys):
    f = lambda X: X[:, 0] + X[:, 1]
    X, y = draw_samples(f, 2, 3000, seed=0)
    samples = tmp_path / "s.csv"
    save_samples_csv(samples, X, y)
    model = tmp_path / "m.bin"
    assert main(["fit", "--samples", str(samples), "--dim", "2", "--scale", "4",
                 "--output", str(model)]) == 0
    pts = tmp_path / "p.csv"
    np.savetxt(pts, [[0.25, 0.25], [0.75, 0.5]], delimiter=",")
    out = tmp_path / "v.txt"
    assert main(["eval", "--model", str(model), "--points", str(pts), "--output", str(out)]) == 0
    vals = np.loadtxt(out)
    assert np.allclose(vals, [0.5, 1.25], atol=0.1)
    capsys.readouterr()
    assert main(["integrate", "--model", str(model)]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(1.0, abs=0.05)


def test_fit_errors(tmp_path, capsys):
    samples = tmp_path / "s.csv"
    samples.write_text("x1,x2,value\n0.1,0.2,1.0\n")
    assert main(["fit", "--samples", str(samples), "--scale", "2", "--steps", "5",
                 "--output", str(tmp_path / "m.bin")]) == 2
    assert main(["fit", "--samples", str(tmp_path / "nope.csv"), "--scale", "2",
                 "--output", str(tmp_path / "m.bin")]) == 2
    assert main(["eval", "--model", str(samples), "--points", str(samples)]) == 2


def test_fbm_command(tmp_path, capsys):
    assert main(["fbm", "--levels", "3", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "node,value" and len(lines) == 10
    out = tmp_path / "p.csv"
    assert main(["fbm", "--levels", "3", "--seed", "1", "--output", str(out)]) == 0
    assert out.read_text().splitlines() == lines
