import json
import re
import subprocess
import sys

import numpy as np
import pytest

from silhouvec import synth
from silhouvec.cli import main
from silhouvec.raster import RasterImage, save_image
from silhouvec.svgio import read_svg


@pytest.fixture
def disk_png(tmp_path):
    p = tmp_path / "disk.png"
    save_image(synth.disk(), p)
    return p


@pytest.fixture
def star_png(tmp_path):
    p = tmp_path / "star.png"
    save_image(synth.rounded_star(), p)
    return p


def _summary_value(out, key):
    return int(re.search(rf"{key}=(\d+)", out).group(1))


def test_vectorize_disk_reports_one_circle(disk_png, tmp_path, capsys):
    out = tmp_path / "o.svg"
    assert main(["vectorize", str(disk_png), "-o", str(out)]) == 0
    line = capsys.readouterr().out
    assert _summary_value(line, "control_points") == 0
    assert _summary_value(line, "circles") == 1
    assert _summary_value(line, "bytes") == out.stat().st_size
    doc = read_svg(out)
    assert len(doc.circles) == 1


def test_tau_monotonicity_via_cli(star_png, tmp_path, capsys):
    main(["vectorize", str(star_png), "-o", str(tmp_path / "a.svg"), "--tau-e", "0.25"])
    fine = _summary_value(capsys.readouterr().out, "control_points")
    main(["vectorize", str(star_png), "-o", str(tmp_path / "b.svg"), "--tau-e", "4"])
    coarse = _summary_value(capsys.readouterr().out, "control_points")
    assert fine >= coarse


def test_integer_flag_shrinks_file(star_png, tmp_path):
    main(["vectorize", str(star_png), "-o", str(tmp_path / "f.svg")])
    main(["vectorize", str(star_png), "-o", str(tmp_path / "i.svg"), "--integer"])
    assert (tmp_path / "i.svg").stat().st_size < (tmp_path / "f.svg").stat().st_size


def test_eval_dsc_on_own_vectorization(star_png, tmp_path, capsys):
    svg = tmp_path / "o.svg"
    main(["vectorize", str(star_png), "-o", str(svg), "--tau-e", "0.5"])
    capsys.readouterr()
    assert main(["eval-dsc", str(star_png), "--svg", str(svg)]) == 0
    assert float(capsys.readouterr().out.split("=")[1]) >= 0.95
    assert main(["eval-dsc", str(star_png), "--tau-e", "0.5"]) == 0
    assert float(capsys.readouterr().out.split("=")[1]) >= 0.95


def test_eval_repeat_forced_identity(star_png, capsys):
    assert main(["eval-repeat", str(star_png), "--angles", "0", "--scales", "1"]) == 0
    out = capsys.readouterr().out
    ratios = [float(x) for x in re.findall(r"^\s+\d+\.\d+\s+(\d\.\d+)$", out, re.M)]
    assert ratios == [1.0, 1.0]


def test_stats_json(disk_png, capsys):
    assert main(["stats", str(disk_png)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["circles"] == 1 and data["processing_seconds"] < 2


def test_invert_flag(tmp_path, capsys):
    img = np.where(synth.disk().samples < 127.5, 255.0, 0.0)
    p = tmp_path / "inv.png"
    save_image(RasterImage(img), p)
    main(["vectorize", str(p), "-o", str(tmp_path / "a.svg"), "--invert"])
    assert _summary_value(capsys.readouterr().out, "circles") == 1


def test_missing_input_fails_cleanly(tmp_path, capsys):
    out = tmp_path / "o.svg"
    assert main(["vectorize", str(tmp_path / "nope.png"), "-o", str(out)]) == 1
    assert "nope.png" in capsys.readouterr().err
    assert not out.exists()


def test_unwritable_output_fails_cleanly(disk_png, tmp_path, capsys):
    assert main(["vectorize", str(disk_png), "-o", str(tmp_path / "no" / "o.svg")]) == 1
    assert "cannot write" in capsys.readouterr().err
    assert sorted(p.name for p in tmp_path.iterdir()) == ["disk.png"]


def test_bad_flags_are_rejected(disk_png):
    for bad in (["--tau-e", "0"], ["--level", "255"], ["--sigma0", "-1"], ["--jobs", "0"]):
        with pytest.raises(SystemExit) as exc:
            main(["vectorize", str(disk_png), "-o", "x.svg", *bad])
        assert exc.value.code == 2


def test_jobs_environment_override(disk_png, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SILHOUVEC_JOBS", "zero")
    assert main(["vectorize", str(disk_png), "-o", str(tmp_path / "o.svg"), "--jobs", "2"]) == 1
    monkeypatch.setenv("SILHOUVEC_JOBS", "2")
    assert main(["vectorize", str(disk_png), "-o", str(tmp_path / "o.svg")]) == 0


def test_help_lists_defaults():
    out = subprocess.run([sys.executable, "-m", "silhouvec", "vectorize", "--help"],
                         capture_output=True, text=True, check=True).stdout
    for flag in ("--tau-e", "--sigma0", "--level", "--epsilon-flat", "--merge", "--jobs"):
        assert flag in out
    assert "default: 1" in out and "127.5" in out
