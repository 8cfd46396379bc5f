import json

import numpy as np
import pytest

from evolsym.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATED, run
from evolsym.fields import load_field_csv
from evolsym.gallery import gallery_document, gallery_names


def _run(capsys, argv):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_gallery_listing(capsys):
    code, out, _ = _run(capsys, ["gallery"])
    assert code == EXIT_OK
    names = [item["name"] for item in json.loads(out)["operators"]]
    assert names == gallery_names()


def test_classify_heat(capsys):
    code, out, _ = _run(capsys, ["classify", "gallery:heat"])
    c = json.loads(out)["classification"]
    assert code == EXIT_OK
    assert (c["petrovskii"], c["deg_P"], c["p0"], c["hyperbolic"]) == ("satisfied", 2, "2", False)


def test_classify_from_file(capsys, tmp_path):
    p = tmp_path / "op.json"
    p.write_text(json.dumps(gallery_document("wave:n=2")))
    code, out, _ = _run(capsys, ["classify", str(p), "--shells", "8", "--dirs", "8"])
    assert code == EXIT_OK and json.loads(out)["classification"]["hyperbolic"] is True


def test_analyze_reports_growth(capsys, tmp_path):
    code, out, _ = _run(capsys, ["analyze", "gallery:wave", "--out", str(tmp_path)])
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["petrovskii"] == "satisfied"
    assert rep["growth_bound"]["k"] == 1
    assert (tmp_path / "analysis.json").read_text() == out


def test_solve_schrodinger(capsys, tmp_path):
    code, out, _ = _run(capsys, ["solve", "gallery:schrodinger", "--t", "0.5", "--N", "256", "--L", "40", "--out", str(tmp_path)])
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["unitarity"]["passed"]
    assert rep["final_norm"] == pytest.approx(rep["initial_norm"], rel=1e-12)
    u = load_field_csv(tmp_path / "field.csv")
    assert u.grid.shape == (256,) and u.time_label == 0.5


def test_solve_mode_initial_data(capsys, tmp_path):
    code, out, _ = _run(capsys, ["solve", "gallery:heat", "--t", "0.1", "--N", "64", "--L", "10", "--ic", "preset:mode:2", "--out", str(tmp_path)])
    assert code == EXIT_OK
    u = load_field_csv(tmp_path / "field.csv")
    xi = 2 * np.pi * 2 / 10
    assert np.abs(u.data).max() == pytest.approx(np.exp(-0.1 * xi**2), rel=1e-12)


def test_solve_refuses_backward_heat(capsys, tmp_path):
    code, _, err = _run(capsys, ["solve", "gallery:backward-heat", "--out", str(tmp_path)])
    assert code == EXIT_VIOLATED
    assert "--force" in err


def test_forced_backward_heat_overflow_is_an_error(capsys, tmp_path):
    code, _, err = _run(capsys, ["solve", "gallery:backward-heat", "--force", "--out", str(tmp_path)])
    assert code == EXIT_ERROR and "xi" in err


def test_cone_wave(capsys):
    code, out, _ = _run(capsys, ["cone", "gallery:wave", "--N", "1024", "--L", "100"])
    rep = json.loads(out)
    assert code == EXIT_OK and rep["spread_within_2_cells"]


def test_cone_heat_is_an_error(capsys):
    code, _, err = _run(capsys, ["cone", "gallery:heat"])
    assert code == EXIT_ERROR and "hyperbolic" in err


@pytest.mark.parametrize(
    "argv",
    [["frobnicate"], ["classify"], ["classify", "/no/such/file.json"], ["classify", "gallery:nope"], ["solve", "gallery:heat", "--t", "-1"], ["solve", "gallery:heat", "--N", "7"]],
)
def test_errors_exit_one(capsys, argv):
    code, _, err = _run(capsys, argv)
    assert code == EXIT_ERROR and err.startswith("evolsym")


def test_reports_are_byte_identical(capsys, tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        assert run(["analyze", "gallery:schrodinger:n=2", "--seed", "3", "--out", str(d)]) == EXIT_OK
        outs.append((d / "analysis.json").read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
