import json

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

from polygreen.cli import main
from tests.conftest import fixture_path


@pytest.fixture
def runner():
    return CliRunner()


def _write_points(path, pts):
    with open(path, "w") as f:
        json.dump(pts, f)


def test_encode_creates_field(runner, tmp_path):
    pts = tmp_path / "pts.json"
    out = tmp_path / "f.pgc"
    _write_points(pts, [[0.5, 0.5]])
    r = runner.invoke(main, ["encode", "--cage", fixture_path("square.json"),
                             "--points", str(pts), "--target-order", "1",
                             "--out", str(out)])
    assert r.exit_code == 0
    assert out.read_bytes()[:4] == b"PGC1"


def test_encode_excludes_outside_points(runner, tmp_path):
    pts = tmp_path / "pts.json"
    out = tmp_path / "f.pgc"
    _write_points(pts, [[0.5, 0.5], [9.0, 9.0]])
    r = runner.invoke(main, ["encode", "--cage", fixture_path("square.json"),
                             "--points", str(pts), "--out", str(out)])
    assert r.exit_code == 0
    assert "outside" in r.output and "[1]" in r.output


def test_encode_deterministic(runner, tmp_path):
    pts = tmp_path / "pts.json"
    _write_points(pts, [[0.4, 0.6], [0.3, 0.3]])
    outs = []
    for name in ("a.pgc", "b.pgc"):
        out = tmp_path / name
        r = runner.invoke(main, ["encode", "--cage", fixture_path("blob.json"),
                                 "--points", str(pts), "--out", str(out)])
        assert r.exit_code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_encode_invalid_cage_exits_2(runner, tmp_path):
    pts = tmp_path / "pts.json"
    _write_points(pts, [[0.5, 0.5]])
    r = runner.invoke(main, ["encode", "--cage", fixture_path("open.json"),
                             "--points", str(pts), "--out", str(tmp_path / "f.pgc")])
    assert r.exit_code == 2
    assert "closure" in r.output


def test_encode_missing_file_exits_3(runner, tmp_path):
    r = runner.invoke(main, ["encode", "--cage", str(tmp_path / "missing.json"),
                             "--points", str(tmp_path / "missing2.json"),
                             "--out", str(tmp_path / "f.pgc")])
    assert r.exit_code == 3


def test_deform_identity_roundtrip(runner, tmp_path):
    pts_path = tmp_path / "pts.json"
    field_path = tmp_path / "f.pgc"
    out_path = tmp_path / "out.json"
    pts = [[0.2, 0.1], [-0.4, 0.3], [0.0, -0.5]]
    _write_points(pts_path, pts)
    r = runner.invoke(main, ["encode", "--cage", fixture_path("blob.json"),
                             "--points", str(pts_path), "--out", str(field_path)])
    assert r.exit_code == 0
    r = runner.invoke(main, ["deform", "--coords", str(field_path),
                             "--deformed", fixture_path("blob.json"),
                             "--out", str(out_path)])
    assert r.exit_code == 0
    out = np.asarray(json.load(open(out_path)))
    assert np.abs(out - np.asarray(pts)).max() < 1e-6


def test_deform_order_mismatch_exits_2(runner, tmp_path):
    pts_path = tmp_path / "pts.json"
    field_path = tmp_path / "f.pgc"
    _write_points(pts_path, [[0.1, 0.1]])
    r = runner.invoke(main, ["encode", "--cage", fixture_path("blob.json"),
                             "--points", str(pts_path), "--target-order", "3",
                             "--out", str(field_path)])
    assert r.exit_code == 0
    r = runner.invoke(main, ["deform", "--coords", str(field_path),
                             "--deformed", fixture_path("square.json"),
                             "--out", str(tmp_path / "o.json")])
    assert r.exit_code == 2
    assert "n_t = 3" in r.output


def test_warp_runs_on_fixture(runner, tmp_path):
    out = tmp_path / "warp.png"
    r = runner.invoke(main, ["warp", "--cage", fixture_path("blob_pixel.json"),
                             "--deformed", fixture_path("blob_pixel_bent.json"),
                             "--image", fixture_path("checker.png"),
                             "--resolution", "24", "--out", str(out)])
    assert r.exit_code == 0
    img = np.asarray(Image.open(out))
    assert img.shape == (128, 128, 4)
    assert img[..., 3].any()
    assert np.all(np.isfinite(img.astype(float)))


def test_field_psi0_is_identically_zero(runner, tmp_path):
    out = tmp_path / "psi0.png"
    r = runner.invoke(main, ["field", "--cage", fixture_path("quad.json"),
                             "--which", "psi", "--curve", "0", "--coeff", "0",
                             "--res", "32", "--out", str(out)])
    assert r.exit_code == 0
    assert "min 0" in r.output and "max 0" in r.output


def test_field_invalid_curve_index_exits_2(runner, tmp_path):
    r = runner.invoke(main, ["field", "--cage", fixture_path("quad.json"),
                             "--which", "phi", "--curve", "9", "--coeff", "0",
                             "--out", str(tmp_path / "x.png")])
    assert r.exit_code == 2


def test_check_passes_on_quadratic_cage(runner):
    r = runner.invoke(main, ["check", "--cage", fixture_path("quad.json"),
                             "--samples", "5", "--seed", "1"])
    assert r.exit_code == 0
    assert r.output.count("pass") == 4


def test_check_reproducible(runner):
    args = ["check", "--cage", fixture_path("quad.json"), "--samples", "4",
            "--seed", "7"]
    r1 = runner.invoke(main, args)
    r2 = runner.invoke(main, args)
    assert r1.output == r2.output


def test_check_corrupt_alpha_fails_loudly(runner):
    r = runner.invoke(main, ["check", "--cage", fixture_path("quad.json"),
                             "--samples", "3", "--seed", "0", "--corrupt-alpha"])
    assert r.exit_code == 1
    assert "FAIL" in r.output
    assert "worst offending configuration" in r.output
