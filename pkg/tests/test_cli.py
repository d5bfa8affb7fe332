import json
import shutil
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from hilbert_geom.cli import main

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"
CORNER_PLANE = "1,0,0,0;0,1,1,0;0,0,0,1"

# (golden file, argv); file outputs use --out, the rest capture stdout
CASES = [
    ("dist_interval.txt", ["dist", "stock:interval", "0", "1/2"]),
    ("dist_simplex3.txt", ["dist", "stock:simplex3", "1,1,1,1", "1,2,3,4"]),
    ("dist_pentagon.txt", ["dist", str(DATA / "pentagon.json"), "0,0", "1,1"]),
    ("dual_cube3.json", ["dual", "stock:cube3"]),
    ("dual_simplex3.json", ["dual", "stock:simplex3"]),
    ("classify_cube_disjoint.txt", ["classify", "stock:cube3", "v:0,1,2,3", "v:4,5,6,7"]),
    ("classify_cube_meet.txt", ["classify", "stock:cube3", "v:0,1,2,3", "v:0,1,4,5"]),
    ("lattice_simplex2.json", ["lattice", "stock:simplex2"]),
    ("flats_corner.txt", ["flats-check", "stock:simplex3", str(DATA / "corner_flat.json"), "--dual"]),
    ("slice_corner.svg", ["slice", "stock:simplex3", "--plane", CORNER_PLANE,
                          "--flat", str(DATA / "corner_flat.json"), "--samples", "64"]),
    ("slice_corner.csv", ["slice", "stock:simplex3", "--plane", CORNER_PLANE,
                          "--flat", str(DATA / "corner_flat.json"), "--samples", "64"]),
    ("slice_ball2.csv", ["slice", "stock:ball2", "--samples", "16"]),
]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name,argv", CASES, ids=[c[0] for c in CASES])
def test_golden_and_byte_stable(name, argv, tmp_path, capsys):
    outputs = []
    for k in range(2):
        target = tmp_path / f"{k}_{name}"
        assert run(argv + ["--out", str(target)], capsys)[0] == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0] == (GOLDEN / name).read_bytes()


def test_dist_examples(capsys):
    code, out, _ = run(["dist", "stock:interval", "0", "0"], capsys)
    assert code == 0 and out.splitlines()[0] == "0.000000000000"
    code, _, err = run(["dist", "stock:interval", "0", "2"], capsys)
    assert code == 3 and "not in domain" in err


def test_invalid_domain_exit_codes(capsys):
    assert run(["dist", str(DATA / "malformed.json"), "0", "0"], capsys)[0] == 2
    assert run(["dual", str(DATA / "malformed.json")], capsys)[0] == 2
    assert run(["dual", "stock:nope"], capsys)[0] == 2
    assert run(["dist", "stock:interval", "0.5", "0"], capsys)[0] == 2


def test_dual_of_cube_counts(capsys):
    code, out, err = run(["dual", "stock:cube3"], capsys)
    assert code == 0 and "6 vertices, 8 facets" in err
    assert len(json.loads(out)["vertices"]) == 6


def test_double_dual_reproduces_input(tmp_path, capsys):
    first, second = tmp_path / "d1.json", tmp_path / "d2.json"
    src = DATA / "pentagon.json"
    run(["dual", str(src), "--out", str(first)], capsys)
    run(["dual", str(first), "--out", str(second)], capsys)
    code, out, _ = run(["dual", str(second)], capsys)
    assert sorted(json.loads(out)["vertices"]) == sorted(json.loads(first.read_text())["vertices"])
    verts = [[Fraction(x) for x in v] for v in json.loads(second.read_text())["vertices"]]
    affine = {(v[0] / v[2], v[1] / v[2]) for v in verts}
    assert affine == {(2, 0), (1, 2), (-1, 2), (-2, 0), (0, -2)}


def test_classify_unknown_face(capsys):
    assert run(["classify", "stock:cube3", "0", "99"], capsys)[0] == 4
    assert run(["classify", "stock:cube3", "v:0,7", "0"], capsys)[0] == 4
    assert run(["classify", "stock:cube3", "v:0,100", "0"], capsys)[0] == 4
    code, out, _ = run(["classify", "stock:cube3", "3", "3"], capsys)
    assert code == 0 and out.strip() == "Equal"


def test_flats_check_invalid(capsys):
    code, out, _ = run(["flats-check", "stock:simplex3", str(DATA / "facet_flat.json")], capsys)
    assert code == 1 and out.startswith("invalid: InteriorEscapes")


def test_verify_cli(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["verify", "faces", "--seed", "3", "--out", str(out)], capsys)
    assert code == 0 and json.loads(out.read_text())["passed"]
    code, _, err = run(["verify", "metric", "--samples", "20", "--tol", "1e-20"], capsys)
    assert code == 1 and "counterexample" in err


def test_slice_exit_codes(capsys):
    assert run(["slice", "stock:simplex3", "--plane", "1,-1,0,0;0,1,-1,0;0,0,1,-1"], capsys)[0] == 5
    assert run(["slice", "stock:simplex3"], capsys)[0] == 2


def test_slice_ellipse_is_round(tmp_path, capsys):
    path = tmp_path / "ball.csv"
    code, _, _ = run(["slice", "stock:ball3", "--plane", "1,0,0,1;0,1,0,1;0,0,0,1",
                      "--samples", "32", "--out", str(path)], capsys)
    assert code == 0
    rows = path.read_text().splitlines()[1:]
    pts = [tuple(map(float, r.split(",")[2:])) for r in rows]
    # algebraic circle fit x^2 + y^2 + a x + b y + c = 0
    a = np.array([[x, y, 1.0] for x, y in pts])
    rhs = np.array([-(x * x + y * y) for x, y in pts])
    coef, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    assert np.abs(a @ coef - rhs).max() < 1e-7
    radius = np.sqrt(coef[0] ** 2 / 4 + coef[1] ** 2 / 4 - coef[2])
    assert radius == pytest.approx(1.0, abs=1e-7)


@pytest.mark.skipif(shutil.which("hilbert-geom") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["hilbert-geom", "dist", "stock:interval", "0", "1/2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("0.549306144334\n")
