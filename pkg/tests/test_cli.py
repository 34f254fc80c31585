import json

import pytest

from holodyn.cli import main, parse_complex, parse_real
from holodyn.images import read_pnm


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_parse_complex():
    assert parse_complex("-0.12+0.74i") == complex(-0.12, 0.74)
    assert parse_complex("2.5j") == 2.5j
    assert parse_complex("-1") == -1
    with pytest.raises(Exception):
        parse_complex("abc")


def test_parse_real_golden():
    assert parse_real("golden") == pytest.approx(0.6180339887498949)


def test_render_julia(tmp_path, capsys):
    out = tmp_path / "j.pgm"
    code, data = run(capsys, "render", "julia", "--c=-1", "--size", "24", "--out", str(out))
    assert code == 0 and data["width"] == 24 and data["format"] == "P5"
    assert read_pnm(out)[1] == 24


def test_render_rational_and_henon(tmp_path, capsys):
    code, data = run(
        capsys, "render", "julia", "--rational", "0,0,1/-1,0,1", "--size", "16", "--out", str(tmp_path / "r.ppm"),
        "--colormap", "fire",
    )
    assert code == 0 and data["format"] == "P6"
    code, data = run(capsys, "render", "henon", "--lam", "0.5", "--mu", "0.5", "--size", "16",
                     "--out", str(tmp_path / "h.pgm"))
    assert code == 0 and data["delta_re"] == pytest.approx(0.25)


def test_ray_rotation(capsys):
    code, data = run(capsys, "ray", "rotation", "--angles", "1/7,2/7,4/7")
    assert code == 0 and data["rotation_number"] == "1/3"


def test_solve_center(capsys):
    code, data = run(capsys, "solve", "center", "--period", "3", "--seed=-0.12+0.74i")
    assert code == 0 and data["converged"]
    assert abs(complex(data["parameter_re"], data["parameter_im"]) - complex(-0.122561, 0.744862)) < 5e-6


def test_solve_misiurewicz_reduction_reported(capsys):
    code, data = run(capsys, "solve", "misiurewicz", "--preperiod", "6", "--period", "3", "--seed=-0.101+0.956i")
    assert code == 1
    assert data["reduced_to"] == {"preperiod": 4, "period": 1}
    assert "error" in data


def test_solve_mating_and_intertwine(capsys):
    for argv in (["solve", "mating"], ["solve", "intertwine", "--kind", "basilica"]):
        code, data = run(capsys, *argv)
        assert code == 0 and data["converged"]
        assert data["checks"] and all(c["passed"] for c in data["checks"])


def test_linearize(capsys):
    code, data = run(capsys, "linearize", "cf", "--x", "golden", "--n", "6")
    assert code == 0 and data["partial_quotients"] == [1] * 6
    code, data = run(capsys, "linearize", "cremer", "--depth", "3")
    assert code == 0 and data["verdict"] == "divergent-looking"


def test_thurston(capsys):
    code, data = run(capsys, "thurston", "run", "--f0", "tent")
    assert code == 0 and data["converged"] and data["kneading_match"]


def test_usage_errors_exit_2(capsys):
    assert main(["solve", "center", "--period", "3"]) == 2
    code = main(["solve", "center", "--period", "0", "--seed", "0.1"])
    assert code == 2
    code = main(["linearize", "cf", "--x", "1.5"])
    assert code == 2
    capsys.readouterr()
