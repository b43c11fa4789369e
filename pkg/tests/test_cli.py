import json
import os

import pytest

from polarlines.cli import main, parse_theta, format_theta, InputError
from polarlines.matrix import parse_matrix
from polarlines.sines import normalize, parse_sum


@pytest.fixture
def run(capsys, data_dir):
    def _run(*args):
        argv = [os.path.join(data_dir, a) if os.path.exists(os.path.join(data_dir, a)) else a
                for a in args]
        code = main(argv)
        out = capsys.readouterr()
        return code, out.out, out.err
    return _run


def test_normalize_and_equiv(run):
    code, out, _ = run("normalize", "normalize-lhs.sin")
    assert code == 0 and out.strip() == "s(1,2)s(3,4) + s(1,4)s(2,3)"
    code, out, _ = run("equiv", "normalize-lhs.sin", "normalize-rhs.sin")
    assert code == 0 and out.strip() == "true"
    code, out, _ = run("equiv", "normalize-lhs.sin", "main.sin")
    assert code == 1 and out.strip() == "false"


def test_det_output_reparses(run, data_dir):
    code, out, _ = run("det", "m8.mat", "2,3,4,5,6,8,9,10")
    assert code == 0
    want = parse_sum("-SN(1,7)SN(1,7)SN(1,5)") * parse_sum(open(os.path.join(data_dir, "main.sin")).read())
    assert parse_sum(out) == normalize(want)
    code, _, err = run("det", "m8.mat")
    assert code == 2 and "square" in err


def test_sign(run):
    code, out, _ = run("sign", "main.sin", "--order", "1<2<3<4<5<6<7<8<9<10")
    assert (code, out.strip()) == (1, "indeterminate")
    code, _, err = run("sign", "main.sin")
    assert code == 2


def test_simplex(run):
    code, out, _ = run("simplex", "m8.mat", "2", "3", "4", "6", "8", "9", "10")
    assert code == 0 and out.strip() == "simplex: - + - + - + - +"
    code, out, _ = run("simplex", "m9.mat", "2,3,4,5,6,8,9,10", "--theta", "theta-star.th")
    assert code == 1 and out.startswith("not a simplex")
    code, out, _ = run("simplex", "m9.mat", "2,3,4,5,6,8,9,10", "--theta", "theta-degenerate.th")
    assert code == 0


def test_feasible(run):
    code, out, _ = run("feasible", "m9.mat", "theta-star.th")
    assert code == 0 and out.startswith("Feasible") and "verified: yes" in out
    code, out, _ = run("feasible", "m9.mat", "theta-degenerate.th")
    assert code == 1 and out.startswith("Infeasible") and "lambda =" in out


def test_om(run):
    code, out, _ = run("om", "circuits", "k4.graph")
    assert code == 0 and len(out.splitlines()) == 14
    code, out, _ = run("om", "cocircuits", "k4.graph")
    assert code == 0 and len(out.splitlines()) == 14
    code, out, _ = run("om", "strongmap", "fig-digraph.graph")
    assert (code, out.strip()) == (0, "true")
    code, out, _ = run("om", "find-order", "fig-digraph.graph")
    assert code == 0 and out.strip() == "order " + " < ".join(map(str, range(1, 11)))


def test_twist(run, data_dir):
    code, out, _ = run("twist", "fig-digraph.graph", "--minimality")
    assert code == 0
    assert "positive sequence: rows E X Z B C C' D D'; F = 8,2,6,3,4,9,10" in out
    assert "strictly simplicial: yes" in out and "order-minimal: yes" in out
    matrix_text = out.split("Sigma(T):\n", 1)[1].split("positive sequence")[0]
    assert parse_matrix(matrix_text).rows == parse_matrix(open(os.path.join(data_dir, "m8.mat")).read()).rows
    code, out, _ = run("twist", "k4.graph")
    assert code == 0 and out.startswith("order 1 < 3 < 2 < 4 < 5 < 6")


def test_verify_pappus(run):
    code, out, _ = run("verify-pappus")
    assert code == 0 and out.rstrip().endswith("checks passed")
    code, out, _ = run("verify-pappus", "--json")
    assert code == 0 and json.loads(out)["passed"] is True


def test_errors_cite_file_and_line(run, tmp_path):
    bad = tmp_path / "bad.sin"
    bad.write_text("s(1,2)\n+ (s(3,4)\n")
    code, _, err = run("normalize", str(bad))
    assert code == 2 and f"{bad}:2:" in err
    bad = tmp_path / "bad.mat"
    bad.write_text("SN(1,2) .\n. SN(1,x)\n")
    code, _, err = run("det", str(bad))
    assert code == 2 and f"{bad}:2:" in err
    bad = tmp_path / "bad.th"
    bad.write_text("1 = 10\n2 = ten\n")
    code, _, err = run("feasible", "m9.mat", str(bad))
    assert code == 2 and f"{bad}:2:" in err
    code, _, err = run("normalize", str(tmp_path / "missing.sin"))
    assert code == 2


def test_missing_angle_is_usage_error(run, tmp_path):
    th = tmp_path / "short.th"
    th.write_text("1 = 10\n")
    code, _, err = run("feasible", "m9.mat", str(th))
    assert code == 2 and "no angle for index 2" in err


def test_usage_errors_exit_2(run):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_theta_format_round_trip():
    th = {1: 42.0, 2: 20.5, 10: 170.0}
    assert parse_theta(format_theta(th)) == th
    assert parse_theta("# c\n3 = 1e1  # ten\n") == {3: 10.0}
    with pytest.raises(InputError):
        parse_theta("1 = 2\n1 = 3\n")
