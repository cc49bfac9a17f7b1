import json

import numpy as np
import pytest

from kyfanorth.cli import main
from kyfanorth.io import load_problem, save_problem


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_pair(tmp_path, a, b, k, name="p.json", **kwargs):
    path = tmp_path / name
    save_problem(path, {"a": a, "b": b}, k, **kwargs)
    return str(path)


def test_norm_known_value(tmp_path, capsys):
    path = write_pair(tmp_path, np.diag([3.0, 2.0, 1.0]),
                      np.zeros((3, 3)), 2)
    code, out, _ = run(capsys, "norm", path)
    assert code == 0
    assert "ky_fan_norm(k=2) = 5" in out
    assert "singular_values = 3 2 1" in out


def test_norm_identity(tmp_path, capsys):
    path = write_pair(tmp_path, np.eye(4), np.zeros((4, 4)), 3)
    code, out, _ = run(capsys, "norm", path, "--k", "3")
    assert code == 0
    assert "= 3" in out


def test_check_exit_codes(tmp_path, capsys):
    # worked example: orthogonal direction on a singular matrix
    a = np.diag([2.0, 1.0, 0.0])
    b = np.zeros((3, 3))
    b[2, 2] = 1.0
    path = write_pair(tmp_path, a, b, 3)
    code, out, _ = run(capsys, "check", path)
    assert code == 0
    assert "ORTHOGONAL" in out

    # worked example: the identity shrinks diag(2,1) in the trace norm
    path = write_pair(tmp_path, np.diag([2.0, 1.0]), np.eye(2), 2,
                      name="neg.json")
    code, out, _ = run(capsys, "check", path)
    assert code == 1
    assert "NOT_ORTHOGONAL" in out


def test_check_blocks_and_oracle_agree(tmp_path, capsys):
    a = np.diag([2.0, 1.0, 0.0])
    b = np.zeros((3, 3))
    b[2, 2] = 1.0
    path = write_pair(tmp_path, a, b, 3)
    code_blocks, _, _ = run(capsys, "check", path, "--mode", "blocks")
    code_oracle, _, _ = run(capsys, "check", path, "--oracle")
    assert code_blocks == 0
    assert code_oracle == 0


def test_check_json_report(tmp_path, capsys):
    a = np.diag([2.0, 1.0])
    path = write_pair(tmp_path, a, np.eye(2), 2)
    report_path = str(tmp_path / "report.json")
    code, out, _ = run(capsys, "check", path, "--json",
                       "--report", report_path, "--seed", "5")
    assert code == 1
    payload = json.loads(out)
    assert payload["verdict"] == "NOT_ORTHOGONAL"
    assert payload["seed"] == 5
    assert payload["certificate"]["kind"] == "VIOLATION"
    on_disk = json.loads(open(report_path, encoding="utf-8").read())
    assert on_disk["verdict"] == payload["verdict"]


def test_check_degenerate_parallel_exit_code(tmp_path, capsys):
    a = np.diag([1.0, 0.0])
    path = write_pair(tmp_path, a, np.eye(2), 2)
    code, _, err = run(capsys, "check", path, "--mode", "parallel")
    assert code == 4
    assert "error" in err


def test_check_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops", encoding="utf-8")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2
    assert "error" in err


def test_usage_error_exit_code(capsys):
    assert run(capsys, "check")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_tolerance_flags_change_bands(tmp_path, capsys):
    rng = np.random.default_rng(3)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    path = write_pair(tmp_path, a, b, 2)
    loose, _, _ = run(capsys, "check", path,
                      "--tol-decide", "0.45", "--tol-strict", "0.5")
    strictish, _, _ = run(capsys, "check", path)
    assert strictish == 1
    # an absurdly wide decide band turns the same instance orthogonal
    assert loose == 0


def test_verify_pass_and_tamper(tmp_path, capsys):
    rng = np.random.default_rng(11)
    from kyfanorth.generate import make_orthogonal_pair

    a, b, _ = make_orthogonal_pair(4, 2, rng, q=2)
    path = write_pair(tmp_path, a, b, 2)
    report_path = str(tmp_path / "r.json")
    assert run(capsys, "check", path, "--report", report_path)[0] == 0

    code, out, _ = run(capsys, "verify", path, report_path)
    assert code == 0
    assert out.startswith("PASS")

    with open(report_path, encoding="utf-8") as fh:
        payload = json.load(fh)
    payload["certificate"]["vectors"]["re"][0] += 1e-2
    bad_path = str(tmp_path / "bad.json")
    with open(bad_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    code, out, _ = run(capsys, "verify", path, bad_path)
    assert code == 1
    assert out.startswith("FAIL")


def test_verify_without_certificate(tmp_path, capsys):
    a = np.diag([2.0, 1.0])
    path = write_pair(tmp_path, a, np.eye(2), 2)
    report_path = str(tmp_path / "r.json")
    run(capsys, "check", path, "--no-cert", "--report", report_path)
    code, out, _ = run(capsys, "verify", path, report_path)
    assert code == 1
    assert "absent" in out


def test_gen_kinds_round_trip(tmp_path, capsys):
    for kind, expected_code in (("orthogonal", 0), ("nonorthogonal", 1),
                                ("subspace", 0)):
        out_path = str(tmp_path / f"{kind}.json")
        code, out, _ = run(capsys, "gen", "--kind", kind, "--out", out_path,
                           "-n", "4", "-k", "2", "--seed", "7")
        assert code == 0
        assert "wrote" in out
        problem = load_problem(out_path)
        assert problem.label["kind"] == kind
        assert problem.label["seed"] == 7
        assert run(capsys, "check", out_path)[0] == expected_code


def test_gen_parallel_round_trip(tmp_path, capsys):
    out_path = str(tmp_path / "par.json")
    assert run(capsys, "gen", "--kind", "parallel", "--out", out_path,
               "-n", "4", "-k", "2", "--seed", "3")[0] == 0
    assert run(capsys, "check", out_path, "--mode", "parallel")[0] == 0


def test_sweep_plot_header_and_segment(tmp_path, capsys):
    # Hermitian direction at a tied top value: the pairing set is [-1, 1],
    # so h(0) = h(pi) = 1 and the fixed part is 0
    path = write_pair(tmp_path, np.eye(2), np.diag([1.0, -1.0]), 1)
    out_csv = str(tmp_path / "sweep.csv")
    code, out, _ = run(capsys, "sweep-plot", path, "--out", out_csv,
                       "--grid", "360", "--points", "50")
    assert code == 0
    lines = open(out_csv, encoding="utf-8").read().splitlines()
    assert lines[0] == "theta,h,fixed_re,fixed_im"
    assert len(lines) == 361
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    theta, h = rows[:, 0], rows[:, 1]
    np.testing.assert_allclose(h, np.abs(np.cos(theta)), atol=1e-9)
    assert np.abs(rows[:, 2:]).max() == 0.0

    pts = open(out_csv + ".points.csv", encoding="utf-8").read().splitlines()
    assert pts[0] == "re,im"
    assert len(pts) == 51


def test_sweep_plot_zero_direction(tmp_path, capsys):
    path = write_pair(tmp_path, np.diag([2.0, 1.0]), np.zeros((2, 2)), 1)
    out_csv = str(tmp_path / "zero.csv")
    assert run(capsys, "sweep-plot", path, "--out", out_csv)[0] == 0
    rows = open(out_csv, encoding="utf-8").read().splitlines()[1:]
    values = [float(line.split(",")[1]) for line in rows]
    assert max(abs(v) for v in values) <= 1e-12


def test_sweep_plot_singleton_sinusoid(tmp_path, capsys):
    # distinct singular values pin the pairing set to one point z0, the
    # support function is then |z0| cos(theta - arg z0)
    a = np.diag([2.0, 1.0])
    b = np.array([[0.3 + 0.4j, 0.0], [0.0, 0.0]])
    path = write_pair(tmp_path, a, b, 1)
    out_csv = str(tmp_path / "single.csv")
    assert run(capsys, "sweep-plot", path, "--out", out_csv,
               "--grid", "64")[0] == 0
    lines = open(out_csv, encoding="utf-8").read().splitlines()[1:]
    rows = np.array([[float(x) for x in line.split(",")] for line in lines])
    # for k=1 the top value is the boundary cluster, so z0 rides in the
    # compression and the fixed part is empty
    assert np.abs(rows[:, 2:]).max() == 0.0
    want = np.real(np.exp(-1j * rows[:, 0]) * (0.3 + 0.4j))
    np.testing.assert_allclose(rows[:, 1], want, atol=1e-9)


def test_check_real_field_flag(tmp_path, capsys):
    rng = np.random.default_rng(2)
    from kyfanorth.generate import make_orthogonal_pair
    from kyfanorth.model import REAL_FIELD

    a, b, _ = make_orthogonal_pair(4, 2, rng, field=REAL_FIELD)
    path = write_pair(tmp_path, a, b, 2, field_name=REAL_FIELD)
    assert run(capsys, "check", path)[0] == 0
    # the field stored in the problem can be overridden from the flag
    code_complex, _, _ = run(capsys, "check", path, "--field", "complex")
    assert code_complex in (0, 1)
