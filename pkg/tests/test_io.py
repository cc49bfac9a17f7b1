import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kyfanorth.decide import check_pair
from kyfanorth.errors import ParseError
from kyfanorth.generate import make_orthogonal_pair
from kyfanorth.io import (
    decode_matrix,
    decode_problem,
    decode_report,
    encode_matrix,
    encode_problem,
    encode_report,
    load_problem,
    load_report,
    save_problem,
    save_report,
)
from kyfanorth.model import REAL_FIELD, Tolerances


def complex_gauss(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(deadline=None, max_examples=100)
@given(st.lists(finite, min_size=4, max_size=4),
       st.lists(finite, min_size=4, max_size=4))
def test_matrix_json_round_trip_is_exact(re, im):
    m = (np.asarray(re) + 1j * np.asarray(im)).reshape(2, 2)
    text = json.dumps(encode_matrix(m))
    back = decode_matrix(json.loads(text))
    assert np.array_equal(back, m)


def test_matrix_decode_validation():
    good = encode_matrix(np.eye(2))
    for corrupt in (
        {**good, "re": good["re"][:-1]},
        {**good, "rows": "two"},
        {**good, "rows": -1},
        {**good, "im": "nope"},
        {k: v for k, v in good.items() if k != "cols"},
        "not a dict",
    ):
        with pytest.raises(ParseError):
            decode_matrix(corrupt)


def test_problem_round_trip(rng, tmp_path):
    a = complex_gauss(rng, 4, 4)
    b = complex_gauss(rng, 4, 4)
    path = tmp_path / "p.json"
    save_problem(path, {"a": a, "b": b}, 3, field_name=REAL_FIELD,
                 tolerances=Tolerances(decide=1e-8, strict=1e-7),
                 label={"kind": "custom", "expected": "NOT_ORTHOGONAL"})
    problem = load_problem(path)
    assert problem.k == 3
    assert problem.field == REAL_FIELD
    assert problem.subspace is None
    assert problem.tolerances.decide == 1e-8
    assert problem.label["kind"] == "custom"
    np.testing.assert_array_equal(problem.matrix("a"), a)
    np.testing.assert_array_equal(problem.matrix("b"), b)


def test_subspace_problem_round_trip(rng, tmp_path):
    a = complex_gauss(rng, 3, 3)
    w0 = complex_gauss(rng, 3, 3)
    w1 = complex_gauss(rng, 3, 3)
    path = tmp_path / "s.json"
    save_problem(path, {"a": a, "w0": w0, "w1": w1}, 2,
                 subspace=["w0", "w1"])
    problem = load_problem(path)
    assert problem.subspace == ["w0", "w1"]
    basis = problem.basis()
    np.testing.assert_array_equal(basis[0], w0)
    np.testing.assert_array_equal(basis[1], w1)


def test_problem_decode_validation(rng):
    a = complex_gauss(rng, 3, 3)
    good = encode_problem({"a": a, "b": a}, 2)
    bad_schema = {**good, "schema_version": 99}
    with pytest.raises(ParseError):
        decode_problem(bad_schema)
    with pytest.raises(ParseError):
        decode_problem({**good, "k": 0})
    with pytest.raises(ParseError):
        decode_problem({**good, "field": "quaternion"})
    with pytest.raises(ParseError):
        decode_problem({**good, "subspace": ["missing"]})
    with pytest.raises(ParseError):
        decode_problem({**good, "tolerances": {"wat": 1.0}})
    no_matrices = {k: v for k, v in good.items() if k != "matrices"}
    with pytest.raises(ParseError):
        decode_problem(no_matrices)


def test_report_round_trip_with_certificate(rng, tmp_path):
    a, b, _ = make_orthogonal_pair(4, 2, rng, q=2)
    decision = check_pair(a, b, 2)
    assert decision.certificate is not None
    path = tmp_path / "r.json"
    save_report(path, decision, timings={"total_s": 0.25}, seed=7)
    report = load_report(path)
    assert report.verdict == decision.verdict.name
    assert report.margin == pytest.approx(decision.margin)
    assert report.scale == pytest.approx(decision.scale)
    assert report.method == decision.method
    assert report.seed == 7
    assert report.timings["total_s"] == 0.25
    cert = report.certificate
    assert cert.kind is decision.certificate.kind
    np.testing.assert_allclose(cert.vectors, decision.certificate.vectors,
                               atol=0)


def test_report_decode_validation(rng):
    a, b, _ = make_orthogonal_pair(4, 2, rng)
    decision = check_pair(a, b, 2, want_certificate=False)
    good = encode_report(decision)
    with pytest.raises(ParseError):
        decode_report({**good, "schema_version": 5})
    with pytest.raises(ParseError):
        decode_report({**good, "verdict": "MAYBE"})
    no_margin = {k: v for k, v in good.items() if k != "margin"}
    with pytest.raises(ParseError):
        decode_report(no_margin)


def test_load_problem_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_problem(tmp_path / "nope.json")


def test_load_problem_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_problem(path)
