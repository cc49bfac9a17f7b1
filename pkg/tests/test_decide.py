import numpy as np
import pytest

from kyfanorth.decide import (
    _range_model,
    check_pair,
    check_pair_blocks,
    check_parallel,
    check_subspace,
    extract_density,
    find_witness_block,
    find_witness_system,
    swept_minimum,
    verify_certificate,
)
from kyfanorth.errors import BadBlockStructure, DegenerateRank, NotOrthogonal
from kyfanorth.generate import (
    make_nonorthogonal_pair,
    make_nonparallel_pair,
    make_orthogonal_pair,
    make_parallel_pair,
    make_subspace_instance,
)
from kyfanorth.model import (
    REAL_FIELD,
    CertKind,
    Tolerances,
    Verdict,
)
from kyfanorth.norms import ky_fan_norm
from kyfanorth.subdiff import build_frame, subgradient_membership


def complex_gauss(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def test_swept_minimum_cosine():
    out = swept_minimum(lambda th: 2.0 + np.cos(th), lipschitz=1.0,
                        tol_abs=1e-9)
    assert out.value == pytest.approx(1.0, abs=1e-7)
    assert out.lower <= out.value
    assert out.value - out.lower <= 1e-8
    assert abs((out.theta % (2 * np.pi)) - np.pi) <= 1e-3


def test_swept_minimum_asymmetric():
    fun = lambda th: 1.5 + np.cos(th) + 0.5 * np.sin(3 * th)
    out = swept_minimum(fun, lipschitz=2.5, tol_abs=1e-10)
    grid = np.linspace(0, 2 * np.pi, 200001)
    dense = (1.5 + np.cos(grid) + 0.5 * np.sin(3 * grid)).min()
    assert out.value == pytest.approx(dense, abs=1e-8)
    assert out.lower <= dense + 1e-12


def test_range_model_support_dominates_samples(rng):
    from kyfanorth.oracle import sample_range_points

    a = complex_gauss(rng, 5, 5)
    b = complex_gauss(rng, 5, 5)
    k = 2
    frame = build_frame(a, k)
    model = _range_model(frame, b)
    pts = np.asarray(sample_range_points(a, b, k, count=200, rng=rng))
    thetas = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    h = model.support(thetas)
    for th, bound in zip(thetas, h):
        vals = np.real(np.exp(-1j * th) * pts)
        assert vals.max() <= bound + 1e-7


def test_check_pair_constructed_orthogonal(rng):
    for q, r in ((1, 0), (2, 0), (2, 1), (1, 2)):
        a, b, _ = make_orthogonal_pair(5, 3, rng, q=q, r=r)
        d = check_pair(a, b, 3)
        assert d.verdict is Verdict.ORTHOGONAL, (q, r, d.margin)
        assert d.margin >= -1e-7 * d.scale


def test_check_pair_constructed_negative(rng):
    for _ in range(10):
        a, b, _ = make_nonorthogonal_pair(4, 2, rng)
        d = check_pair(a, b, 2)
        assert d.verdict is Verdict.NOT_ORTHOGONAL
        assert d.certificate is not None
        assert d.certificate.kind is CertKind.VIOLATION
        lam = complex(d.certificate.coefficient)
        dip = ky_fan_norm(a + lam * b, 2)
        assert dip < ky_fan_norm(a, 2)
        assert dip == pytest.approx(d.certificate.norm_value, abs=1e-9)


def test_check_pair_zero_direction(rng):
    a = complex_gauss(rng, 4, 4)
    d = check_pair(a, np.zeros((4, 4)), 2)
    assert d.verdict is Verdict.ORTHOGONAL


def test_check_pair_zero_matrix(rng):
    b = complex_gauss(rng, 4, 4)
    d = check_pair(np.zeros((4, 4)), b, 2)
    assert d.verdict is Verdict.ORTHOGONAL


def test_check_pair_real_field(rng):
    hits = 0
    for _ in range(10):
        a, b, _ = make_orthogonal_pair(4, 2, rng, field=REAL_FIELD)
        d = check_pair(a, b, 2, field=REAL_FIELD)
        assert d.verdict is Verdict.ORTHOGONAL
        dc = check_pair(a, b, 2)
        hits += dc.verdict is Verdict.NOT_ORTHOGONAL
    # real-scalar orthogonality is weaker, the complex check must
    # refute at least some of these
    assert hits >= 3


def test_real_field_margin_is_two_point(rng):
    a, b, _ = make_orthogonal_pair(4, 2, rng, field=REAL_FIELD)
    d = check_pair(a, b, 2, field=REAL_FIELD)
    frame = build_frame(a, 2)
    model = _range_model(frame, b)
    two_point = float(model.support(np.array([0.0, np.pi])).min())
    assert d.margin == pytest.approx(two_point, abs=1e-12)


def test_blocks_worked_example_degenerate():
    a = np.diag([2.0, 1.0, 0.0]).astype(complex)
    b = np.zeros((3, 3), complex)
    b[2, 2] = 1.0
    d = check_pair_blocks(a, b, 3)
    assert d.verdict is Verdict.ORTHOGONAL
    # the trace norm grows one-for-one along this direction
    for lam in (0.5, -1.0, 1j):
        assert ky_fan_norm(a + lam * b, 3) == pytest.approx(3.0 + abs(lam),
                                                            abs=1e-10)


def test_blocks_worked_example_negative():
    a = np.diag([2.0, 1.0]).astype(complex)
    b = np.eye(2, dtype=complex)
    d = check_pair_blocks(a, b, 2)
    assert d.verdict is Verdict.NOT_ORTHOGONAL
    assert ky_fan_norm(a - 0.5 * b, 2) < ky_fan_norm(a, 2)


def test_pair_and_blocks_agree(rng):
    for trial in range(40):
        if trial % 2:
            a, b, _ = make_orthogonal_pair(4, 2, rng,
                                           q=int(rng.integers(1, 3)))
        else:
            a = complex_gauss(rng, 4, 4)
            b = complex_gauss(rng, 4, 4)
        d1 = check_pair(a, b, 2, want_certificate=False)
        d2 = check_pair_blocks(a, b, 2, want_certificate=False)
        assert d1.verdict is d2.verdict


def test_witness_system_quality(rng):
    a, b, _ = make_orthogonal_pair(5, 2, rng, q=2)
    cert = find_witness_system(a, b, 2)
    vectors = cert.vectors
    gram = vectors.conj().T @ vectors
    assert np.abs(gram - np.eye(2)).max() <= 1e-7
    report = verify_certificate(cert, a, b, 2)
    assert report["ok"], report


def test_witness_requires_orthogonality(rng):
    a, b, _ = make_nonorthogonal_pair(4, 2, rng)
    with pytest.raises(NotOrthogonal):
        find_witness_system(a, b, 2)


def test_witness_block_hand_example():
    a = np.eye(2, dtype=complex)
    b = np.diag([1.0, -1.0]).astype(complex)
    cert = find_witness_block(a, b, 1)
    t = cert.block_matrix
    assert np.trace(t).real == pytest.approx(1.0, abs=1e-9)
    w = np.linalg.eigvalsh(t)
    assert w.min() >= -1e-9
    assert w.max() <= 1.0 + 1e-9
    assert abs(np.trace(t @ b)) <= 1e-9
    assert cert.subgradient is not None
    assert subgradient_membership(a, 1, cert.subgradient, tol=1e-7)


def test_witness_block_random_instances(rng):
    for _ in range(10):
        a, b, _ = make_orthogonal_pair(5, 3, rng, q=2)
        cert = find_witness_block(a, b, 3)
        g = cert.subgradient
        assert subgradient_membership(a, 3, g, tol=1e-7)
        assert abs(np.trace(g.conj().T @ b)) <= 1e-6
        report = verify_certificate(cert, a, b, 3)
        assert report["ok"], report


def test_witness_block_degenerate(rng):
    a, b, _ = make_orthogonal_pair(5, 3, rng, q=2, degenerate=True)
    cert = find_witness_block(a, b, 3)
    report = verify_certificate(cert, a, b, 3)
    assert report["ok"], report
    g = cert.subgradient
    assert subgradient_membership(a, 3, g, tol=1e-7)
    assert abs(np.trace(g.conj().T @ b)) <= 1e-6


def test_subspace_positive_and_certificate(rng):
    a, basis, _ = make_subspace_instance(5, 2, 3, rng, orthogonal=True)
    d = check_subspace(a, basis, 2)
    assert d.verdict is Verdict.ORTHOGONAL
    assert d.certificate is not None
    assert d.certificate.kind is CertKind.DENSITY_SYSTEM
    report = verify_certificate(d.certificate, a, basis, 2)
    assert report["ok"], report


def test_subspace_negative(rng):
    a, basis, _ = make_subspace_instance(5, 2, 3, rng, orthogonal=False)
    d = check_subspace(a, basis, 2)
    assert d.verdict is Verdict.NOT_ORTHOGONAL
    assert d.certificate is not None
    report = verify_certificate(d.certificate, a, basis, 2)
    assert report["ok"], report


def test_subspace_empty_basis(rng):
    a = complex_gauss(rng, 4, 4)
    d = check_subspace(a, [], 2)
    assert d.verdict is Verdict.ORTHOGONAL
    assert d.details.get("trivial")


def test_subspace_hand_example():
    a = np.diag([1.0, 0.5]).astype(complex)
    w1 = np.zeros((2, 2), complex)
    w1[1, 1] = 1.0
    w2 = np.zeros((2, 2), complex)
    w2[0, 1] = 1.0
    d = check_subspace(a, [w1, w2], 1)
    assert d.verdict is Verdict.ORTHOGONAL
    assert len(d.certificate.densities) == 1
    p1 = d.certificate.densities[0]
    assert np.abs(p1 - np.diag([1.0, 0.0])).max() <= 1e-9


def test_subspace_single_matrix_matches_pair(rng):
    for trial in range(20):
        if trial % 2:
            a, b, _ = make_orthogonal_pair(4, 2, rng)
        else:
            a = complex_gauss(rng, 4, 4)
            b = complex_gauss(rng, 4, 4)
        d_pair = check_pair(a, b, 2, want_certificate=False)
        d_sub = check_subspace(a, [b], 2, want_certificate=False)
        assert d_pair.verdict is d_sub.verdict, trial


def test_extract_density_round_trip(rng):
    a, basis, _ = make_subspace_instance(5, 2, 2, rng, orthogonal=True)
    d = check_subspace(a, basis, 2)
    q_matrix = np.sum(d.certificate.densities, axis=0)
    frame = build_frame(a, 2)
    cert = extract_density(q_matrix, frame)
    assert len(cert.densities) == 2
    rebuilt = np.sum(cert.densities, axis=0)
    assert np.abs(rebuilt - q_matrix).max() <= 1e-8


def test_extract_density_rejects_leakage(rng):
    a = np.diag([3.0, 2.0, 1.0]).astype(complex)
    frame = build_frame(a, 2)
    bad = np.zeros((3, 3), complex)
    bad[0, 0] = 1.0
    bad[0, 2] = 0.5
    bad[2, 0] = 0.5
    bad[1, 1] = 1.0
    with pytest.raises(BadBlockStructure):
        extract_density(bad, frame)


def test_extract_density_rejects_bad_full_cluster():
    a = np.diag([3.0, 2.0, 1.0]).astype(complex)
    frame = build_frame(a, 2)
    bad = np.diag([2.0, 0.0, 0.0]).astype(complex)
    with pytest.raises(BadBlockStructure):
        extract_density(bad, frame)


def test_parallel_positive(rng):
    a, b, label = make_parallel_pair(5, 2, rng)
    d = check_parallel(a, b, 2)
    assert d.verdict is Verdict.PARALLEL
    lam = complex(d.details["lambda_re"], d.details["lambda_im"])
    assert abs(abs(lam) - 1.0) <= 1e-12
    achieved = ky_fan_norm(a + lam * b, 2)
    want = ky_fan_norm(a, 2) + ky_fan_norm(b, 2)
    assert achieved == pytest.approx(want, abs=1e-7 * want)
    report = verify_certificate(d.certificate, a, b, 2)
    assert report["ok"], report


def test_parallel_scalar_multiple(rng):
    a = complex_gauss(rng, 4, 4)
    c = 0.7 * np.exp(1j * 1.1)
    d = check_parallel(a, c * a, 3)
    assert d.verdict is Verdict.PARALLEL


def test_parallel_negative_hand_example():
    a = np.diag([1.0, 0.5]).astype(complex)
    b = np.diag([0.0, 1.0]).astype(complex)
    d = check_parallel(a, b, 1)
    assert d.verdict is Verdict.NOT_PARALLEL
    assert d.margin == pytest.approx(-1.0, abs=1e-9)


def test_parallel_negative_random(rng):
    a, b, _ = make_nonparallel_pair(4, 2, rng)
    d = check_parallel(a, b, 2)
    assert d.verdict is Verdict.NOT_PARALLEL


def test_parallel_degenerate_raises():
    a = np.diag([1.0, 0.0]).astype(complex)
    b = np.eye(2, dtype=complex)
    with pytest.raises(DegenerateRank):
        check_parallel(a, b, 2)


def test_verify_never_raises_on_garbage(rng):
    from kyfanorth.model import Certificate

    a, b, _ = make_orthogonal_pair(4, 2, rng)
    cert = Certificate(kind=CertKind.WITNESS_SYSTEM, vectors=None)
    report = verify_certificate(cert, a, b, 2)
    assert not report["ok"]


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerances(decide=1e-6, strict=1e-7)


def test_verdict_bands(rng):
    # a barely-perturbed orthogonal pair lands in the boundary band or
    # stays orthogonal, never flips to a hard negative
    a, b, _ = make_orthogonal_pair(4, 2, rng, q=2)
    scale = ky_fan_norm(a, 2) + ky_fan_norm(b, 2)
    bump = complex_gauss(rng, 4, 4)
    bump *= 3e-7 * scale / ky_fan_norm(bump, 2)
    d = check_pair(a, b + bump, 2)
    assert d.verdict in (Verdict.ORTHOGONAL, Verdict.BOUNDARY)
