"""Decision procedures with certificates for Ky Fan k-norm orthogonality.

A matrix A is orthogonal to B when ||A + c*B||_(k) >= ||A||_(k) for every
scalar c. By convex duality this holds iff 0 lies in the attainable set
K = {tr(G* B) : G a subgradient of the norm at A}, a compact convex subset
of the plane. The engine models K exactly through the spectral frame of A
(a fixed complex offset plus a q-trace numerical range of the boundary
compression), reads the decision off the minimum of its support function
via a Lipschitz-certified sweep, and backs each verdict with a checkable
certificate: an orthonormal witness system, a feasible boundary-block
coefficient with its assembled subgradient, a density system for subspaces,
or an explicit norm-decreasing scalar.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import (
    BadBlockStructure,
    DegenerateRank,
    NoConvergence,
    NotOrthogonal,
    ShapeMismatch,
    WitnessSearchFailed,
)
from .linalg import (
    as_matrix,
    fan_eigsum_batch,
    herm,
    require_square,
    top_q_eigsum,
    top_q_singsum,
)
from .model import (
    COMPLEX_FIELD,
    REAL_FIELD,
    CertKind,
    Certificate,
    Decision,
    Tolerances,
    Verdict,
)
from .norms import ky_fan_norm, ky_fan_norm_batch, require_k
from .subdiff import SubdifferentialFrame, build_frame

__all__ = [
    "RangeSetModel",
    "SweepOutcome",
    "swept_minimum",
    "check_pair",
    "check_pair_blocks",
    "check_subspace",
    "check_parallel",
    "find_witness_system",
    "find_witness_block",
    "extract_density",
    "verify_certificate",
]

_TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# certified support-function sweep


@dataclass(frozen=True)
class SweepOutcome:
    """Result of a certified circular minimization."""

    theta: float
    value: float
    lower: float
    evals: int


def swept_minimum(fun, lipschitz: float, n0: int = 256, tol_abs: float = 1e-12,
                  max_evals: int = 400000) -> SweepOutcome:
    """Global minimum of a vectorized periodic function on [0, 2pi).

    ``lipschitz`` must be a true Lipschitz constant; segment midpoint bounds
    then make the returned ``lower`` rigorous and the loop refines only
    segments that could still beat the incumbent by more than ``tol_abs``.
    """
    n0 = max(8, int(n0))
    lipschitz = max(float(lipschitz), 0.0)
    theta = np.linspace(0.0, _TWO_PI, n0, endpoint=False)
    vals = np.asarray(fun(theta), dtype=float)
    evals = n0
    seg_l = theta
    seg_w = np.full(n0, _TWO_PI / n0)
    val_l = vals
    val_r = np.roll(vals, -1)
    i = int(np.argmin(vals))
    best = float(vals[i])
    best_theta = float(theta[i])
    lower_global = best
    while True:
        lower = 0.5 * (val_l + val_r) - 0.5 * lipschitz * seg_w
        lower_global = float(lower.min())
        if best - lower_global <= tol_abs or evals >= max_evals:
            break
        act = np.flatnonzero(lower < best - tol_abs)
        if act.size == 0:
            break
        mids = seg_l[act] + 0.5 * seg_w[act]
        mv = np.asarray(fun(mids), dtype=float)
        evals += act.size
        j = int(np.argmin(mv))
        if float(mv[j]) < best:
            best = float(mv[j])
            best_theta = float(mids[j])
        keep = np.ones(seg_l.size, dtype=bool)
        keep[act] = False
        half = 0.5 * seg_w[act]
        seg_l = np.concatenate([seg_l[keep], seg_l[act], mids])
        seg_w = np.concatenate([seg_w[keep], half, half])
        val_l = np.concatenate([val_l[keep], val_l[act], mv])
        val_r = np.concatenate([val_r[keep], mv, val_r[act]])
    return SweepOutcome(theta=best_theta, value=best,
                        lower=min(lower_global, best), evals=evals)


@dataclass
class RangeSetModel:
    """The attainable pairing set {tr(G* B)} of a direction B at a frame of A.

    The set equals fixed_part + {tr(T C) : T in the boundary coefficient set},
    where fixed_part collects the forced traces over singular clusters fully
    inside the top k and C = compression is the boundary compression of the
    rotated direction. m is the trace budget of the boundary coefficient.
    When the frame is degenerate (s_k = 0) the coefficient ranges over
    contractions on the widened tail and the support function loses its
    angular part except through fixed_part.
    """

    fixed_part: complex
    compression: np.ndarray
    m: int
    degenerate: bool = False
    wide_compression: np.ndarray | None = None

    def __post_init__(self):
        self._tail_const = (
            top_q_singsum(self.wide_compression, self.m)
            if self.degenerate else 0.0
        )

    @property
    def width(self) -> int:
        return int(self.compression.shape[1]) if self.compression.size else 0

    def _is_singleton(self) -> bool:
        # trace budget equal to the block width pins the coefficient to I
        return (not self.degenerate) and (self.m == self.width or self.m == 0)

    def _singleton_value(self) -> complex:
        if self.m == 0:
            return complex(self.fixed_part)
        return complex(self.fixed_part + np.trace(self.compression))

    def support(self, thetas):
        """max over the set of Re(e^{-i theta} z), vectorized over thetas."""
        th = np.atleast_1d(np.asarray(thetas, dtype=float))
        ph = np.exp(-1j * th)
        base = np.real(ph * complex(self.fixed_part))
        if self.degenerate:
            out = base + self._tail_const
        elif self._is_singleton():
            out = np.real(ph * self._singleton_value())
        else:
            c = self.compression
            hs = 0.5 * (ph[:, None, None] * c
                        + np.conj(ph)[:, None, None] * c.conj().T)
            out = base + fan_eigsum_batch(hs, self.m)
        if np.ndim(thetas) == 0:
            return float(out[0])
        return out

    def lipschitz(self) -> float:
        bound = abs(complex(self.fixed_part))
        if not self.degenerate and not self._is_singleton():
            bound += top_q_singsum(self.compression, min(self.m, self.width))
        elif self._is_singleton():
            bound = abs(self._singleton_value())
        return bound * (1.0 + 1e-12) + 1e-300

    def minimum(self, tol_abs: float) -> SweepOutcome:
        """min over theta of the support function, with closed forms when
        the set is a point or a disk-invariant offset."""
        if self.degenerate:
            z = complex(self.fixed_part)
            theta = 0.0 if z == 0 else (cmath.phase(z) + np.pi) % _TWO_PI
            v = self._tail_const - abs(z)
            return SweepOutcome(theta=theta, value=v, lower=v, evals=0)
        if self._is_singleton():
            z = self._singleton_value()
            theta = 0.0 if z == 0 else (cmath.phase(z) + np.pi) % _TWO_PI
            return SweepOutcome(theta=theta, value=-abs(z), lower=-abs(z),
                                evals=0)
        return swept_minimum(self.support, self.lipschitz(), tol_abs=tol_abs)

    def maximum(self, tol_abs: float) -> SweepOutcome:
        """max over theta of the support function = max |z| over the set."""
        if self.degenerate:
            z = complex(self.fixed_part)
            theta = cmath.phase(z) % _TWO_PI if z != 0 else 0.0
            v = self._tail_const + abs(z)
            return SweepOutcome(theta=theta, value=v, lower=v, evals=0)
        if self._is_singleton():
            z = self._singleton_value()
            theta = cmath.phase(z) % _TWO_PI if z != 0 else 0.0
            return SweepOutcome(theta=theta, value=abs(z), lower=abs(z),
                                evals=0)
        neg = swept_minimum(lambda th: -self.support(th), self.lipschitz(),
                            tol_abs=tol_abs)
        return SweepOutcome(theta=neg.theta, value=-neg.value,
                            lower=-neg.lower, evals=neg.evals)

    def contains(self, z: complex, tol: float, n_dirs: int = 64) -> bool:
        th = np.linspace(0.0, _TWO_PI, n_dirs, endpoint=False)
        lhs = np.real(np.exp(-1j * th) * complex(z))
        return bool(np.all(lhs <= self.support(th) + tol))


def _range_model(frame: SubdifferentialFrame, b: np.ndarray) -> RangeSetModel:
    q = frame.part.q
    if frame.u1.shape[1]:
        fixed = complex(np.trace(frame.u1.conj().T @ b @ frame.v1))
    else:
        fixed = 0.0 + 0.0j
    comp = frame.u2.conj().T @ b @ frame.v2
    if frame.degenerate_zero:
        wide = frame.u2_wide.conj().T @ b @ frame.v2
        return RangeSetModel(fixed_part=fixed, compression=comp, m=q,
                             degenerate=True, wide_compression=wide)
    return RangeSetModel(fixed_part=fixed, compression=comp, m=q)


# ---------------------------------------------------------------------------
# convex feasibility over the boundary coefficient polytope
# {T Hermitian : 0 <= T <= I, tr T = q}, by fully corrective Frank-Wolfe
# with exact reweighting of the active projector atoms.


def _simplex_weights(cols: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Least squares over the probability simplex via a penalized NNLS."""
    p = cols.shape[1]
    if p == 1:
        return np.ones(1)
    scale = max(float(np.abs(cols).max()), float(np.abs(target).max()), 1.0)
    rho = 1e4 * scale
    a = np.vstack([cols, np.full((1, p), rho)])
    b = np.concatenate([target, [rho]])
    w, _ = scipy.optimize.nnls(a, b)
    s = w.sum()
    if s <= 0:
        w = np.full(p, 1.0 / p)
    else:
        w = w / s
    return w


def _bottom_q_projector(g: np.ndarray, q: int) -> np.ndarray:
    w, vec = np.linalg.eigh(herm(g))
    cols = vec[:, :q]
    return cols @ cols.conj().T


@dataclass
class FeasibilityResult:
    t: np.ndarray
    residual: float
    gap: float
    converged: bool
    iterations: int
    errors: np.ndarray


def _feasible_coefficient(constraints: list, targets: np.ndarray, q: int,
                          d: int, tol: float, max_iter: int = 600) -> FeasibilityResult:
    """Find Hermitian 0 <= T <= I with tr T = q and tr(T H_i) = y_i for all i.

    Minimizes the squared constraint residual over the polytope; the linear
    oracle is a bottom-q eigenprojector of the gradient and every step
    re-solves the small simplex least squares over all atoms collected so
    far, so the objective is monotone and stalls only at the true minimum.
    """
    targets = np.asarray(targets, dtype=float)
    hs = [herm(as_matrix(h)) for h in constraints]
    if q == 0 or q == d:
        t = np.zeros((d, d), dtype=complex) if q == 0 else np.eye(d, dtype=complex)
        errs = np.array([float(np.real(np.trace(t @ h))) for h in hs]) - targets
        r = float(np.linalg.norm(errs))
        return FeasibilityResult(t=t, residual=r, gap=0.0, converged=r <= tol,
                                 iterations=0, errors=errs)

    def lmap(t):
        return np.array([float(np.real(np.trace(t @ h))) for h in hs])

    atoms = [np.eye(d, dtype=complex) * (q / d)]
    cols = [lmap(atoms[0])]
    weights = np.ones(1)
    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        col_mat = np.column_stack(cols)
        zeta = col_mat @ weights
        errs = zeta - targets
        resid = float(np.linalg.norm(errs))
        if resid <= tol:
            return FeasibilityResult(t=_combine(atoms, weights), residual=resid,
                                     gap=0.0, converged=True, iterations=it,
                                     errors=errs)
        grad = np.zeros((d, d), dtype=complex)
        for e, h in zip(errs, hs):
            grad += 2.0 * e * h
        t_cur = _combine(atoms, weights)
        p_new = _bottom_q_projector(grad, q)
        gap = float(np.real(np.trace((t_cur - p_new) @ grad)))
        if gap <= max(tol * tol, 1e-30):
            return FeasibilityResult(t=t_cur, residual=resid, gap=gap,
                                     converged=False, iterations=it,
                                     errors=errs)
        atoms.append(p_new)
        cols.append(lmap(p_new))
        weights = _simplex_weights(np.column_stack(cols), targets)
        live = weights > 1e-14
        if not live.all():
            atoms = [a for a, keep in zip(atoms, live) if keep]
            cols = [c for c, keep in zip(cols, live) if keep]
            weights = weights[live]
            weights = weights / weights.sum()
    t_cur = _combine(atoms, weights)
    errs = lmap(t_cur) - targets
    return FeasibilityResult(t=t_cur, residual=float(np.linalg.norm(errs)),
                             gap=gap, converged=False, iterations=it,
                             errors=errs)


def _combine(atoms: list, weights: np.ndarray) -> np.ndarray:
    t = np.zeros_like(atoms[0])
    for w, a in zip(weights, atoms):
        t = t + w * a
    return herm(t)


def _constraint_rows(maps: list, rhs: list, real_only: bool) -> tuple:
    """Complex trace equations tr(T K_j) = y_j as real Hermitian rows."""
    hs, ys = [], []
    for kmat, y in zip(maps, rhs):
        hs.append(herm(kmat))
        ys.append(float(np.real(y)))
        if not real_only:
            hs.append(herm(-1j * kmat))
            ys.append(float(np.imag(y)))
    return hs, np.asarray(ys)


def _hermitian_basis(d: int) -> list:
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    inv = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = inv
            e[j, i] = inv
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1j * inv
            e[j, i] = -1j * inv
            basis.append(e)
    return basis


def _pencil_crossings(diag_vals: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Positive step sizes where an eigenvalue of diag + a*direction hits 0 or 1."""
    d = diag_vals.size
    cands = []
    for shift in (0.0, 1.0):
        lhs = np.diag(diag_vals - shift)
        vals = scipy.linalg.eigvals(lhs, -direction)
        for v in vals:
            if np.isfinite(v) and abs(v.imag) <= 1e-8 * (1 + abs(v.real)):
                a = float(v.real)
                if a > 1e-13:
                    cands.append(a)
    return np.asarray(sorted(cands))


def _purify_coefficient(t: np.ndarray, hs: list, q: int,
                        tol: float) -> np.ndarray:
    """Walk a feasible coefficient to a rank-q projector preserving all
    trace constraints.

    The constraints are few (trace plus at most two), so whenever two or more
    eigenvalues are strictly interior there is a constraint-neutral Hermitian
    direction supported on that eigenspace; stepping to the first 0/1 crossing
    strictly shrinks the interior count, and integrality of the trace rules
    out stopping with exactly one interior eigenvalue.
    """
    d = t.shape[0]
    t = herm(t)
    full_h = [np.eye(d, dtype=complex)] + [herm(h) for h in hs]
    for _ in range(4 * d * d + 8):
        w, vec = np.linalg.eigh(t)
        w = np.clip(w, 0.0, 1.0)
        near0 = w <= 1e-11
        near1 = w >= 1.0 - 1e-11
        w[near0] = 0.0
        w[near1] = 1.0
        interior = ~(near0 | near1)
        n_int = int(interior.sum())
        if n_int == 0:
            break
        if n_int == 1:
            # numerically impossible at an exact extreme point; round it
            w[interior] = np.round(w[interior])
            t = (vec * w) @ vec.conj().T
            break
        vi = vec[:, interior]
        wi = w[interior]
        basis = _hermitian_basis(n_int)
        rows = []
        for h in full_h:
            hc = vi.conj().T @ h @ vi
            rows.append([float(np.real(np.trace(b @ hc))) for b in basis])
        mat = np.asarray(rows)
        _, sv, vh = np.linalg.svd(mat)
        null_dim = n_int * n_int - mat.shape[0]
        if null_dim <= 0:
            break
        coeffs = vh[-1]
        direction = np.zeros((n_int, n_int), dtype=complex)
        for c, b in zip(coeffs, basis):
            direction += c * b
        direction = herm(direction)
        nrm = float(np.linalg.norm(direction))
        if nrm < 1e-14:
            break
        direction /= nrm
        steps = _pencil_crossings(wi, direction)
        if steps.size == 0:
            steps = _pencil_crossings(wi, -direction)
            if steps.size == 0:
                break
            direction = -direction
        a = float(steps[0])
        t_int = np.diag(wi) + a * direction
        t = (vec[:, ~interior] * w[~interior]) @ vec[:, ~interior].conj().T
        t = t + vi @ t_int @ vi.conj().T
        t = herm(t)
    w, vec = np.linalg.eigh(t)
    picked = np.flatnonzero(w > 0.5)
    if picked.size != q:
        raise WitnessSearchFailed(
            f"purification left {picked.size} unit eigenvalues, expected {q}",
            residual=float(np.abs(w - np.round(w)).max()),
        )
    cols = vec[:, picked]
    return cols @ cols.conj().T


# ---------------------------------------------------------------------------
# verdict banding


def _band(margin: float, scale: float, tol: Tolerances) -> Verdict:
    if margin >= -tol.decide * scale:
        return Verdict.ORTHOGONAL
    if margin < -tol.strict * scale:
        return Verdict.NOT_ORTHOGONAL
    return Verdict.BOUNDARY


def _banded_verdict(value: float, lower: float, scale: float,
                    tol: Tolerances) -> Verdict:
    v1 = _band(value, scale, tol)
    v2 = _band(lower, scale, tol)
    return v1 if v1 == v2 else Verdict.BOUNDARY


def _tol_or_default(tol: Tolerances | None) -> Tolerances:
    return Tolerances() if tol is None else tol


def _frame_for(a: np.ndarray, k: int, tol: Tolerances) -> SubdifferentialFrame:
    return build_frame(a, k, cluster_tol=tol.cluster, rank_tol=tol.rank)


# ---------------------------------------------------------------------------
# pair orthogonality


def check_pair(a, b, k: int, field: str = COMPLEX_FIELD,
               tol: Tolerances | None = None,
               want_certificate: bool = True) -> Decision:
    """Decide whether ||A + c*B||_(k) >= ||A||_(k) for all scalars c.

    field "complex" sweeps the support function of the pairing set over all
    phases with a certified Lipschitz bound; field "real" only inspects the
    two real directions. The margin is the smallest one-sided derivative of
    the norm along rotated copies of B (nonnegative iff orthogonal).
    """
    tol = _tol_or_default(tol)
    a = as_matrix(a)
    b = as_matrix(b)
    require_square(a)
    if b.shape != a.shape:
        raise ShapeMismatch(f"direction shape {b.shape} != {a.shape}")
    require_k(k, a.shape[0])
    if field not in (COMPLEX_FIELD, REAL_FIELD):
        raise ValueError(f"unknown scalar field {field!r}")
    frame = _frame_for(a, k, tol)
    norm_a = frame.norm_value
    norm_b = ky_fan_norm(b, k)
    scale = tol.margin_scale(norm_a, norm_b)
    model = _range_model(frame, b)
    if field == REAL_FIELD:
        two = model.support(np.array([0.0, np.pi]))
        i = int(np.argmin(two))
        outcome = SweepOutcome(theta=float([0.0, np.pi][i]), value=float(two[i]),
                               lower=float(two[i]), evals=2)
    else:
        outcome = model.minimum(tol_abs=1e-3 * tol.decide * scale)
    verdict = _banded_verdict(outcome.value, outcome.lower, scale, tol)
    details = {
        "field": field,
        "norm_a": norm_a,
        "norm_b": norm_b,
        "boundary_value": float(frame.svd.s[k - 1]),
        "q": frame.part.q,
        "r": frame.part.r,
        "degenerate_zero": frame.degenerate_zero,
        "cluster_tol": frame.part.cluster_tol,
        "sweep_evals": outcome.evals,
        "margin_lower_bound": outcome.lower,
        "support_theta": outcome.theta,
    }
    decision = Decision(verdict=verdict, margin=outcome.value, scale=scale,
                        method="support-sweep", tolerances=tol, details=details)
    if want_certificate:
        _attach_pair_certificate(decision, a, b, k, frame, model, outcome,
                                 field, tol)
    return decision


def check_pair_blocks(a, b, k: int, tol: Tolerances | None = None,
                      want_certificate: bool = True) -> Decision:
    """Decide pair orthogonality through the boundary-block criterion.

    Partitions the rotated direction around the cluster of s_k: with the
    leading trace z1 and boundary block C, orthogonality holds iff -z1 lies
    in {tr(T C)} over the trace-q coefficient polytope (positive boundary
    value), or iff |z1| is at most the top-q singular sum of the widened
    block (boundary value zero). Must agree with check_pair everywhere.
    """
    tol = _tol_or_default(tol)
    a = as_matrix(a)
    b = as_matrix(b)
    require_square(a)
    if b.shape != a.shape:
        raise ShapeMismatch(f"direction shape {b.shape} != {a.shape}")
    require_k(k, a.shape[0])
    frame = _frame_for(a, k, tol)
    norm_a = frame.norm_value
    norm_b = ky_fan_norm(b, k)
    scale = tol.margin_scale(norm_a, norm_b)
    i1, i2 = frame.part.boundary
    rotated = frame.svd.u.conj().T @ b @ frame.svd.v
    lead = complex(np.trace(rotated[:i1, :i1]))
    q = frame.part.q
    if frame.degenerate_zero:
        stacked = rotated[i1:, i1:i2]
        bound = top_q_singsum(stacked, q)
        margin = bound - abs(lead)
        outcome = SweepOutcome(theta=0.0, value=margin, lower=margin, evals=0)
        model = None
    else:
        block = rotated[i1:i2, i1:i2]
        model = RangeSetModel(fixed_part=lead, compression=block, m=q)
        outcome = model.minimum(tol_abs=1e-3 * tol.decide * scale)
        margin = outcome.value
    verdict = _banded_verdict(margin, outcome.lower, scale, tol)
    details = {
        "norm_a": norm_a,
        "norm_b": norm_b,
        "leading_trace": lead,
        "q": q,
        "r": frame.part.r,
        "degenerate_zero": frame.degenerate_zero,
        "margin_lower_bound": outcome.lower,
    }
    decision = Decision(verdict=verdict, margin=margin, scale=scale,
                        method="block-criterion", tolerances=tol,
                        details=details)
    if want_certificate:
        if verdict is Verdict.ORTHOGONAL:
            try:
                decision.certificate = find_witness_block(
                    a, b, k, tol=tol, frame=frame, decision=decision)
            except (WitnessSearchFailed, NoConvergence) as exc:
                decision.details["certificate_error"] = str(exc)
        elif verdict is Verdict.NOT_ORTHOGONAL:
            decision.certificate = _violation_certificate(
                a, b, k, frame, outcome, scale, tol)
            if decision.certificate is None:
                decision.details["violation_too_shallow"] = True
    return decision


def _attach_pair_certificate(decision: Decision, a, b, k, frame, model,
                             outcome, field, tol) -> None:
    if decision.verdict is Verdict.ORTHOGONAL:
        try:
            if frame.degenerate_zero:
                decision.certificate = find_witness_block(
                    a, b, k, tol=tol, frame=frame, decision=decision)
            else:
                decision.certificate = find_witness_system(
                    a, b, k, tol=tol, frame=frame,
                    decision=decision, field=field)
        except (WitnessSearchFailed, NoConvergence) as exc:
            decision.details["witness_error"] = str(exc)
            try:
                decision.certificate = find_witness_block(
                    a, b, k, tol=tol, frame=frame, decision=decision)
            except (WitnessSearchFailed, NoConvergence, DegenerateRank) as exc2:
                decision.details["certificate_error"] = str(exc2)
    elif decision.verdict is Verdict.NOT_ORTHOGONAL:
        decision.certificate = _violation_certificate(
            a, b, k, frame, outcome, decision.scale, tol,
            real_field=field == REAL_FIELD)
        if decision.certificate is None:
            decision.details["violation_too_shallow"] = True


def _violation_certificate(a, b, k, frame, outcome, scale, tol,
                           real_field: bool = False) -> Certificate | None:
    """Search the steepest rotated ray for a scalar that shrinks the norm."""
    norm_a = frame.norm_value
    norm_b = ky_fan_norm(b, k)
    if norm_b <= 0:
        return None
    # support angle theta corresponds to the ray c = t * e^{-i theta}
    phase = cmath.exp(-1j * outcome.theta)
    if real_field:
        phase = -1.0 if abs(cmath.phase(phase)) > np.pi / 2 else 1.0
    t_hi = 2.0 * norm_a / norm_b + 1e-12

    def f(t):
        return ky_fan_norm(a + (t * phase) * b, k)

    res = scipy.optimize.minimize_scalar(
        f, bounds=(0.0, t_hi), method="bounded",
        options={"xatol": 1e-12 * t_hi, "maxiter": 200})
    t_star = float(res.x)
    value = float(res.fun)
    ts = np.geomspace(1e-6, 1.0, 25) * t_hi
    vals = ky_fan_norm_batch(a[None, :, :] + ts[:, None, None] * (phase * b), k)
    j = int(np.argmin(vals))
    if vals[j] < value:
        value = float(vals[j])
        t_star = float(ts[j])
    needed = norm_a - 10.0 * tol.decide * scale
    if value >= needed:
        return None
    lam = t_star * phase
    return Certificate(
        kind=CertKind.VIOLATION,
        coefficient=complex(lam),
        norm_value=value,
        details={"norm_a": norm_a, "dip": norm_a - value},
    )


# ---------------------------------------------------------------------------
# witness construction


def find_witness_system(a, b, k: int, tol: Tolerances | None = None,
                        frame: SubdifferentialFrame | None = None,
                        decision: Decision | None = None,
                        field: str = COMPLEX_FIELD) -> Certificate:
    """Construct k orthonormal eigenvectors of |A| whose compression sum of
    the polar-rotated direction vanishes.

    The leading clusters contribute their forced trace; the boundary cluster
    must contribute the negated remainder, a point of the q-trace numerical
    range of the boundary compression. The point is reached by convex
    feasibility over mixed coefficients and then purified to a rank-q
    projector, whose column space supplies the boundary witness vectors.
    """
    tol = _tol_or_default(tol)
    a = as_matrix(a)
    b = as_matrix(b)
    if frame is None:
        frame = _frame_for(a, k, tol)
    if frame.degenerate_zero:
        raise DegenerateRank(
            "witness systems are only certified when s_k is positive")
    model = _range_model(frame, b)
    norm_b = ky_fan_norm(b, k)
    scale = tol.margin_scale(frame.norm_value, norm_b)
    if decision is None:
        outcome = model.minimum(tol_abs=1e-3 * tol.decide * scale)
        if _band(outcome.value, scale, tol) is not Verdict.ORTHOGONAL:
            raise NotOrthogonal(
                f"margin {outcome.value:.3e} rejects a zero-sum witness")
    q = frame.part.q
    d = model.width
    target = -complex(model.fixed_part)
    real_only = field == REAL_FIELD
    cert_tol = tol.cert * max(scale, 1.0)
    if d == q:
        proj = np.eye(d, dtype=complex)
        resid = _target_residual(model.compression, proj, target, real_only)
        if resid > 10.0 * cert_tol:
            raise WitnessSearchFailed(
                "forced boundary coefficient misses the target",
                residual=resid)
    else:
        maps = [model.compression]
        rhs = [target]
        hs, ys = _constraint_rows(maps, rhs, real_only)
        result = _feasible_coefficient(hs, ys, q, d, tol=0.25 * cert_tol)
        if not result.converged and result.residual > 0.5 * cert_tol:
            raise WitnessSearchFailed(
                "boundary coefficient search stalled",
                residual=result.residual)
        proj = _purify_coefficient(result.t, hs, q, tol=cert_tol)
        resid = _target_residual(model.compression, proj, target, real_only)
        if resid > 10.0 * cert_tol:
            raise WitnessSearchFailed(
                "purified coefficient drifted off the target", residual=resid)
    w, vec = np.linalg.eigh(herm(proj))
    cols = vec[:, np.flatnonzero(w > 0.5)]
    vectors = np.hstack([frame.v1, frame.v2 @ cols])
    pairing = _witness_pairing(a, b, vectors, frame)
    return Certificate(
        kind=CertKind.WITNESS_SYSTEM,
        vectors=vectors,
        details={
            "purpose": "real" if real_only else "orthogonal",
            "field": field,
            "pairing_re": float(np.real(pairing)),
            "pairing_im": float(np.imag(pairing)),
            "construction_residual": resid,
            "singular_values": [float(s) for s in frame.svd.s[:k]],
        },
    )


def _target_residual(compression, proj, target, real_only) -> float:
    z = complex(np.trace(proj @ compression))
    if real_only:
        return abs(z.real - target.real)
    return abs(z - target)


def _witness_pairing(a, b, vectors, frame) -> complex:
    rotated = frame.svd.polar_u.conj().T @ b
    return complex(np.einsum("ij,jl,li->", vectors.conj().T, rotated, vectors))


def find_witness_block(a, b, k: int, tol: Tolerances | None = None,
                       frame: SubdifferentialFrame | None = None,
                       decision: Decision | None = None) -> Certificate:
    """Solve the boundary-block trace equation and assemble the dual matrix.

    Positive boundary value: Hermitian coefficient in the trace-q polytope
    with leading trace plus tr(T C) equal to zero. Zero boundary value:
    rectangular contraction on the widened tail with singular values summing
    to at most q, built in closed form by phase-aligned waterfilling on the
    singular values of the widened block.
    """
    tol = _tol_or_default(tol)
    a = as_matrix(a)
    b = as_matrix(b)
    if frame is None:
        frame = _frame_for(a, k, tol)
    model = _range_model(frame, b)
    norm_b = ky_fan_norm(b, k)
    scale = tol.margin_scale(frame.norm_value, norm_b)
    if decision is None:
        outcome = model.minimum(tol_abs=1e-3 * tol.decide * scale)
        if _band(outcome.value, scale, tol) is not Verdict.ORTHOGONAL:
            raise NotOrthogonal(
                f"margin {outcome.value:.3e} rejects a feasible coefficient")
    q = frame.part.q
    cert_tol = tol.cert * max(scale, 1.0)
    lead = complex(model.fixed_part)
    if frame.degenerate_zero:
        wide = model.wide_compression
        coeff = _waterfill_contraction(wide, q, -lead, 0.05 * tol.strict * scale)
        g = frame.u1 @ frame.v1.conj().T + frame.u2_wide @ coeff @ frame.v2.conj().T
        resid = abs(lead + complex(np.trace(coeff.conj().T @ wide)))
        kind_details = {"set": "general", "rows": wide.shape[0],
                        "cols": wide.shape[1]}
    else:
        d = model.width
        if d == q:
            coeff = np.eye(d, dtype=complex)
            resid = abs(lead + complex(np.trace(model.compression)))
            if resid > 10.0 * cert_tol:
                raise WitnessSearchFailed(
                    "forced boundary coefficient misses the target",
                    residual=resid)
        else:
            hs, ys = _constraint_rows([model.compression], [-lead], False)
            result = _feasible_coefficient(hs, ys, q, d, tol=0.25 * cert_tol)
            if not result.converged and result.residual > 0.5 * cert_tol:
                raise NoConvergence(
                    f"coefficient search stalled at residual {result.residual:.3e}")
            coeff = result.t
            resid = abs(lead + complex(np.trace(coeff @ model.compression)))
        g = frame.u1 @ frame.v1.conj().T + frame.u2 @ coeff @ frame.v2.conj().T
        kind_details = {"set": "psd", "rows": coeff.shape[0],
                        "cols": coeff.shape[1]}
    return Certificate(
        kind=CertKind.BLOCK_COEFFICIENT,
        block_matrix=coeff,
        subgradient=g,
        details={
            "block_residual": resid,
            "trace_budget": q,
            **kind_details,
        },
    )


def _waterfill_contraction(wide: np.ndarray, q: int, target: complex,
                           tol: float) -> np.ndarray:
    """Contraction T with singular sum <= q and tr(T* M) = target, assuming
    |target| is at most the top-q singular sum of M."""
    rows, cols = wide.shape
    t = np.zeros((rows, cols), dtype=complex)
    budget = abs(target)
    if budget <= tol * 1e-3:
        return t
    u, s, vh = np.linalg.svd(wide)
    remaining = budget
    weights = []
    for i in range(min(q, s.size)):
        if s[i] <= 0 or remaining <= 0:
            weights.append(0.0)
            continue
        w = min(1.0, remaining / s[i])
        weights.append(w)
        remaining -= w * s[i]
    if remaining > tol:
        raise NoConvergence(
            f"waterfilling budget overflow by {remaining:.3e}; "
            "target outside the attainable disk")
    # tr(T* M) = conj(psi) * sum(w_i s_i), so align psi against the target
    psi = cmath.exp(-1j * cmath.phase(target)) if target != 0 else 1.0
    for i, w in enumerate(weights):
        if w > 0:
            t += (w * psi) * np.outer(u[:, i], vh[i, :])
    return t


# ---------------------------------------------------------------------------
# subspace orthogonality


def _orthonormalize_basis(mats: list, shape: tuple) -> list:
    out = []
    for raw in mats:
        w = as_matrix(raw)
        if w.shape != shape:
            raise ShapeMismatch(f"basis shape {w.shape} != {shape}")
        w = w.copy()
        for _ in range(2):
            for o in out:
                w = w - np.trace(o.conj().T @ w) * o
        nrm = float(np.linalg.norm(w))
        if nrm > 1e-12:
            out.append(w / nrm)
    return out


def check_subspace(a, basis, k: int, tol: Tolerances | None = None,
                   want_certificate: bool = True) -> Decision:
    """Decide orthogonality of A to the span of the basis matrices.

    Orthogonality to the whole span is equivalent to one dual matrix
    annihilating every basis direction at once; the search runs over the
    boundary coefficient polytope. Infeasibility yields a residual vector
    whose basis combination is a concrete counterexample direction, confirmed
    by a pair check before a negative verdict is issued. With a zero boundary
    value only the sufficient direction is certified.
    """
    tol = _tol_or_default(tol)
    a = as_matrix(a)
    require_square(a)
    require_k(k, a.shape[0])
    basis = [as_matrix(w) for w in basis]
    frame = _frame_for(a, k, tol)
    norm_a = frame.norm_value
    ortho = _orthonormalize_basis(basis, a.shape)
    if not ortho:
        decision = Decision(
            verdict=Verdict.ORTHOGONAL, margin=0.0,
            scale=tol.margin_scale(norm_a, 0.0), method="subspace-feasibility",
            tolerances=tol, details={"basis_rank": 0, "trivial": True})
        if want_certificate:
            decision.certificate = _density_certificate(
                frame, [], np.eye(frame.part.q + frame.part.r, dtype=complex)
                * (frame.part.q / max(frame.part.q + frame.part.r, 1)), tol)
        return decision
    norms_w = [ky_fan_norm(w, k) for w in ortho]
    scale = tol.margin_scale(norm_a, max(norms_w))
    q = frame.part.q
    i1, i2 = frame.part.boundary
    polar = frame.svd.polar_u
    lead_proj = frame.v1 @ frame.v1.conj().T
    v2 = frame.svd.v[:, i1:i2]
    offsets = []
    maps = []
    for w in ortho:
        offsets.append(complex(np.trace(w.conj().T @ polar @ lead_proj)))
        maps.append(v2.conj().T @ w.conj().T @ polar @ v2)
    rhs = [-z for z in offsets]
    hs, ys = _constraint_rows(maps, rhs, real_only=False)
    d = i2 - i1
    feas_tol = 0.5 * tol.decide * scale
    result = _feasible_coefficient(hs, ys, q, d, tol=0.25 * feas_tol,
                                   max_iter=800)
    resid = result.residual
    lower = float(np.sqrt(max(resid * resid - max(result.gap, 0.0), 0.0)))
    margin = -resid
    details = {
        "basis_rank": len(ortho),
        "feasibility_residual": resid,
        "residual_lower_bound": lower,
        "iterations": result.iterations,
        "degenerate_zero": frame.degenerate_zero,
        "q": q,
        "r": frame.part.r,
    }
    decision = Decision(verdict=Verdict.BOUNDARY, margin=margin, scale=scale,
                        method="subspace-feasibility", tolerances=tol,
                        details=details)
    if resid <= tol.decide * scale:
        decision.verdict = Verdict.ORTHOGONAL
        if want_certificate:
            decision.certificate = _density_certificate(frame, ortho,
                                                        result.t, tol)
        return decision
    if frame.degenerate_zero:
        # only the sufficient direction is available at zero boundary value
        decision.details["converse_unavailable"] = True
        return decision
    if lower > 4.0 * tol.strict * scale:
        zeta = _complex_errors(result.errors)
        combo = sum(z * w for z, w in zip(zeta, ortho))
        combo_norm = float(np.linalg.norm(combo))
        if combo_norm > 0:
            witness_dir = combo / combo_norm
            pair = check_pair(a, witness_dir, k, tol=tol,
                              want_certificate=want_certificate)
            details["counterexample_coefficients"] = [complex(z) for z in zeta]
            details["counterexample_pair_margin"] = pair.margin
            if pair.verdict is Verdict.NOT_ORTHOGONAL:
                decision.verdict = Verdict.NOT_ORTHOGONAL
                if want_certificate and pair.certificate is not None:
                    cert = pair.certificate
                    cert.details["combination"] = _raw_combination(
                        basis, witness_dir)
                    decision.certificate = cert
                return decision
    return decision


def _raw_combination(basis, direction: np.ndarray) -> list:
    """Coefficients over the caller's basis reproducing an in-span matrix."""
    raw = [as_matrix(w) for w in basis]
    stack = np.stack([w.ravel() for w in raw], axis=1)
    coeffs, *_ = np.linalg.lstsq(stack, direction.ravel(), rcond=None)
    return [[float(c.real), float(c.imag)] for c in coeffs]


def _complex_errors(errors: np.ndarray) -> np.ndarray:
    pairs = errors.reshape(-1, 2)
    return pairs[:, 0] + 1j * pairs[:, 1]


def _density_certificate(frame: SubdifferentialFrame, ortho: list,
                         coefficient: np.ndarray, tol: Tolerances) -> Certificate:
    k = frame.part.k
    i1, i2 = frame.part.boundary
    v = frame.svd.v
    boundary_q = frame.part.q
    densities = []
    for value, (start, stop) in frame.part.clusters:
        if start >= i2:
            break
        cols = v[:, start:stop]
        if stop <= i1:
            share = (cols @ cols.conj().T) / (stop - start)
            copies = stop - start
        else:
            share = (cols @ coefficient @ cols.conj().T) / boundary_q
            copies = boundary_q
        densities.extend(share.copy() for _ in range(copies))
    total = sum(densities) if densities else np.zeros_like(frame.svd.u)
    rotated = frame.svd.polar_u @ total
    pairings = [complex(np.trace(w.conj().T @ rotated)) for w in ortho]
    return Certificate(
        kind=CertKind.DENSITY_SYSTEM,
        densities=densities,
        details={
            "pairings": [[z.real, z.imag] for z in pairings],
            "combined_norm": float(top_q_singsum(total, 1)),
            "singular_values": [float(s) for s in frame.svd.s[:k]],
        },
    )


def extract_density(q_matrix, frame: SubdifferentialFrame,
                    tol: float = 1e-8) -> Certificate:
    """Split a feasible dual source into per-index density matrices.

    The input must be PSD, block diagonal across the singular clusters of A,
    with each fully included cluster carrying its full projector and the
    boundary cluster carrying trace q. Each index then receives its cluster
    block divided by the cluster's index count among 1..k.
    """
    q_full = as_matrix(q_matrix)
    k = frame.part.k
    i1, i2 = frame.part.boundary
    v = frame.svd.v
    blocks = []
    counts = []
    for value, (start, stop) in frame.part.clusters:
        if start >= i2:
            break
        cols = v[:, start:stop]
        comp = cols.conj().T @ q_full @ cols
        recon = cols @ comp @ cols.conj().T
        blocks.append((start, stop, comp, cols))
        counts.append(stop - start if stop <= i1 else frame.part.q)
    recon_total = sum(c @ b @ c.conj().T for (_, _, b, c) in blocks)
    leak = float(np.abs(q_full - recon_total).max())
    if leak > tol:
        raise BadBlockStructure(
            f"source leaks {leak:.3e} outside the cluster blocks")
    densities = []
    for (start, stop, comp, cols), count in zip(blocks, counts):
        share = cols @ comp @ cols.conj().T / count
        trace_err = abs(float(np.real(np.trace(comp))) - count)
        if trace_err > tol * max(count, 1):
            raise BadBlockStructure(
                f"cluster at index {start} carries trace off by {trace_err:.3e}")
        if stop <= i1:
            dev = float(np.abs(comp - np.eye(stop - start)).max())
            if dev > tol:
                raise BadBlockStructure(
                    f"included cluster at index {start} is not a full "
                    f"projector (deviation {dev:.3e})")
        upto = min(stop, k)
        for _ in range(start, upto):
            densities.append(share.copy())
    return Certificate(kind=CertKind.DENSITY_SYSTEM, densities=densities,
                       details={"leak": leak})


# ---------------------------------------------------------------------------
# parallelism


def check_parallel(a, b, k: int, tol: Tolerances | None = None,
                   want_certificate: bool = True) -> Decision:
    """Decide whether ||A + c*B||_(k) = ||A||_(k) + ||B||_(k) for some
    unimodular c.

    Equality at some phase is equivalent to the pairing set reaching modulus
    ||B||_(k); the peak modulus is read from the support-function sweep and
    the maximizing phase supplies the equality scalar.
    """
    tol = _tol_or_default(tol)
    a = as_matrix(a)
    b = as_matrix(b)
    require_square(a)
    if b.shape != a.shape:
        raise ShapeMismatch(f"direction shape {b.shape} != {a.shape}")
    require_k(k, a.shape[0])
    frame = _frame_for(a, k, tol)
    if frame.degenerate_zero:
        raise DegenerateRank(
            "parallelism is only characterized when s_k is positive")
    norm_a = frame.norm_value
    norm_b = ky_fan_norm(b, k)
    scale = tol.margin_scale(norm_a, norm_b)
    model = _range_model(frame, b)
    outcome = model.maximum(tol_abs=1e-3 * tol.decide * scale)
    margin = outcome.value - norm_b
    margin_ub = outcome.lower - norm_b
    v1 = _parallel_band(margin, scale, tol)
    v2 = _parallel_band(margin_ub, scale, tol)
    verdict = v1 if v1 == v2 else Verdict.BOUNDARY
    lam = cmath.exp(-1j * outcome.theta)
    achieved = ky_fan_norm(a + lam * b, k)
    details = {
        "peak_modulus": outcome.value,
        "norm_a": norm_a,
        "norm_b": norm_b,
        "lambda_re": lam.real,
        "lambda_im": lam.imag,
        "achieved_norm": achieved,
        "triangle_bound": norm_a + norm_b,
    }
    decision = Decision(verdict=verdict, margin=margin, scale=scale,
                        method="parallel-sweep", tolerances=tol,
                        details=details)
    if verdict is Verdict.PARALLEL and want_certificate:
        ph = cmath.exp(-1j * outcome.theta)
        hsym = herm(ph * model.compression)
        _, proj = top_q_eigsum(hsym, frame.part.q)
        w, vec = np.linalg.eigh(herm(proj))
        cols = vec[:, np.flatnonzero(w > 0.5)]
        vectors = np.hstack([frame.v1, frame.v2 @ cols])
        pairing = _witness_pairing(a, b, vectors, frame)
        decision.certificate = Certificate(
            kind=CertKind.WITNESS_SYSTEM,
            vectors=vectors,
            details={
                "purpose": "parallel",
                "pairing_re": pairing.real,
                "pairing_im": pairing.imag,
                "target_modulus": norm_b,
                "lambda_re": lam.real,
                "lambda_im": lam.imag,
            },
        )
    return decision


def _parallel_band(margin: float, scale: float, tol: Tolerances) -> Verdict:
    if margin >= -tol.decide * scale:
        return Verdict.PARALLEL
    if margin < -tol.strict * scale:
        return Verdict.NOT_PARALLEL
    return Verdict.BOUNDARY


# ---------------------------------------------------------------------------
# certificate verification


def verify_certificate(cert: Certificate, a, second, k: int,
                       tol: Tolerances | None = None) -> dict:
    """Independently re-check every clause of a certificate.

    ``second`` is the direction matrix for pair certificates and the list of
    basis matrices for subspace certificates. Returns a report dict with one
    entry per clause and an overall ``ok`` flag; never raises on a bad
    certificate.
    """
    tol = _tol_or_default(tol)
    a = as_matrix(a)
    checks = []

    def add(name, value, bound):
        checks.append({"name": name, "value": float(value),
                       "bound": float(bound), "pass": bool(value <= bound)})

    try:
        if cert.kind is CertKind.WITNESS_SYSTEM:
            _verify_witness(cert, a, as_matrix(second), k, tol, add)
        elif cert.kind is CertKind.BLOCK_COEFFICIENT:
            _verify_block(cert, a, as_matrix(second), k, tol, add)
        elif cert.kind is CertKind.SUBGRADIENT:
            _verify_subgradient(cert.subgradient, a, as_matrix(second), k,
                                tol, add)
        elif cert.kind is CertKind.VIOLATION:
            _verify_violation(cert, a, second, k, tol, add)
        elif cert.kind is CertKind.DENSITY_SYSTEM:
            _verify_density(cert, a, second, k, tol, add)
        else:
            checks.append({"name": "known_kind", "value": 1.0, "bound": 0.0,
                           "pass": False})
    except Exception as exc:  # verification must always produce a report
        checks.append({"name": "exception", "value": 1.0, "bound": 0.0,
                       "pass": False, "error": f"{type(exc).__name__}: {exc}"})
    return {"kind": cert.kind.value, "checks": checks,
            "ok": all(c["pass"] for c in checks)}


def _verify_witness(cert, a, b, k, tol, add):
    frame = _frame_for(a, k, tol)
    scale = tol.margin_scale(frame.norm_value, ky_fan_norm(b, k))
    vectors = as_matrix(cert.vectors)
    if vectors.shape != (a.shape[0], k):
        add("vector_shape", 1.0, 0.0)
        return
    gram = vectors.conj().T @ vectors
    add("orthonormality", float(np.abs(gram - np.eye(k)).max()),
        10.0 * tol.cert)
    abs_a = frame.svd.abs_a
    s = frame.svd.s
    s1 = float(s[0]) if s.size else 0.0
    eig_bound = (10.0 * frame.part.cluster_tol + 100.0 * tol.resid) * (1.0 + s1)
    for i in range(k):
        r = float(np.linalg.norm(abs_a @ vectors[:, i] - s[i] * vectors[:, i]))
        add(f"eigen_residual_{i}", r, eig_bound)
    pairing = _witness_pairing(a, b, vectors, frame)
    purpose = cert.details.get("purpose", "orthogonal")
    if purpose == "parallel":
        target = ky_fan_norm(b, k)
        add("pairing_modulus", abs(abs(pairing) - target),
            0.1 * tol.strict * scale)
        lam = complex(cert.details.get("lambda_re", 1.0),
                      cert.details.get("lambda_im", 0.0))
        add("unimodular", abs(abs(lam) - 1.0), 1e-9)
        achieved = ky_fan_norm(a + lam * b, k)
        add("triangle_equality",
            abs(achieved - (frame.norm_value + target)),
            0.1 * tol.strict * scale)
    elif purpose == "real":
        add("pairing_real_part", abs(pairing.real), 0.1 * tol.strict * scale)
    else:
        add("pairing", abs(pairing), 0.1 * tol.strict * scale)


def _verify_block(cert, a, b, k, tol, add):
    frame = _frame_for(a, k, tol)
    scale = tol.margin_scale(frame.norm_value, ky_fan_norm(b, k))
    coeff = as_matrix(cert.block_matrix)
    desc = frame.descriptor()
    if coeff.shape != tuple(desc.dims):
        add("coefficient_shape", 1.0, 0.0)
        return
    add("coefficient_feasible", 0.0 if desc.contains(coeff, tol=10 * tol.cert)
        else 1.0, 0.5)
    model = _range_model(frame, b)
    block = model.wide_compression if frame.degenerate_zero else model.compression
    z = complex(model.fixed_part) + complex(
        np.trace(coeff.conj().T @ block))
    add("block_equation", abs(z), 0.1 * tol.strict * scale)
    if cert.subgradient is not None:
        _verify_subgradient(cert.subgradient, a, b, k, tol, add)


def _verify_subgradient(g, a, b, k, tol, add):
    g = as_matrix(g)
    s = np.linalg.svd(g, compute_uv=False)
    norm_a = ky_fan_norm(a, k)
    scale = tol.margin_scale(norm_a, ky_fan_norm(b, k))
    add("dual_operator_norm", float(s[0]) - 1.0 if s.size else 0.0,
        10.0 * tol.cert)
    add("dual_trace_norm", float(s.sum()) - k, 10.0 * tol.cert)
    pair_a = float(np.real(np.trace(g.conj().T @ a)))
    add("norming", norm_a - pair_a, 0.1 * tol.strict * max(norm_a, 1.0))
    add("direction_pairing", abs(complex(np.trace(g.conj().T @ b))),
        0.1 * tol.strict * scale)


def _materialize_direction(second, details):
    combo = details.get("combination")
    if combo is None:
        return as_matrix(second)
    basis = [as_matrix(w) for w in second]
    out = np.zeros_like(basis[0])
    for (re, im), w in zip(combo, basis):
        out = out + complex(re, im) * w
    return out


def _verify_violation(cert, a, second, k, tol, add):
    b = _materialize_direction(second, cert.details)
    norm_a = ky_fan_norm(a, k)
    scale = tol.margin_scale(norm_a, ky_fan_norm(b, k))
    lam = complex(cert.coefficient)
    value = ky_fan_norm(a + lam * b, k)
    add("claimed_norm_matches", abs(value - float(cert.norm_value)),
        tol.cert * scale)
    add("norm_decrease", value - (norm_a - 5.0 * tol.decide * scale), 0.0)


def _verify_density(cert, a, basis, k, tol, add):
    frame = _frame_for(a, k, tol)
    mats = [as_matrix(w) for w in basis]
    scale = tol.margin_scale(
        frame.norm_value, max([ky_fan_norm(w, k) for w in mats], default=0.0))
    densities = [as_matrix(p) for p in (cert.densities or [])]
    if len(densities) != k:
        add("density_count", 1.0, 0.0)
        return
    abs_a = frame.svd.abs_a
    s = frame.svd.s
    s1 = float(s[0]) if s.size else 0.0
    bound = tol.strict * (1.0 + s1)
    total = np.zeros_like(a)
    for i, p in enumerate(densities):
        w = np.linalg.eigvalsh(herm(p))
        add(f"psd_{i}", max(0.0, -float(w[0])), 10.0 * tol.cert)
        add(f"trace_one_{i}", abs(float(np.real(np.trace(p))) - 1.0),
            10.0 * tol.cert)
        add(f"eigen_support_{i}",
            float(np.abs(abs_a @ p - s[i] * p).max()), bound)
        total = total + p
    add("combined_operator_norm",
        float(np.linalg.svd(total, compute_uv=False)[0]) - 1.0,
        10.0 * tol.cert)
    rotated = frame.svd.polar_u @ total
    for j, w in enumerate(mats):
        add(f"basis_pairing_{j}",
            abs(complex(np.trace(w.conj().T @ rotated))), tol.strict * scale)
