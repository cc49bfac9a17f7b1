"""Dense complex linear-algebra primitives.

Everything downstream is built on four ingredients: Hermitian
eigendecompositions, singular value decompositions with their polar data,
single-linkage clustering of a descending spectrum, and the two Ky Fan style
partial sums (largest-eigenvalue total with its maximizing projector, and
largest-singular-value total).

Eigen and singular vectors are deterministic for identical input: columns are
phase-normalized so that the first significant component is real positive,
and degenerate clusters keep the backend's (deterministic) ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    KOutOfRange,
    NoConvergence,
    NonFinite,
    QOutOfRange,
    ShapeMismatch,
)

__all__ = [
    "EigenFrame",
    "SvdFrame",
    "SpectralPartition",
    "as_matrix",
    "herm",
    "hermitian_eig",
    "svd",
    "singular_values",
    "cluster_spectrum",
    "top_q_eigsum",
    "top_q_singsum",
    "fan_eigsum_batch",
    "default_cluster_tol",
    "default_rank_tol",
    "haar_unitary",
]


def as_matrix(a) -> np.ndarray:
    """Coerce input to a finite complex128 2-d array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise NonFinite("matrix entries must be finite")
    return m


def require_square(m: np.ndarray):
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")


def herm(m: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M*)/2."""
    return 0.5 * (m + m.conj().T)


def default_cluster_tol(s1: float) -> float:
    """Spectrum clustering width: well above eigensolver noise, user-overridable."""
    return 1e-8 * max(float(s1), 1.0)


def default_rank_tol(s1: float) -> float:
    """Threshold below which a singular value is treated as zero."""
    return 1e-12 * float(s1)


def _phase_normalize(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant entry is real positive."""
    v = np.array(vectors, copy=True)
    for j in range(v.shape[1]):
        col = v[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        i = int(np.argmax(mags > 1e-12 * top))
        ph = col[i] / mags[i]
        v[:, j] = col * np.conj(ph)
    return v


@dataclass
class EigenFrame:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    ``vectors[:, i]`` is the unit eigenvector for ``values[i]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def residual(self, h: np.ndarray) -> float:
        return float(np.abs(self.reconstruct() - h).max())

    def unitarity_defect(self) -> float:
        n = self.vectors.shape[0]
        return float(np.abs(self.vectors.conj().T @ self.vectors - np.eye(n)).max())


def hermitian_eig(h, herm_tol: float = 1e-8) -> EigenFrame:
    """Eigendecomposition of a Hermitian matrix with descending eigenvalues.

    The input is symmetrized as (H + H*)/2 before solving; asymmetry beyond
    ``herm_tol`` relative to the largest entry is rejected.
    """
    h = as_matrix(h)
    require_square(h)
    scale = max(float(np.abs(h).max()), 1.0)
    asym = float(np.abs(h - h.conj().T).max())
    if asym > herm_tol * scale:
        raise ShapeMismatch(f"matrix is not Hermitian: asymmetry {asym:.3e}")
    try:
        w, v = np.linalg.eigh(herm(h))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise NoConvergence(f"eigendecomposition failed: {exc}") from exc
    w = w[::-1]
    v = _phase_normalize(v[:, ::-1])
    return EigenFrame(values=np.real(w), vectors=v)


@dataclass
class SvdFrame:
    """Singular value decomposition A = U diag(S) V* of a square matrix.

    ``polar_u`` is the unitary polar factor U V* and ``abs_a`` the positive
    factor V diag(S) V*, so A = polar_u @ abs_a even when A is singular.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    @property
    def polar_u(self) -> np.ndarray:
        return self.u @ self.v.conj().T

    @property
    def abs_a(self) -> np.ndarray:
        return (self.v * self.s) @ self.v.conj().T

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.conj().T

    def residual(self, a: np.ndarray) -> float:
        return float(np.abs(self.reconstruct() - a).max())


def svd(a) -> SvdFrame:
    """SVD of a square matrix with joint phase normalization.

    Left and right singular vector pairs are rotated by a common phase keyed
    on the left vector, which leaves the reconstruction unchanged.
    """
    a = as_matrix(a)
    require_square(a)
    try:
        u, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise NoConvergence(f"svd failed: {exc}") from exc
    v = vh.conj().T
    for j in range(u.shape[1]):
        col = u[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        i = int(np.argmax(mags > 1e-12 * top))
        ph = np.conj(col[i] / mags[i])
        u[:, j] = col * ph
        v[:, j] = v[:, j] * ph
    return SvdFrame(u=u, s=np.real(s), v=v)


def singular_values(m) -> np.ndarray:
    """Singular values of a (possibly rectangular) matrix, descending."""
    m = as_matrix(m)
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(f"svd failed: {exc}") from exc


@dataclass
class SpectralPartition:
    """Single-linkage clustering of a descending spectrum around index k.

    ``clusters`` lists (mean value, (start, stop)) with half-open 0-based
    index ranges. ``q`` counts boundary-cluster members with index <= k and
    ``r`` those with index > k, so the cluster containing position k has
    exactly q + r members.
    """

    k: int
    clusters: list
    q: int
    r: int
    cluster_tol: float

    @property
    def boundary(self) -> tuple:
        """Index range (start, stop) of the cluster containing position k."""
        return (self.k - self.q, self.k + self.r)

    def cluster_of(self, index: int) -> int:
        for ci, (_, (start, stop)) in enumerate(self.clusters):
            if start <= index < stop:
                return ci
        raise IndexError(index)

    @property
    def boundary_width(self) -> float:
        start, stop = self.boundary
        return float(abs(self._values_span(start, stop)))

    def _values_span(self, start, stop) -> float:
        # width recorded at build time, stored on the cluster tuple
        for value, (s, t) in self.clusters:
            if (s, t) == (start, stop):
                return getattr(self, "_width", 0.0)
        return 0.0


def cluster_spectrum(values, k: int, cluster_tol: float) -> SpectralPartition:
    """Group a descending spectrum by single linkage at width ``cluster_tol``.

    Adjacent values closer than ``cluster_tol`` land in one cluster. The
    returned partition records how the cluster containing position k splits
    around k, which is what the decision formulas consume.
    """
    v = np.asarray(values, dtype=float).ravel()
    n = v.size
    if n == 0:
        raise ShapeMismatch("empty spectrum")
    if np.any(v[:-1] < v[1:] - 1e-12 * max(1.0, float(np.abs(v).max()))):
        raise ValueError("spectrum must be sorted descending")
    if not 1 <= k <= n:
        raise KOutOfRange(f"k={k} outside 1..{n}")
    if cluster_tol < 0:
        raise ValueError("cluster_tol must be nonnegative")
    gaps = v[:-1] - v[1:]
    cut = np.flatnonzero(gaps > cluster_tol) + 1
    starts = np.concatenate([[0], cut])
    stops = np.concatenate([cut, [n]])
    clusters = [(float(v[s:t].mean()), (int(s), int(t))) for s, t in zip(starts, stops)]
    part = None
    for _, (s, t) in clusters:
        if s <= k - 1 < t:
            part = SpectralPartition(
                k=k, clusters=clusters, q=k - s, r=t - k, cluster_tol=float(cluster_tol)
            )
            part._width = float(v[s] - v[t - 1])
            break
    assert part is not None
    return part


def top_q_eigsum(h, q: int):
    """Sum of the q largest eigenvalues of a Hermitian matrix.

    Returns ``(value, projector)`` where the rank-q orthogonal projector onto
    the top eigenvectors attains the maximum of tr(T H) over 0 <= T <= I with
    tr T = q (Fan's maximum principle). q = 0 yields (0, 0).
    """
    h = as_matrix(h)
    require_square(h)
    n = h.shape[0]
    if not 0 <= q <= n:
        raise QOutOfRange(f"q={q} outside 0..{n}")
    if q == 0:
        return 0.0, np.zeros_like(h)
    fr = hermitian_eig(h)
    w = fr.vectors[:, :q]
    return float(fr.values[:q].sum()), w @ w.conj().T


def top_q_singsum(m, q: int) -> float:
    """Sum of the q largest singular values of a rectangular matrix.

    Equals the maximum of Re tr(T* M) over contractions T with at most q
    unit singular values (von Neumann pairing). q = 0 yields 0.
    """
    m = as_matrix(m)
    bound = min(m.shape)
    if not 0 <= q <= bound:
        raise QOutOfRange(f"q={q} outside 0..{bound}")
    if q == 0 or m.size == 0:
        return 0.0
    return float(singular_values(m)[:q].sum())


def fan_eigsum_batch(hs: np.ndarray, q: int) -> np.ndarray:
    """Top-q eigenvalue sums for a stack of Hermitian matrices (m, d, d)."""
    if q == 0:
        return np.zeros(hs.shape[0])
    w = np.linalg.eigvalsh(hs)
    return w[:, -q:].sum(axis=1)


def haar_unitary(n: int, rng=None) -> np.ndarray:
    """Haar-distributed random unitary via phase-fixed QR of a Ginibre draw."""
    rng = np.random.default_rng(0) if rng is None else rng
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
