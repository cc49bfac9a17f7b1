"""Result types shared by the decision engine, the oracle, and the CLI."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Verdict", "CertKind", "Tolerances", "Certificate", "Decision",
           "COMPLEX_FIELD", "REAL_FIELD"]

COMPLEX_FIELD = "complex"
REAL_FIELD = "real"


class Verdict(str, enum.Enum):
    ORTHOGONAL = "ORTHOGONAL"
    NOT_ORTHOGONAL = "NOT_ORTHOGONAL"
    BOUNDARY = "BOUNDARY"
    # parallelism checks and the sampling falsifier reuse the report plumbing
    PARALLEL = "PARALLEL"
    NOT_PARALLEL = "NOT_PARALLEL"
    NO_COUNTEREXAMPLE = "NO_COUNTEREXAMPLE"


class CertKind(str, enum.Enum):
    WITNESS_SYSTEM = "WITNESS_SYSTEM"
    BLOCK_COEFFICIENT = "BLOCK_COEFFICIENT"
    SUBGRADIENT = "SUBGRADIENT"
    DENSITY_SYSTEM = "DENSITY_SYSTEM"
    VIOLATION = "VIOLATION"


@dataclass(frozen=True)
class Tolerances:
    """Decision bands and residual budgets.

    The margin scale for a pair (A, B) is ||A||_(k) + ||B||_(k); decide and
    strict are relative to it. Margins at or above -decide*scale read as
    orthogonal, margins below -strict*scale as not orthogonal, anything
    between is BOUNDARY. cert bounds certificate construction residuals,
    resid bounds factorization residuals, herm the tolerated asymmetry of
    Hermitian inputs. cluster/rank override the spectrum splitting defaults
    when set.
    """

    decide: float = 1e-7
    strict: float = 1e-6
    cert: float = 1e-8
    resid: float = 1e-10
    herm: float = 1e-8
    cluster: float | None = None
    rank: float | None = None

    def __post_init__(self):
        if not (0 < self.decide <= self.strict):
            raise ValueError("need 0 < decide <= strict")
        for name in ("cert", "resid", "herm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def margin_scale(self, norm_a: float, norm_b: float) -> float:
        return max(norm_a + norm_b, 1e-300)

    def as_dict(self) -> dict:
        return {
            "decide": self.decide,
            "strict": self.strict,
            "cert": self.cert,
            "resid": self.resid,
            "herm": self.herm,
            "cluster": self.cluster,
            "rank": self.rank,
        }


@dataclass
class Certificate:
    """Checkable evidence attached to a decision.

    kind WITNESS_SYSTEM: ``vectors`` holds k orthonormal columns, each an
    eigenvector of |A| for the matching descending singular value, whose
    compression sum of the polar-rotated direction hits the recorded target
    (0 for orthogonality, modulus ||B||_(k) for parallelism).
    kind BLOCK_COEFFICIENT: ``block_matrix`` solves the boundary-block trace
    equation in the basis of a spectral frame of A; ``subgradient`` is the
    assembled dual matrix built from it.
    kind SUBGRADIENT: ``subgradient`` alone, dual-feasible with zero pairing
    against the direction.
    kind DENSITY_SYSTEM: ``densities`` holds k PSD trace-one matrices, each
    supported in the matching eigenspace of |A|, with combined operator norm
    at most one, whose rotated sum annihilates every basis direction.
    kind VIOLATION: ``coefficient`` is a scalar with
    ||A + coefficient*B||_(k) = ``norm_value`` strictly below ||A||_(k).
    """

    kind: CertKind
    vectors: np.ndarray | None = None
    block_matrix: np.ndarray | None = None
    subgradient: np.ndarray | None = None
    coefficient: complex | None = None
    norm_value: float | None = None
    densities: list | None = None
    details: dict = field(default_factory=dict)


@dataclass
class Decision:
    """Outcome of a check: verdict, the margin it was read from, evidence."""

    verdict: Verdict
    margin: float
    scale: float
    method: str = ""
    tolerances: Tolerances | None = None
    certificate: Certificate | None = None
    details: dict = field(default_factory=dict)

    @property
    def is_orthogonal(self) -> bool:
        return self.verdict is Verdict.ORTHOGONAL

    def summary(self) -> str:
        parts = [
            f"verdict={self.verdict.value}",
            f"margin={self.margin:.6e}",
            f"scale={self.scale:.6e}",
        ]
        if self.method:
            parts.append(f"method={self.method}")
        if self.certificate is not None:
            parts.append(f"certificate={self.certificate.kind.value}")
        return " ".join(parts)
