"""Birkhoff-James orthogonality of complex matrices in Ky Fan k-norms.

The package decides whether one matrix is orthogonal to another (or to a
whole subspace) in the k-th Ky Fan norm, certifies each verdict with a
checkable witness, and ships an independent norm-evaluation referee for
cross-validation. See the README for the decision model and CLI usage.
"""

from .decide import (
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
from .errors import (
    BadBlockStructure,
    DegenerateRank,
    KOutOfRange,
    KyFanError,
    NoConvergence,
    NonFinite,
    NotOrthogonal,
    ParseError,
    QOutOfRange,
    ShapeMismatch,
    WitnessSearchFailed,
)
from .generate import (
    make_nonorthogonal_pair,
    make_nonparallel_pair,
    make_orthogonal_pair,
    make_parallel_pair,
    make_singular_pair,
    make_subspace_instance,
    random_matrix,
    tied_spectrum,
)
from .io import (
    Problem,
    Report,
    decode_problem,
    decode_report,
    encode_problem,
    encode_report,
    load_problem,
    load_report,
    save_problem,
    save_report,
)
from .linalg import (
    cluster_spectrum,
    fan_eigsum_batch,
    haar_unitary,
    hermitian_eig,
    singular_values,
    svd,
    top_q_eigsum,
    top_q_singsum,
)
from .model import (
    COMPLEX_FIELD,
    REAL_FIELD,
    Certificate,
    CertKind,
    Decision,
    Tolerances,
    Verdict,
)
from .norms import ky_fan_dual_norm, ky_fan_norm, ky_fan_norm_batch, variational_norm
from .oracle import (
    GridSpec,
    chord_margin,
    fd_directional,
    grid_min_norm,
    oracle_check_pair,
    oracle_check_parallel,
    oracle_check_subspace,
    sample_range_points,
)
from .subdiff import (
    SubdifferentialFrame,
    build_frame,
    directional_derivative,
    sample_subgradient,
    subgradient_membership,
)

__version__ = "0.1.0"

__all__ = [
    "COMPLEX_FIELD",
    "REAL_FIELD",
    "BadBlockStructure",
    "CertKind",
    "Certificate",
    "Decision",
    "DegenerateRank",
    "GridSpec",
    "KOutOfRange",
    "KyFanError",
    "NoConvergence",
    "NonFinite",
    "NotOrthogonal",
    "ParseError",
    "Problem",
    "QOutOfRange",
    "Report",
    "ShapeMismatch",
    "SubdifferentialFrame",
    "Tolerances",
    "Verdict",
    "WitnessSearchFailed",
    "build_frame",
    "check_pair",
    "check_pair_blocks",
    "check_parallel",
    "check_subspace",
    "chord_margin",
    "cluster_spectrum",
    "decode_problem",
    "decode_report",
    "directional_derivative",
    "encode_problem",
    "encode_report",
    "extract_density",
    "fan_eigsum_batch",
    "fd_directional",
    "find_witness_block",
    "find_witness_system",
    "grid_min_norm",
    "haar_unitary",
    "hermitian_eig",
    "ky_fan_dual_norm",
    "ky_fan_norm",
    "ky_fan_norm_batch",
    "load_problem",
    "load_report",
    "make_nonorthogonal_pair",
    "make_nonparallel_pair",
    "make_orthogonal_pair",
    "make_parallel_pair",
    "make_singular_pair",
    "make_subspace_instance",
    "oracle_check_pair",
    "oracle_check_parallel",
    "oracle_check_subspace",
    "random_matrix",
    "sample_range_points",
    "sample_subgradient",
    "save_problem",
    "save_report",
    "singular_values",
    "subgradient_membership",
    "svd",
    "swept_minimum",
    "tied_spectrum",
    "top_q_eigsum",
    "top_q_singsum",
    "variational_norm",
    "verify_certificate",
    "__version__",
]
