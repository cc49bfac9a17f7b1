"""JSON codecs for problem files, reports, and certificates.

Matrices travel as flat row-major real and imaginary lists with explicit
dimensions. Floats use Python's shortest round-trip form, which stays within
17 significant digits and reconstructs the exact double. Every malformed
input surfaces as ParseError with a message naming the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import ParseError
from .model import (
    COMPLEX_FIELD,
    REAL_FIELD,
    CertKind,
    Certificate,
    Decision,
    Tolerances,
    Verdict,
)

__all__ = [
    "SCHEMA_VERSION",
    "Problem",
    "Report",
    "encode_matrix",
    "decode_matrix",
    "encode_problem",
    "decode_problem",
    "load_problem",
    "save_problem",
    "encode_certificate",
    "decode_certificate",
    "encode_report",
    "decode_report",
    "load_report",
    "save_report",
]

SCHEMA_VERSION = 1

_TOL_KEYS = ("decide", "strict", "cert", "resid", "herm", "cluster", "rank")


def encode_matrix(m) -> dict:
    """Matrix to {rows, cols, re, im} with flat row-major entry lists."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ParseError(f"can only encode 2-d arrays, got shape {m.shape}")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel(order="C")],
        "im": [float(x) for x in m.imag.ravel(order="C")],
    }


def decode_matrix(obj, name: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"{name}: expected an object, got {type(obj).__name__}")
    for key in ("rows", "cols", "re", "im"):
        if key not in obj:
            raise ParseError(f"{name}: missing key {key!r}")
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: rows/cols must be integers") from exc
    if rows < 0 or cols < 0:
        raise ParseError(f"{name}: negative dimensions {rows}x{cols}")
    re, im = obj["re"], obj["im"]
    if not isinstance(re, list) or not isinstance(im, list):
        raise ParseError(f"{name}: re/im must be lists")
    if len(re) != rows * cols or len(im) != rows * cols:
        raise ParseError(
            f"{name}: entry count {len(re)}/{len(im)} != rows*cols {rows * cols}")
    try:
        real = np.asarray(re, dtype=float).reshape(rows, cols)
        imag = np.asarray(im, dtype=float).reshape(rows, cols)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: entries must be numbers") from exc
    m = real + 1j * imag
    if not np.all(np.isfinite(real)) or not np.all(np.isfinite(imag)):
        raise ParseError(f"{name}: entries must be finite")
    return m


def _plain(value):
    """Recursively convert numpy and complex values to JSON-safe types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


@dataclass
class Problem:
    """Decoded problem file: named matrices plus the check parameters."""

    matrices: dict
    k: int
    field: str = COMPLEX_FIELD
    subspace: list | None = None
    tolerances: Tolerances | None = None
    label: dict = dataclass_field(default_factory=dict)

    def matrix(self, name: str) -> np.ndarray:
        if name not in self.matrices:
            raise ParseError(f"problem has no matrix named {name!r}")
        return self.matrices[name]

    def pair(self):
        return self.matrix("a"), self.matrix("b")

    def basis(self) -> list:
        names = self.subspace if self.subspace is not None else []
        return [self.matrix(nm) for nm in names]


@dataclass
class Report:
    """Decoded report file."""

    verdict: Verdict
    margin: float
    scale: float
    method: str
    tolerances: Tolerances | None
    certificate: Certificate | None
    details: dict
    timings: dict
    seed: int | None


def encode_problem(matrices: dict, k: int, field_name: str = COMPLEX_FIELD,
                   subspace: list | None = None,
                   tolerances: Tolerances | None = None,
                   label: dict | None = None) -> dict:
    obj = {
        "schema_version": SCHEMA_VERSION,
        "matrices": {str(nm): encode_matrix(m) for nm, m in matrices.items()},
        "k": int(k),
        "field": field_name,
    }
    if subspace is not None:
        obj["subspace"] = [str(nm) for nm in subspace]
    if tolerances is not None:
        obj["tolerances"] = _plain(tolerances.as_dict())
    if label:
        obj["label"] = _plain(label)
    return obj


def _decode_tolerances(obj) -> Tolerances:
    if not isinstance(obj, dict):
        raise ParseError("tolerances: expected an object")
    unknown = set(obj) - set(_TOL_KEYS)
    if unknown:
        raise ParseError(f"tolerances: unknown keys {sorted(unknown)}")
    kwargs = {}
    for key, value in obj.items():
        if value is None:
            continue
        try:
            kwargs[key] = float(value)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"tolerances: {key} must be a number") from exc
    try:
        return Tolerances(**kwargs)
    except ValueError as exc:
        raise ParseError(f"tolerances: {exc}") from exc


def decode_problem(obj) -> Problem:
    if not isinstance(obj, dict):
        raise ParseError("problem: expected a top-level object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"problem: unsupported schema_version {version!r}")
    raw = obj.get("matrices")
    if not isinstance(raw, dict) or not raw:
        raise ParseError("problem: matrices must be a non-empty object")
    matrices = {nm: decode_matrix(m, name=f"matrices[{nm!r}]")
                for nm, m in raw.items()}
    try:
        k = int(obj["k"])
    except KeyError as exc:
        raise ParseError("problem: missing k") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError("problem: k must be an integer") from exc
    if k < 1:
        raise ParseError(f"problem: k must be positive, got {k}")
    field_name = obj.get("field", COMPLEX_FIELD)
    if field_name not in (COMPLEX_FIELD, REAL_FIELD):
        raise ParseError(f"problem: unknown field {field_name!r}")
    subspace = obj.get("subspace")
    if subspace is not None:
        if not isinstance(subspace, list):
            raise ParseError("problem: subspace must be a list of names")
        for nm in subspace:
            if nm not in matrices:
                raise ParseError(f"problem: subspace names unknown matrix {nm!r}")
    tolerances = None
    if obj.get("tolerances") is not None:
        tolerances = _decode_tolerances(obj["tolerances"])
    label = obj.get("label") or {}
    if not isinstance(label, dict):
        raise ParseError("problem: label must be an object")
    return Problem(matrices=matrices, k=k, field=field_name,
                   subspace=subspace, tolerances=tolerances, label=label)


def encode_certificate(cert: Certificate) -> dict:
    obj = {"kind": cert.kind.value}
    if cert.vectors is not None:
        obj["vectors"] = encode_matrix(cert.vectors)
    if cert.block_matrix is not None:
        obj["block_matrix"] = encode_matrix(cert.block_matrix)
    if cert.subgradient is not None:
        obj["subgradient"] = encode_matrix(cert.subgradient)
    if cert.coefficient is not None:
        c = complex(cert.coefficient)
        obj["coefficient"] = [c.real, c.imag]
    if cert.norm_value is not None:
        obj["norm_value"] = float(cert.norm_value)
    if cert.densities is not None:
        obj["densities"] = [encode_matrix(p) for p in cert.densities]
    if cert.details:
        obj["details"] = _plain(cert.details)
    return obj


def decode_certificate(obj) -> Certificate:
    if not isinstance(obj, dict):
        raise ParseError("certificate: expected an object")
    kind_raw = obj.get("kind")
    try:
        kind = CertKind(kind_raw)
    except ValueError as exc:
        raise ParseError(f"certificate: unknown kind {kind_raw!r}") from exc
    vectors = block = subgrad = None
    if "vectors" in obj:
        vectors = decode_matrix(obj["vectors"], name="certificate.vectors")
    if "block_matrix" in obj:
        block = decode_matrix(obj["block_matrix"], name="certificate.block_matrix")
    if "subgradient" in obj:
        subgrad = decode_matrix(obj["subgradient"], name="certificate.subgradient")
    coefficient = None
    if "coefficient" in obj:
        pair = obj["coefficient"]
        if (not isinstance(pair, list)) or len(pair) != 2:
            raise ParseError("certificate: coefficient must be [re, im]")
        try:
            coefficient = complex(float(pair[0]), float(pair[1]))
        except (TypeError, ValueError) as exc:
            raise ParseError("certificate: coefficient must be numeric") from exc
    norm_value = None
    if "norm_value" in obj:
        try:
            norm_value = float(obj["norm_value"])
        except (TypeError, ValueError) as exc:
            raise ParseError("certificate: norm_value must be a number") from exc
    densities = None
    if "densities" in obj:
        if not isinstance(obj["densities"], list):
            raise ParseError("certificate: densities must be a list")
        densities = [decode_matrix(p, name=f"certificate.densities[{i}]")
                     for i, p in enumerate(obj["densities"])]
    details = obj.get("details") or {}
    if not isinstance(details, dict):
        raise ParseError("certificate: details must be an object")
    return Certificate(kind=kind, vectors=vectors, block_matrix=block,
                       subgradient=subgrad, coefficient=coefficient,
                       norm_value=norm_value, densities=densities,
                       details=details)


def encode_report(decision: Decision, timings: dict | None = None,
                  seed: int | None = None) -> dict:
    obj = {
        "schema_version": SCHEMA_VERSION,
        "verdict": decision.verdict.value,
        "margin": float(decision.margin),
        "scale": float(decision.scale),
        "method": decision.method,
        "tolerances": (_plain(decision.tolerances.as_dict())
                       if decision.tolerances is not None else None),
        "certificate": (encode_certificate(decision.certificate)
                        if decision.certificate is not None else None),
        "details": _plain(decision.details),
        "timings": _plain(timings or {}),
        "seed": seed,
    }
    return obj


def decode_report(obj) -> Report:
    if not isinstance(obj, dict):
        raise ParseError("report: expected a top-level object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"report: unsupported schema_version {version!r}")
    verdict_raw = obj.get("verdict")
    try:
        verdict = Verdict(verdict_raw)
    except ValueError as exc:
        raise ParseError(f"report: unknown verdict {verdict_raw!r}") from exc
    try:
        margin = float(obj["margin"])
        scale = float(obj["scale"])
    except KeyError as exc:
        raise ParseError(f"report: missing {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError("report: margin/scale must be numbers") from exc
    tolerances = None
    if obj.get("tolerances") is not None:
        tolerances = _decode_tolerances(obj["tolerances"])
    certificate = None
    if obj.get("certificate") is not None:
        certificate = decode_certificate(obj["certificate"])
    details = obj.get("details") or {}
    timings = obj.get("timings") or {}
    seed = obj.get("seed")
    if seed is not None:
        try:
            seed = int(seed)
        except (TypeError, ValueError) as exc:
            raise ParseError("report: seed must be an integer") from exc
    return Report(verdict=verdict, margin=margin, scale=scale,
                  method=str(obj.get("method", "")), tolerances=tolerances,
                  certificate=certificate, details=details, timings=timings,
                  seed=seed)


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _save_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def load_problem(path) -> Problem:
    return decode_problem(_load_json(path))


def save_problem(path, matrices: dict, k: int,
                 field_name: str = COMPLEX_FIELD, subspace: list | None = None,
                 tolerances: Tolerances | None = None,
                 label: dict | None = None):
    _save_json(path, encode_problem(matrices, k, field_name=field_name,
                                    subspace=subspace, tolerances=tolerances,
                                    label=label))


def load_report(path) -> Report:
    return decode_report(_load_json(path))


def save_report(path, decision: Decision, timings: dict | None = None,
                seed: int | None = None):
    _save_json(path, encode_report(decision, timings=timings, seed=seed))
