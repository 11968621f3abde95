"""JSON encoding shared by the CLI: complex numbers are ``[re, im]`` pairs.

See ``docs/formats.md`` for the schemas.
"""

from __future__ import annotations

import json

import numpy as np

from .qlinalg import OrthonormalBasis

FORMAT_VERSION = 1


class FormatError(ValueError):
    """Malformed or inconsistent JSON input."""


def encode_complex(z) -> list[float]:
    z = complex(z)
    # + 0.0 turns -0.0 into 0.0
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def encode_vector(v) -> list[list[float]]:
    return [encode_complex(z) for z in np.asarray(v).ravel()]


def encode_matrix(A) -> list[list[list[float]]]:
    return [encode_vector(row) for row in np.asarray(A)]


def _decode_complex(x, where: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if (
        isinstance(x, list)
        and len(x) == 2
        and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in x)
    ):
        return complex(x[0], x[1])
    raise FormatError(f"{where}: expected a number or [re, im] pair, got {x!r}")


def decode_vector(data, where: str = "vector") -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise FormatError(f"{where}: expected a nonempty list")
    return np.array([_decode_complex(x, f"{where}[{i}]") for i, x in enumerate(data)])


def decode_matrix(data, where: str = "matrix") -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise FormatError(f"{where}: expected a nonempty list of rows")
    rows = [decode_vector(r, f"{where}[{i}]") for i, r in enumerate(data)]
    if len({len(r) for r in rows}) != 1:
        raise FormatError(f"{where}: rows have unequal lengths")
    return np.array(rows)


def encode_basis(b: OrthonormalBasis) -> dict:
    return {"dim": b.dim, "vectors": encode_matrix(b.vectors)}


def decode_basis(data, where: str = "basis") -> OrthonormalBasis:
    if not isinstance(data, dict) or "vectors" not in data:
        raise FormatError(f"{where}: expected an object with 'vectors'")
    V = decode_matrix(data["vectors"], f"{where}.vectors")
    if "dim" in data and data["dim"] != V.shape[0]:
        raise FormatError(f"{where}: dim {data['dim']} disagrees with {V.shape[0]} vectors")
    try:
        return OrthonormalBasis(V)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def encode_basis_set(bases) -> dict:
    return {"format": FORMAT_VERSION, "bases": [encode_basis(b) for b in bases]}


def decode_basis_set(data) -> list[OrthonormalBasis]:
    if not isinstance(data, dict) or not isinstance(data.get("bases"), list):
        raise FormatError("expected an object with a 'bases' list")
    if data.get("format", FORMAT_VERSION) != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {data['format']!r} (expected {FORMAT_VERSION})")
    bases = [decode_basis(b, f"bases[{i}]") for i, b in enumerate(data["bases"])]
    if not bases:
        raise FormatError("'bases' is empty")
    if len({b.dim for b in bases}) != 1:
        raise FormatError("bases have mismatched dimensions")
    return bases


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed float repr)."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
