"""Deterministic JSON encoding and the wire schemas.

The standard library encoder renders floats via ``repr`` (shortest
round-trip), which is not a byte-stable contract across inputs of different
provenance; the writer here pins every float to 17 significant digits so
identical mathematical content always serializes to identical bytes.
Parsing uses :mod:`json` as usual.

Schemas:

* measure:  ``{"N": int, "m": int, "atoms": [{"id": str, "tag": int|null,
  "phi": [float x m], "weight_re": [[float]], "weight_im": [[float]]}]}``
* function sample: ``{"points": [{"re": f, "im": f}], "values": [...]}``
  with values either ``{"re": f, "im": f}`` (scalar) or
  ``{"re": [[f]], "im": [[f]]}`` (matrix).
* annulus config: ``{"q": f, "t0_re": f, "t0_im": f, "M": int, "grid": int}``
"""

from __future__ import annotations

import json

import numpy as np

from .errors import SchemaError
from .measures import Atom, ChoquetDecomposition, DiscreteMatrixMeasure

__all__ = [
    "annulus_config_from_obj",
    "decomposition_to_obj",
    "dumps",
    "function_sample_to_obj",
    "loads",
    "measure_from_obj",
    "measure_to_obj",
]


def _format_float(x: float) -> str:
    if not np.isfinite(x):
        raise SchemaError("cannot serialize non-finite float")
    return format(float(x), ".17g")


def _encode(obj, pieces: list) -> None:
    if obj is None:
        pieces.append("null")
    elif obj is True:
        pieces.append("true")
    elif obj is False:
        pieces.append("false")
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(_format_float(float(obj)))
    elif isinstance(obj, dict):
        pieces.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                pieces.append(",")
            pieces.append(json.dumps(str(key)))
            pieces.append(":")
            _encode(value, pieces)
        pieces.append("}")
    elif isinstance(obj, (list, tuple)):
        pieces.append("[")
        for i, value in enumerate(obj):
            if i:
                pieces.append(",")
            _encode(value, pieces)
        pieces.append("]")
    else:
        raise SchemaError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON text (17 significant digits, insertion key order)."""
    pieces: list = []
    _encode(obj, pieces)
    pieces.append("\n")
    return "".join(pieces)


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc


def _matrix_to_pair(w: np.ndarray) -> tuple:
    return w.real.tolist(), w.imag.tolist()


def measure_to_obj(mu: DiscreteMatrixMeasure) -> dict:
    atoms = []
    for atom in mu.atoms:
        re, im = _matrix_to_pair(atom.weight)
        atoms.append({
            "id": atom.point_id,
            "tag": atom.tag,
            "phi": [float(v) for v in atom.phi],
            "weight_re": re,
            "weight_im": im,
        })
    return {"N": mu.N, "m": mu.m, "atoms": atoms}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def measure_from_obj(obj) -> DiscreteMatrixMeasure:
    _require(isinstance(obj, dict), "measure must be a JSON object")
    for key in ("N", "m", "atoms"):
        _require(key in obj, f"measure is missing key {key!r}")
    n, m = obj["N"], obj["m"]
    _require(isinstance(n, int) and n >= 1, "N must be a positive integer")
    _require(isinstance(m, int) and m >= 0, "m must be a nonnegative integer")
    _require(isinstance(obj["atoms"], list), "atoms must be a list")
    atoms = []
    for entry in obj["atoms"]:
        _require(isinstance(entry, dict), "atom must be a JSON object")
        for key in ("id", "phi", "weight_re", "weight_im"):
            _require(key in entry, f"atom is missing key {key!r}")
        tag = entry.get("tag")
        _require(tag is None or isinstance(tag, int), "tag must be int or null")
        phi = entry["phi"]
        _require(isinstance(phi, list) and len(phi) == m, "phi must list m floats")
        try:
            weight = np.asarray(entry["weight_re"], dtype=float) \
                + 1j * np.asarray(entry["weight_im"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SchemaError("weight parts must be rectangular float arrays") from exc
        _require(weight.shape == (n, n), "weight must be N x N")
        atoms.append(Atom(str(entry["id"]), phi, weight, tag))
    try:
        return DiscreteMatrixMeasure(n, m, tuple(atoms))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def decomposition_to_obj(dec: ChoquetDecomposition) -> dict:
    return {
        "depth": dec.depth,
        "terms": [
            {"coefficient": float(c), "measure": measure_to_obj(mu)}
            for c, mu in dec.terms
        ],
    }


def decomposition_from_obj(obj):
    _require(isinstance(obj, dict) and "terms" in obj, "decomposition needs terms")
    terms = []
    for entry in obj["terms"]:
        _require(isinstance(entry, dict) and "coefficient" in entry
                 and "measure" in entry, "bad decomposition term")
        terms.append((float(entry["coefficient"]), measure_from_obj(entry["measure"])))
    return terms


def function_sample_to_obj(points, values) -> dict:
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    out_points = [{"re": float(z.real), "im": float(z.imag)} for z in points]
    out_values = []
    for v in np.asarray(values, dtype=complex):
        if v.ndim == 0:
            out_values.append({"re": float(v.real), "im": float(v.imag)})
        else:
            out_values.append({"re": v.real.tolist(), "im": v.imag.tolist()})
    return {"points": out_points, "values": out_values}


def annulus_config_from_obj(obj) -> dict:
    _require(isinstance(obj, dict), "annulus config must be a JSON object")
    out = {
        "q": float(obj.get("q", 0.5)),
        "t0_re": float(obj.get("t0_re", np.sqrt(0.5))),
        "t0_im": float(obj.get("t0_im", 0.0)),
        "M": int(obj.get("M", 64)),
        "grid": int(obj.get("grid", 256)),
    }
    return out
