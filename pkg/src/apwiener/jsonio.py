"""JSON encoding of the library's objects.

Every document carries ``"apw_schema": 1``.  Rationals are "p/q" strings and
floats are written with ``repr`` precision, so emit -> parse -> emit is
byte-identical.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from . import rational as rq
from .apcore import ApMatrix, ApPolynomial, Frequency, FrequencyBasis
from .errors import ApwError, ParseError
from .geometry import MASK_KINDS, Halfspace, SpectralMask

SCHEMA_VERSION = 1


# --- text layer -----------------------------------------------------------------

def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    if doc.get("apw_schema") != SCHEMA_VERSION:
        raise ParseError(f'missing or unsupported "apw_schema" (expected {SCHEMA_VERSION})')
    return doc


def document(**fields) -> dict:
    return {"apw_schema": SCHEMA_VERSION, **fields}


def _need(d: Any, key: str, where: str):
    if not isinstance(d, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in d:
        raise ParseError(f'{where}: missing field "{key}"')
    return d[key]


def _rational(x, where: str) -> Fraction:
    if not isinstance(x, (str, int)) or isinstance(x, bool):
        raise ParseError(f"{where}: rationals must be strings like \"p/q\"")
    try:
        return rq.to_fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: bad rational {x!r}") from exc


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{where}: expected a number")
    return float(x)


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected an integer")
    return x


def _rational_matrix(rows, where: str) -> rq.Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{where}: expected a list of rows")
    return tuple(tuple(_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)) for i, r in enumerate(rows))


def _wrap(fn, *args):
    try:
        return fn(*args)
    except ParseError:
        raise
    except ApwError as exc:
        raise ParseError(str(exc)) from exc


# --- objects ----------------------------------------------------------------------

def basis_to_json(b: FrequencyBasis) -> list:
    return [[rq.frac_str(x) for x in row] for row in b.matrix]


def basis_from_json(rows, where: str = "basis") -> FrequencyBasis:
    m = _rational_matrix(rows, where)
    if not m:
        raise ParseError(f"{where}: needs at least one row")
    return _wrap(FrequencyBasis, m, len(m))


def _terms_to_json(f: ApPolynomial) -> list:
    return [{"coord": list(c), "re": v.real, "im": v.imag} for c, v in f.items()]


def _terms_from_json(terms, basis: FrequencyBasis, where: str) -> ApPolynomial:
    if not isinstance(terms, list):
        raise ParseError(f"{where}: terms must be a list")
    out: dict = {}
    for i, t in enumerate(terms):
        w = f"{where}[{i}]"
        coord = _need(t, "coord", w)
        if not isinstance(coord, list):
            raise ParseError(f"{w}: coord must be a list")
        c = tuple(_int(x, f"{w}.coord") for x in coord)
        if len(c) != basis.rank_r:
            raise ParseError(f"{w}: coord length {len(c)} differs from basis rank {basis.rank_r}")
        if c in out:
            raise ParseError(f"{w}: repeated coordinate {list(c)}")
        out[c] = complex(_number(_need(t, "re", w), f"{w}.re"), _number(t.get("im", 0.0), f"{w}.im"))
    return ApPolynomial(basis, out)


def poly_to_json(f: ApPolynomial) -> dict:
    return {"basis": basis_to_json(f.basis), "terms": _terms_to_json(f)}


def poly_from_json(d, where: str = "polynomial") -> ApPolynomial:
    basis = basis_from_json(_need(d, "basis", where), f"{where}.basis")
    return _terms_from_json(_need(d, "terms", where), basis, f"{where}.terms")


def matrix_to_json(M: ApMatrix) -> dict:
    return {
        "basis": basis_to_json(M.basis),
        "m": M.m,
        "n": M.n,
        "entries": [{"terms": _terms_to_json(e)} for row in M.entries for e in row],
    }


def matrix_from_json(d, where: str = "matrix") -> ApMatrix:
    basis = basis_from_json(_need(d, "basis", where), f"{where}.basis")
    m = _int(_need(d, "m", where), f"{where}.m")
    n = _int(_need(d, "n", where), f"{where}.n")
    entries = _need(d, "entries", where)
    if not isinstance(entries, list) or len(entries) != m * n or m < 1 or n < 1:
        raise ParseError(f"{where}: expected {m}*{n} entries")
    polys = [_terms_from_json(_need(e, "terms", f"{where}.entries[{i}]"), basis, f"{where}.entries[{i}].terms")
             for i, e in enumerate(entries)]
    return ApMatrix([polys[i * n:(i + 1) * n] for i in range(m)], basis)


def matrix_or_poly_from_json(d, where: str) -> ApMatrix:
    """Accept a matrix object, or a polynomial object read as 1 x 1."""
    if isinstance(d, dict) and "entries" in d:
        return matrix_from_json(d, where)
    f = poly_from_json(d, where)
    return ApMatrix([[f]], f.basis)


def halfspace_to_json(S: Halfspace) -> dict:
    return {"Z": [[rq.frac_str(x) for x in row] for row in S.Z]}


def halfspace_from_json(d, where: str = "S") -> Halfspace:
    return _wrap(Halfspace, _rational_matrix(_need(d, "Z", where), f"{where}.Z"))


def mask_to_json(mask: SpectralMask) -> dict:
    if mask.kind == "predicate":
        raise ParseError("predicate masks are not serializable")
    return {"kind": mask.kind}


def mask_from_json(d, S: Halfspace | None, where: str = "mask") -> SpectralMask:
    kind = _need(d, "kind", where)
    if kind not in MASK_KINDS or kind == "predicate":
        raise ParseError(f"{where}: unknown mask kind {kind!r}")
    return _wrap(SpectralMask, kind, S)


def frequency_to_json(lam: Frequency) -> list:
    return list(lam.coords)


def factorization_to_json(fact) -> dict:
    return {
        "g_plus": matrix_to_json(fact.g_plus),
        "indices": [frequency_to_json(lam) for lam in fact.indices],
        "g_minus": matrix_to_json(fact.g_minus),
        "residual": fact.residual,
        "S": halfspace_to_json(fact.halfspace),
        "certificates": {k: float(v) for k, v in sorted(fact.certificates.items())},
    }


def factorization_from_json(d, S: Halfspace | None = None, where: str = "factorization"):
    from .factorization import ApFactorization

    g_plus = matrix_from_json(_need(d, "g_plus", where), f"{where}.g_plus")
    g_minus = matrix_from_json(_need(d, "g_minus", where), f"{where}.g_minus")
    if g_plus.basis != g_minus.basis:
        raise ParseError(f"{where}: factors use different bases")
    idx = _need(d, "indices", where)
    if not isinstance(idx, list):
        raise ParseError(f"{where}.indices: expected a list")
    indices = []
    for i, c in enumerate(idx):
        if not isinstance(c, list):
            raise ParseError(f"{where}.indices[{i}]: expected a coordinate list")
        coords = tuple(_int(x, f"{where}.indices[{i}]") for x in c)
        indices.append(_wrap(Frequency, g_plus.basis, coords))
    if "S" in d:
        S = halfspace_from_json(d["S"], f"{where}.S")
    if S is None:
        raise ParseError(f"{where}: no halfspace given")
    residual = _number(_need(d, "residual", where), f"{where}.residual")
    certs = d.get("certificates", {})
    if not isinstance(certs, dict):
        raise ParseError(f"{where}.certificates: expected an object")
    return _wrap(ApFactorization, g_plus, indices, g_minus, S, residual, len(indices),
                 {k: _number(v, f"{where}.certificates.{k}") for k, v in certs.items()})


def complex_to_json(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}


def dense_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def finite(x: float) -> float | str:
    """JSON-safe float: non-finite values become strings."""
    x = float(x)
    return x if math.isfinite(x) else repr(x)
