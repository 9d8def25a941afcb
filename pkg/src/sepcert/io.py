"""JSON matrix exchange format.

A document holds ``dims`` (list of integers) and ``matrix``, a row-major
list of rows whose entries are ``[re, im]`` pairs. Integer and decimal
literals are both accepted; output uses the shortest round-trip decimal.
"""
from __future__ import annotations

import json
import numbers
from pathlib import Path

import numpy as np

from .state import DensityMatrix, as_dims, validate


class MatrixFormatError(ValueError):
    """Malformed matrix document; the message names the offending location."""


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, numbers.Real):
        raise MatrixFormatError(f"{where}: expected a number, got {x!r}")
    return float(x)


def parse_matrix_document(doc) -> tuple:
    """Return ``(dims, complex ndarray)`` from a decoded document."""
    if not isinstance(doc, dict):
        raise MatrixFormatError("top level must be an object with 'dims' and 'matrix'")
    for key in ("dims", "matrix"):
        if key not in doc:
            raise MatrixFormatError(f"missing field {key!r}")
    dims = doc["dims"]
    if not isinstance(dims, list) or not dims:
        raise MatrixFormatError("dims: expected a nonempty list of integers")
    for i, d in enumerate(dims):
        if isinstance(d, bool) or not isinstance(d, int):
            raise MatrixFormatError(f"dims[{i}]: expected an integer, got {d!r}")
    try:
        cd = as_dims(dims)
    except ValueError as e:
        raise MatrixFormatError(f"dims: {e}") from None
    rows = doc["matrix"]
    D = cd.total
    if not isinstance(rows, list) or len(rows) != D:
        raise MatrixFormatError(f"matrix: expected {D} rows")
    out = np.empty((D, D), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != D:
            raise MatrixFormatError(f"matrix[{i}]: expected a row of {D} entries")
        for j, e in enumerate(row):
            where = f"matrix[{i}][{j}]"
            if not isinstance(e, list) or len(e) != 2:
                raise MatrixFormatError(f"{where}: expected an [re, im] pair, got {e!r}")
            out[i, j] = complex(_number(e[0], where), _number(e[1], where))
    return cd, out


def loads_matrix(text: str) -> tuple:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixFormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_matrix_document(doc)


def read_matrix(path) -> tuple:
    return loads_matrix(Path(path).read_text())


def read_state(path, dims=None) -> DensityMatrix:
    """Read and validate a density matrix; ``dims`` overrides the file's."""
    cd, m = read_matrix(path)
    return validate(m, cd if dims is None else dims)


def matrix_document(matrix, dims) -> dict:
    m = np.asarray(matrix, dtype=complex)
    return {
        "dims": list(as_dims(dims).factors),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def dumps_matrix(matrix, dims) -> str:
    return json.dumps(matrix_document(matrix, dims))


def write_matrix(path, matrix, dims) -> None:
    Path(path).write_text(dumps_matrix(matrix, dims) + "\n")


def write_state(path, rho: DensityMatrix) -> None:
    write_matrix(path, rho.matrix, rho.dims)
