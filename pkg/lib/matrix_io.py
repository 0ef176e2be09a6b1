#!/usr/bin/env python3
"""
MatrixFile codec: one complex matrix per JSON document.

    {"rows": 2, "cols": 2, "data": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}

data is row-major with [re, im] pairs. Floats are written with Python's
shortest round-trip repr, so a written matrix parses back bit-identical.
"""

import json
import math
from dataclasses import dataclass
from numbers import Real
from pathlib import Path
from typing import Union

import numpy as np

from semihilbert_radius.errors import ParseError


@dataclass(frozen=True)
class MatrixFile:
    rows: int
    cols: int
    data: list

    @classmethod
    def from_matrix(cls, M) -> 'MatrixFile':
        M = np.asarray(M, dtype=np.complex128)
        if M.ndim != 2:
            raise ParseError(f"expected a 2-dimensional matrix, got shape {M.shape}")
        data = [[[float(z.real), float(z.imag)] for z in row] for row in M]
        return cls(M.shape[0], M.shape[1], data)

    def to_matrix(self) -> np.ndarray:
        M = np.empty((self.rows, self.cols), dtype=np.complex128)
        for i, row in enumerate(self.data):
            for j, (re, im) in enumerate(row):
                M[i, j] = complex(re, im)
        return M

    def to_json(self) -> str:
        return json.dumps({'rows': self.rows, 'cols': self.cols, 'data': self.data})


def _count(doc: dict, key: str, source: str) -> int:
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ParseError(f"{source}: '{key}' must be a positive integer, got {value!r}")
    return value


def _number(value, where: str, source: str) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ParseError(f"{source}: {where} is not a number: {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ParseError(f"{source}: {where} is not finite")
    return value


def parse_matrix(text: str, source: str = '<string>') -> MatrixFile:
    """Validate a MatrixFile document; errors name the offending entry"""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: expected an object with rows, cols and data")

    rows = _count(doc, 'rows', source)
    cols = _count(doc, 'cols', source)
    data = doc.get('data')
    if not isinstance(data, list) or len(data) != rows:
        size = len(data) if isinstance(data, list) else type(data).__name__
        raise ParseError(f"{source}: data must be a list of {rows} rows, got {size}")

    clean = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise ParseError(f"{source}: data[{i}] must be a list of {cols} [re, im] pairs")
        clean_row = []
        for j, entry in enumerate(row):
            where = f"data[{i}][{j}]"
            if not isinstance(entry, list) or len(entry) != 2:
                raise ParseError(f"{source}: {where} must be a [re, im] pair, got {entry!r}")
            clean_row.append([_number(entry[0], f"{where}[0]", source), _number(entry[1], f"{where}[1]", source)])
        clean.append(clean_row)
    return MatrixFile(rows, cols, clean)


def load_matrix(path: Union[str, Path]) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_matrix(text, str(path)).to_matrix()


def dump_matrix(M) -> str:
    return MatrixFile.from_matrix(M).to_json()
