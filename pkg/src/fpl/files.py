"""JSON file formats and canonical output.

Space file::  {"points": ["x", "y", "z"], "dist": [[0, 1, 10], ...]}
Map file::    {"image": [0, 1, 0]}   (indices or point labels)
Table file::  {"dist": 6x6 matrix}   over x, y, z, Tx, Ty, Tz

Distances may be JSON numbers or strings such as ``"0.25"`` or ``"1/3"``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .classify import SelfMap
from .metric import FiniteMetricSpace
from .numeric import DEFAULT_TOL, to_scalar


def _load(path, exact: bool):
    text = Path(path).read_text()
    if exact:
        return json.loads(text, parse_float=Fraction)
    return json.loads(text)


def _matrix(raw, exact: bool) -> list:
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise ValueError("'dist' must be a list of rows")
    return [[to_scalar(v, exact) for v in row] for row in raw]


def load_space(path, exact: bool = False, tol: float = DEFAULT_TOL) -> FiniteMetricSpace:
    data = _load(path, exact)
    if "dist" not in data:
        raise ValueError(f"{path}: missing 'dist'")
    return FiniteMetricSpace.from_matrix(_matrix(data["dist"], exact), data.get("points"), tol, exact)


def load_matrix(path, exact: bool = False) -> list:
    data = _load(path, exact)
    raw = data["dist"] if isinstance(data, dict) else data
    return _matrix(raw, exact)


def load_map(path, space: FiniteMetricSpace) -> SelfMap:
    data = json.loads(Path(path).read_text())
    if "image" not in data:
        raise ValueError(f"{path}: missing 'image'")
    img = data["image"]
    if len(img) != space.n:
        raise ValueError(f"{path}: image has {len(img)} entries for a {space.n}-point space")
    return SelfMap.from_labels(space, img)


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, one trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"
