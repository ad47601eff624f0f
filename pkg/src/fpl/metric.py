"""Finite metric spaces: validation, construction, shortest-path repair."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Optional, Sequence

from .numeric import DEFAULT_TOL, Scalar, fmt_scalar, infer_exact, sqrt_exact, to_scalar

MAX_POINTS = 64

# axiom kinds, in the order they are reported for the same index tuple
NEGATIVE = "negative"
DIAGONAL = "diagonal"
INDISCERNIBLE = "indiscernible"
SYMMETRY = "symmetry"
TRIANGLE = "triangle"
_KIND_ORDER = {k: i for i, k in enumerate((NEGATIVE, DIAGONAL, INDISCERNIBLE, SYMMETRY, TRIANGLE))}


class MetricError(ValueError):
    """Matrix rejected as a metric; carries the full ValidationReport."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        first = report.violations[0]
        super().__init__(
            f"not a metric: {len(report.violations)} violation(s), first {first[0]} at {first[1]}"
        )


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"kind": k, "index": list(idx), "magnitude": fmt_scalar(mag)}
                for k, idx, mag in self.violations
            ],
        }


def _square(dist) -> int:
    n = len(dist)
    for row in dist:
        if len(row) != n:
            raise ValueError(f"distance matrix is not square: row of length {len(row)} in {n}x?")
    return n


def validate_metric(dist: Sequence[Sequence], tol: float = DEFAULT_TOL, exact: Optional[bool] = None) -> ValidationReport:
    """Check every metric axiom on ``dist`` and report each violation.

    Violations are ``(kind, index_tuple, magnitude)`` with magnitude the
    amount by which the axiom fails.  Triangle violations use the tuple
    ``(i, k, j)`` meaning ``d[i][k] > d[i][j] + d[j][k]``; only ``i < k`` is
    listed since asymmetry is reported separately.  In exact mode ``tol``
    is ignored.  The list is sorted by index tuple, then kind.
    """
    n = _square(dist)
    if exact is None:
        exact = infer_exact(v for row in dist for v in row)
    eps = 0 if exact else tol
    out = []
    for i in range(n):
        for j in range(n):
            v = dist[i][j]
            if v < 0:
                out.append((NEGATIVE, (i, j), -v))
            if i == j:
                if abs(v) > eps:
                    out.append((DIAGONAL, (i, i), abs(v)))
                continue
            if v <= 0:
                out.append((INDISCERNIBLE, (i, j), -v))
            if j > i and abs(v - dist[j][i]) > eps:
                out.append((SYMMETRY, (i, j), abs(v - dist[j][i])))
    for i in range(n):
        di = dist[i]
        for k in range(i + 1, n):
            dik = di[k]
            for j in range(n):
                if j == i or j == k:
                    continue
                excess = dik - di[j] - dist[j][k]
                if excess > eps:
                    out.append((TRIANGLE, (i, k, j), excess))
    out.sort(key=lambda v: (v[1], _KIND_ORDER[v[0]]))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Labeled finite point set with a validated distance matrix.

    Build through :meth:`from_matrix`, :func:`euclidean_space` or
    :func:`metric_closure`; direct construction skips validation.
    """

    labels: tuple
    dist: tuple
    exact: bool = True
    tol: float = DEFAULT_TOL
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @classmethod
    def from_matrix(
        cls,
        dist: Sequence[Sequence],
        labels: Optional[Sequence[str]] = None,
        tol: float = DEFAULT_TOL,
        exact: Optional[bool] = None,
        max_points: int = MAX_POINTS,
    ) -> "FiniteMetricSpace":
        n = _square(dist)
        if n < 1:
            raise ValueError("a metric space needs at least one point")
        if n > max_points:
            raise ValueError(f"{n} points exceeds the configured limit of {max_points}")
        if exact is None:
            exact = infer_exact(v for row in dist for v in row)
        mat = tuple(tuple(to_scalar(v, exact) for v in row) for row in dist)
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = tuple(str(lab) for lab in labels)
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} points")
        if len(set(labels)) != n:
            raise ValueError("labels must be unique")
        report = validate_metric(mat, tol, exact)
        if not report.ok:
            raise MetricError(report)
        zero = to_scalar(0, exact)
        mat = tuple(tuple(zero if i == j else v for j, v in enumerate(row)) for i, row in enumerate(mat))
        return cls(labels, mat, exact, tol)

    @property
    def n(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> Scalar:
        return self.dist[i][j]

    def index(self, label) -> int:
        """Resolve a label (or an integer index) to a point index."""
        if isinstance(label, int) and not isinstance(label, bool):
            if not 0 <= label < self.n:
                raise IndexError(f"point index {label} out of range")
            return label
        try:
            return self._index[str(label)]
        except KeyError:
            if str(label).isdigit() and int(label) < self.n:
                return int(label)
            raise KeyError(f"unknown point label {label!r}") from None

    def subspace(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        idx = list(indices)
        return FiniteMetricSpace(
            tuple(self.labels[i] for i in idx),
            tuple(tuple(self.dist[i][j] for j in idx) for i in idx),
            self.exact,
            self.tol,
        )

    def permuted(self, perm: Sequence[int]) -> "FiniteMetricSpace":
        """Space whose point ``perm[i]`` is this space's point ``i``."""
        inv = [0] * self.n
        for i, p in enumerate(perm):
            inv[p] = i
        return self.subspace(inv)

    def to_json(self) -> dict:
        return {"points": list(self.labels), "dist": [[fmt_scalar(v) for v in row] for row in self.dist]}

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def euclidean_space(points: Sequence[Sequence], labels=None, exact: Optional[bool] = None) -> FiniteMetricSpace:
    """Finite subset of R^k with the Euclidean distance.

    With exact coordinates the space stays exact when every pairwise
    distance is rational (always so in one dimension); otherwise it falls
    back to float mode.
    """
    pts = [tuple(p) if isinstance(p, (list, tuple)) else (p,) for p in points]
    if not pts:
        raise ValueError("no points given")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise ValueError("points have differing dimensions")
    if len(set(pts)) != len(pts):
        seen = {}
        for i, p in enumerate(pts):
            if p in seen:
                raise ValueError(f"duplicate points {seen[p]} and {i}")
            seen[p] = i
    if exact is None:
        exact = infer_exact(c for p in pts for c in p)
    n = len(pts)
    sq = [[sum((Fraction(a) - Fraction(b)) ** 2 for a, b in zip(pts[i], pts[j])) if exact else
           sum((float(a) - float(b)) ** 2 for a, b in zip(pts[i], pts[j]))
           for j in range(n)] for i in range(n)]
    if exact:
        roots = [[sqrt_exact(v) for v in row] for row in sq]
        if all(r is not None for row in roots for r in row):
            return FiniteMetricSpace.from_matrix(roots, labels, exact=True)
        sq = [[float(v) for v in row] for row in sq]
    dist = [[sqrt(v) for v in row] for row in sq]
    for i in range(n):
        for j in range(i):
            dist[i][j] = dist[j][i]
    return FiniteMetricSpace.from_matrix(dist, labels, exact=False)


def metric_closure(weights: Sequence[Sequence], labels=None, exact: Optional[bool] = None) -> FiniteMetricSpace:
    """Shortest-path metric of the complete graph weighted by ``weights``."""
    n = _square(weights)
    if exact is None:
        exact = infer_exact(v for row in weights for v in row)
    w = [[to_scalar(v, exact) for v in row] for row in weights]
    for i in range(n):
        if w[i][i] != 0:
            raise ValueError(f"nonzero diagonal weight at ({i},{i})")
        for j in range(n):
            if i != j and w[i][j] <= 0:
                raise ValueError(f"nonpositive off-diagonal weight at ({i},{j})")
            if w[i][j] != w[j][i]:
                raise ValueError(f"asymmetric weights at ({i},{j})")
    for k in range(n):
        wk = w[k]
        for i in range(n):
            wi = w[i]
            wik = wi[k]
            for j in range(n):
                via = wik + wk[j]
                if via < wi[j]:
                    wi[j] = via
    return FiniteMetricSpace.from_matrix(w, labels, exact=exact)
