"""Membership certificates for the four contraction classes on finite spaces.

Each class is a family of linear inequalities in its coefficients, one per
unordered triple of pairwise distinct points (or per ordered pair of distinct
points for the two-point class), so membership reduces to a small linear
program whose optimum is the least achievable value of the class functional.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations, permutations
from typing import Optional, Sequence

from .lp import LPResult, solve_linear_feasibility
from .metric import FiniteMetricSpace
from .numeric import DEFAULT_TOL, Scalar, fmt_scalar


class MappingClass(str, Enum):
    CRR = "CRR"
    GEN_CRR = "GEN_CRR"
    GEN_KANNAN = "GEN_KANNAN"
    PERIM = "PERIM"


THRESHOLDS = {
    MappingClass.CRR: Fraction(1),
    MappingClass.GEN_CRR: Fraction(1),
    MappingClass.GEN_KANNAN: Fraction(2, 3),
    MappingClass.PERIM: Fraction(1),
}

COEFFICIENT_NAMES = {
    MappingClass.CRR: ("a", "b", "c"),
    MappingClass.GEN_CRR: ("alpha", "lambda"),
    MappingClass.GEN_KANNAN: ("lambda",),
    MappingClass.PERIM: ("alpha",),
}

CLASS_ALIASES = {
    "crr": MappingClass.CRR,
    "gen-crr": MappingClass.GEN_CRR,
    "gen-kannan": MappingClass.GEN_KANNAN,
    "perim": MappingClass.PERIM,
}


class ClassUndefined(ValueError):
    """The class needs more points than the space has."""


@dataclass(frozen=True)
class SelfMap:
    """Total self-map of ``{0, ..., n-1}``; ``image[i]`` is the index of T(i)."""

    image: tuple

    def __post_init__(self):
        img = tuple(self.image)
        n = len(img)
        for i, v in enumerate(img):
            if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < n:
                raise ValueError(f"image[{i}] = {v!r} is not a point index in [0, {n})")
        object.__setattr__(self, "image", img)

    @property
    def n(self) -> int:
        return len(self.image)

    def __getitem__(self, i: int) -> int:
        return self.image[i]

    def __call__(self, i: int) -> int:
        return self.image[i]

    @classmethod
    def from_labels(cls, space: FiniteMetricSpace, targets: Sequence) -> "SelfMap":
        return cls(tuple(space.index(t) for t in targets))

    def permuted(self, perm: Sequence[int]) -> "SelfMap":
        """Conjugate by ``perm`` to match :meth:`FiniteMetricSpace.permuted`."""
        img = [0] * self.n
        for i, t in enumerate(self.image):
            img[perm[i]] = perm[t]
        return SelfMap(tuple(img))

    def restricted(self, indices: Sequence[int]) -> "SelfMap":
        pos = {p: k for k, p in enumerate(indices)}
        try:
            return SelfMap(tuple(pos[self.image[p]] for p in indices))
        except KeyError:
            raise ValueError("subset is not closed under the map") from None


@dataclass(frozen=True)
class TripleSums:
    p_image: Scalar
    p_source: Scalar
    displacement: Scalar


def triple_sums(space: FiniteMetricSpace, T: SelfMap, i: int, j: int, k: int) -> TripleSums:
    d = space.dist
    ti, tj, tk = T[i], T[j], T[k]
    return TripleSums(
        d[ti][tj] + d[tj][tk] + d[ti][tk],
        d[i][j] + d[j][k] + d[i][k],
        d[i][ti] + d[j][tj] + d[k][tk],
    )


@dataclass(frozen=True)
class Certificate:
    mapping_class: MappingClass
    feasible: bool
    coefficients: dict
    strictness: Optional[Scalar]
    threshold: Fraction
    margin: Optional[Scalar]
    binding: tuple
    exact: bool = True
    tol: float = DEFAULT_TOL
    witnesses: tuple = field(default=(), compare=False)

    def coefficient(self, name: str) -> Scalar:
        return self.coefficients[name]

    def to_json(self) -> dict:
        return {
            "class": self.mapping_class.value,
            "feasible": self.feasible,
            "coefficients": {k: fmt_scalar(v) for k, v in self.coefficients.items()},
            "strictness": fmt_scalar(self.strictness),
            "threshold": fmt_scalar(self.threshold),
            "margin": fmt_scalar(self.margin),
            "binding": [list(t) for t in self.binding],
            "mode": "exact" if self.exact else "float",
            "tol": None if self.exact else self.tol,
        }


def _triples(n: int):
    return list(combinations(range(n), 3))


def _need_three(space: FiniteMetricSpace, T: SelfMap, what: str):
    if T.n != space.n:
        raise ValueError(f"map has {T.n} entries for a {space.n}-point space")
    if space.n < 3:
        raise ClassUndefined(f"{what} requires at least 3 points, got {space.n}")


def _is_feasible(strictness, threshold, exact: bool, tol: float) -> bool:
    if strictness is None:
        return False
    if exact:
        return strictness < threshold
    return strictness <= float(threshold) - tol


def _certificate(cls, lp: LPResult, keys, space, tol) -> Certificate:
    threshold = THRESHOLDS[cls]
    names = COEFFICIENT_NAMES[cls]
    if not lp.feasible:
        return Certificate(cls, False, {}, None, threshold, None, (), space.exact, tol)
    thr = threshold if space.exact else float(threshold)
    return Certificate(
        cls,
        _is_feasible(lp.min_value, threshold, space.exact, tol),
        dict(zip(names, lp.argmin)),
        lp.min_value,
        threshold,
        thr - lp.min_value,
        tuple(keys[i] for i in lp.active),
        space.exact,
        tol,
    )


def gen_crr_constraints(space: FiniteMetricSpace, T: SelfMap):
    """One ``(P_d, S) . (alpha, lambda) >= P_T`` row per unordered triple."""
    keys, rows = [], []
    for t in _triples(space.n):
        s = triple_sums(space, T, *t)
        keys.append(t)
        rows.append(((s.p_source, s.displacement), s.p_image))
    return keys, rows


def crr_constraints(space: FiniteMetricSpace, T: SelfMap):
    """One ``(d(x,y), d(x,Tx), d(y,Ty)) . (a, b, c) >= d(Tx,Ty)`` row per ordered pair."""
    d = space.dist
    keys, rows = [], []
    for x, y in permutations(range(space.n), 2):
        keys.append((x, y))
        rows.append(((d[x][y], d[x][T[x]], d[y][T[y]]), d[T[x]][T[y]]))
    return keys, rows


def classify_gen_crr(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> Certificate:
    _need_three(space, T, "the generalized CRR class")
    keys, rows = gen_crr_constraints(space, T)
    w = (2, Fraction(3, 2)) if space.exact else (2.0, 1.5)
    lp = solve_linear_feasibility(rows, w, 2, tol, space.exact)
    return _certificate(MappingClass.GEN_CRR, lp, keys, space, tol)


def classify_crr(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> Certificate:
    if T.n != space.n:
        raise ValueError(f"map has {T.n} entries for a {space.n}-point space")
    if space.n < 2:
        raise ClassUndefined("the CRR class requires at least 2 points")
    keys, rows = crr_constraints(space, T)
    w = (1, 1, 1) if space.exact else (1.0, 1.0, 1.0)
    lp = solve_linear_feasibility(rows, w, 3, tol, space.exact)
    return _certificate(MappingClass.CRR, lp, keys, space, tol)


def _ratio_certificate(cls, space, T, tol, numer, denom) -> Certificate:
    """Certificate for a one-coefficient class: the max of numer/denom over triples."""
    threshold = THRESHOLDS[cls]
    (name,) = COEFFICIENT_NAMES[cls]
    exact = space.exact
    best = None
    ratios = []
    blocked = []
    for t in _triples(space.n):
        s = triple_sums(space, T, *t)
        num, den = numer(s), denom(s)
        if den == 0:
            if num > 0:
                blocked.append(t)
            continue
        r = num / den
        ratios.append((t, r))
        if best is None or r > best:
            best = r
    if blocked:
        return Certificate(cls, False, {}, None, threshold, None, tuple(blocked), exact, tol)
    if best is None:
        best = Fraction(0) if exact else 0.0
    if exact:
        binding = tuple(t for t, r in ratios if r == best)
    else:
        binding = tuple(t for t, r in ratios if abs(r - best) <= tol * max(1.0, abs(best)))
    thr = threshold if exact else float(threshold)
    return Certificate(
        cls,
        _is_feasible(best, threshold, exact, tol),
        {name: best},
        best,
        threshold,
        thr - best,
        binding,
        exact,
        tol,
    )


def classify_gen_kannan(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> Certificate:
    _need_three(space, T, "the generalized Kannan class")
    return _ratio_certificate(
        MappingClass.GEN_KANNAN, space, T, tol, lambda s: s.p_image, lambda s: s.displacement
    )


def classify_perimeter(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> Certificate:
    _need_three(space, T, "the perimeter-contracting class")
    return _ratio_certificate(
        MappingClass.PERIM, space, T, tol, lambda s: s.p_image, lambda s: s.p_source
    )


CLASSIFIERS = {
    MappingClass.CRR: classify_crr,
    MappingClass.GEN_CRR: classify_gen_crr,
    MappingClass.GEN_KANNAN: classify_gen_kannan,
    MappingClass.PERIM: classify_perimeter,
}


def classify(mapping_class, space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> Certificate:
    if isinstance(mapping_class, str) and mapping_class in CLASS_ALIASES:
        mapping_class = CLASS_ALIASES[mapping_class]
    return CLASSIFIERS[MappingClass(mapping_class)](space, T, tol)


def gen_crr_axis_optimum(space: FiniteMetricSpace, T: SelfMap, fixed: str, tol: float = DEFAULT_TOL) -> LPResult:
    """Minimize the free coefficient of the three-point CRR system with the other pinned to 0.

    ``fixed="lambda"`` leaves only the perimeter term, ``fixed="alpha"`` only
    the displacement term.
    """
    _need_three(space, T, "the generalized CRR class")
    if fixed not in ("alpha", "lambda"):
        raise ValueError(f"fixed must be 'alpha' or 'lambda', not {fixed!r}")
    col = 0 if fixed == "lambda" else 1
    _, rows = gen_crr_constraints(space, T)
    one = 1 if space.exact else 1.0
    return solve_linear_feasibility([((c[col],), r) for c, r in rows], (one,), 1, tol, space.exact)


def gen_crr_widened(space: FiniteMetricSpace, T: SelfMap) -> tuple:
    """Does the three-point CRR system admit some alpha < 1/2 and lambda < 1?

    No bound is placed on ``2 alpha + 3 lambda / 2``.  The region is upward
    closed, so such a point exists iff every triple has
    ``P_T < P_d / 2 + S``.  Returns ``(ok, failing_triples)``.
    """
    _need_three(space, T, "the generalized CRR class")
    bad = []
    for t in _triples(space.n):
        s = triple_sums(space, T, *t)
        if not 2 * s.p_image < s.p_source + 2 * s.displacement:
            bad.append(t)
    return not bad, tuple(bad)


def gen_crr_slacks(space: FiniteMetricSpace, T: SelfMap, alpha, lam) -> list:
    """``(triple, RHS - LHS)`` for every triple at the given coefficients."""
    out = []
    for t in _triples(space.n):
        s = triple_sums(space, T, *t)
        out.append((t, alpha * s.p_source + lam * s.displacement - s.p_image))
    return out


def crr_slacks(space: FiniteMetricSpace, T: SelfMap, a, b, c) -> list:
    d = space.dist
    return [
        ((x, y), a * d[x][y] + b * d[x][T[x]] + c * d[y][T[y]] - d[T[x]][T[y]])
        for x, y in permutations(range(space.n), 2)
    ]
