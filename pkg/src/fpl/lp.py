"""Exact low-dimensional linear feasibility by vertex enumeration.

Problems have the form::

    minimize  w . v   subject to  c_i . v >= r_i,  v >= 0

with all ``c_i``, ``r_i`` and ``w`` nonnegative and ``dim <= 3``.  The
feasible region is upward closed inside the nonnegative orthant, so an
optimum sits at a vertex cut out by ``dim`` of the hyperplanes
``c_i . v = r_i`` and ``v_k = 0``.  Every such choice is tried.

In exact mode every row is scaled to integers and vertices are compared by
cross-multiplication, so no rounding happens anywhere.  Rows implied by
another row are dropped before enumeration; they cannot change the region.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Optional, Sequence

from .numeric import DEFAULT_TOL, Scalar, infer_exact, to_scalar


class UnsupportedDimension(ValueError):
    pass


@dataclass(frozen=True)
class LPResult:
    feasible: bool
    min_value: Optional[Scalar]
    argmin: Optional[tuple]
    active: tuple = ()


def _det2(a, b, c, d):
    return a * d - b * c


def _det3(m):
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _cramer(rows, rhs):
    """Return (D, numerators) with v = numerators / D, or None if singular."""
    dim = len(rows)
    if dim == 1:
        return rows[0][0], (rhs[0],)
    if dim == 2:
        (a, b), (c, d) = rows
        return _det2(a, b, c, d), (_det2(rhs[0], b, rhs[1], d), _det2(a, rhs[0], c, rhs[1]))
    D = _det3(rows)
    nums = []
    for k in range(3):
        m = [list(r) for r in rows]
        for i in range(3):
            m[i][k] = rhs[i]
        nums.append(_det3(m))
    return D, tuple(nums)


def _int_row(c, r):
    den = lcm(*(Fraction(x).denominator for x in (*c, r)))
    return tuple(int(Fraction(x) * den) for x in c), int(Fraction(r) * den)


def _prune(rows):
    """Indices of rows not implied by another row (ties keep the first).

    Row j implies row i (both with positive rhs) when r_j * c_i >= r_i * c_j
    componentwise.
    """
    keep = []
    for i, (ci, ri) in enumerate(rows):
        implied = False
        for j, (cj, rj) in enumerate(rows):
            if i == j:
                continue
            if all(rj * a >= ri * b for a, b in zip(ci, cj)):
                mutual = all(ri * b >= rj * a for a, b in zip(ci, cj))
                if not mutual or j < i:
                    implied = True
                    break
        if not implied:
            keep.append(i)
    return keep


def solve_linear_feasibility(
    constraints: Sequence[tuple],
    objective: Sequence,
    dim: int,
    tol: float = DEFAULT_TOL,
    exact: Optional[bool] = None,
) -> LPResult:
    """Minimize ``objective . v`` over ``{v >= 0 : c . v >= r for (c, r) in constraints}``.

    Returns the lexicographically smallest optimal vertex and the indices of
    the constraints active there.  Infeasible exactly when some constraint
    has ``c = 0`` and ``r > 0``.
    """
    if dim not in (1, 2, 3):
        raise UnsupportedDimension(f"dimension {dim} not supported (1..3)")
    if len(objective) != dim:
        raise ValueError("objective length does not match dim")
    for c, r in constraints:
        if len(c) != dim:
            raise ValueError("constraint length does not match dim")
    if exact is None:
        exact = infer_exact([*objective, *(x for c, r in constraints for x in (*c, r))])
    cons = [(tuple(to_scalar(x, exact) for x in c), to_scalar(r, exact)) for c, r in constraints]
    w = tuple(to_scalar(x, exact) for x in objective)
    if any(x < 0 for x in w) or any(x < 0 for c, r in cons for x in (*c, r)):
        raise ValueError("coefficients, right-hand sides and objective must be nonnegative")

    live = []
    for c, r in cons:
        if all(x == 0 for x in c):
            if r > (0 if exact else tol):
                return LPResult(False, None, None, ())
            continue
        if r > 0:
            live.append((c, r))

    if exact:
        rows = [_int_row(c, r) for c, r in live]
        wden = lcm(*(x.denominator for x in w))
        wi = tuple(int(x * wden) for x in w)
        best = _enumerate_exact(rows, wi, dim)
        v = tuple(Fraction(n, best[0]) for n in best[1])
        value = sum(a * b for a, b in zip(w, v))
        active = tuple(i for i, (c, r) in enumerate(cons) if sum(a * b for a, b in zip(c, v)) == r)
    else:
        v = _enumerate_float(live, w, dim, tol)
        value = sum(a * b for a, b in zip(w, v))
        active = tuple(
            i for i, (c, r) in enumerate(cons)
            if abs(sum(a * b for a, b in zip(c, v)) - r) <= tol * max(1.0, abs(r))
        )
    return LPResult(True, value, v, active)


def _hyperplanes(rows, dim, zero):
    planes = [(c, r) for c, r in rows]
    for k in range(dim):
        planes.append((tuple(1 if j == k else zero for j in range(dim)), zero))
    return planes


def _enumerate_exact(rows, w, dim):
    keep = [rows[i] for i in _prune(rows)]
    planes = _hyperplanes(keep, dim, 0)
    best = None  # (D, nums, wn)
    for combo in combinations(planes, dim):
        D, nums = _cramer([p[0] for p in combo], [p[1] for p in combo])
        if D == 0:
            continue
        if D < 0:
            D, nums = -D, tuple(-x for x in nums)
        if any(x < 0 for x in nums):
            continue
        if any(sum(a * b for a, b in zip(c, nums)) < r * D for c, r in keep):
            continue
        wn = sum(a * b for a, b in zip(w, nums))
        if best is None:
            best = (D, nums, wn)
            continue
        bD, bnums, bwn = best
        lhs, rhs = wn * bD, bwn * D
        if lhs < rhs or (lhs == rhs and [x * bD for x in nums] < [x * D for x in bnums]):
            best = (D, nums, wn)
    return best


def _enumerate_float(rows, w, dim, tol):
    rows = [(tuple(float(x) for x in c), float(r)) for c, r in rows]
    keep = [rows[i] for i in _prune(rows)]
    planes = _hyperplanes(keep, dim, 0.0)
    best = None
    best_val = None
    for combo in combinations(planes, dim):
        mat = [p[0] for p in combo]
        D, nums = _cramer(mat, [p[1] for p in combo])
        scale = 1.0
        for row in mat:
            scale *= max(1.0, max(abs(x) for x in row))
        if abs(D) <= 1e-12 * scale:
            continue
        v = tuple(x / D for x in nums)
        if any(x < -tol for x in v):
            continue
        v = tuple(max(0.0, x) for x in v)
        if any(sum(a * b for a, b in zip(c, v)) < r - tol * max(1.0, r) for c, r in keep):
            continue
        val = sum(a * b for a, b in zip(w, v))
        if best is None:
            best, best_val = v, val
            continue
        eps = 1e-12 * max(1.0, abs(best_val))
        if val < best_val - eps or (abs(val - best_val) <= eps and v < best):
            best, best_val = v, val
    return best
