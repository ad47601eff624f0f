import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from fpl.lp import UnsupportedDimension, solve_linear_feasibility


def test_single_constraint_two_vertices():
    # vertices (2/21, 0) -> 4/21 and (0, 1/5) -> 3/10
    res = solve_linear_feasibility([((21, 10), 2)], (2, F(3, 2)), 2)
    assert res.feasible
    assert res.min_value == F(4, 21)
    assert res.argmin == (F(2, 21), 0)
    assert res.active == (0,)


def test_no_constraints():
    res = solve_linear_feasibility([], (1, 1, 1), 3)
    assert res.feasible and res.min_value == 0 and res.argmin == (0, 0, 0)


def test_unsatisfiable_row():
    res = solve_linear_feasibility([((0,), 1)], (1,), 1)
    assert not res.feasible and res.argmin is None


def test_zero_row_with_zero_rhs_is_harmless():
    res = solve_linear_feasibility([((0, 0), 0), ((1, 1), 1)], (1, 2), 2)
    assert res.min_value == 1 and res.argmin == (1, 0)
    assert res.active == (0, 1)


def test_dimension_limit():
    with pytest.raises(UnsupportedDimension):
        solve_linear_feasibility([], (1, 1, 1, 1), 4)


def test_negative_input_rejected():
    with pytest.raises(ValueError):
        solve_linear_feasibility([((1, -1), 1)], (1, 1), 2)


def test_tie_breaking_is_lexicographic():
    # every point on a + b = 1 is optimal for objective (1, 1)
    res = solve_linear_feasibility([((1, 1), 1)], (1, 1), 2)
    assert res.argmin == (0, 1)
    res = solve_linear_feasibility([((1, 1), 1)], (0, 0), 2)
    assert res.argmin == (0, 1)


def test_float_mode_matches_exact():
    rows = [((3, 1, 2), 2), ((1, 4, 0), 1), ((0, 1, 5), 3)]
    ex = solve_linear_feasibility(rows, (1, 1, 1), 3)
    fl = solve_linear_feasibility([(tuple(float(x) for x in c), float(r)) for c, r in rows], (1.0, 1.0, 1.0), 3)
    assert fl.min_value == pytest.approx(float(ex.min_value), abs=1e-12)
    assert fl.argmin == pytest.approx([float(x) for x in ex.argmin], abs=1e-12)
    assert fl.active == ex.active


def _scipy_min(rows, w, dim):
    if not rows:
        return 0.0
    A = [[-float(x) for x in c] for c, _ in rows]
    b = [-float(r) for _, r in rows]
    out = linprog([float(x) for x in w], A_ub=A, b_ub=b, bounds=[(0, None)] * dim, method="highs")
    assert out.status == 0
    return out.fun


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3), st.integers(0, 12), st.integers(0, 2**32))
def test_matches_scipy(dim, m, seed):
    rng = random.Random(seed)
    rows = []
    for _ in range(m):
        c = tuple(F(rng.choice([0, 0, 1, 2, 3, 5, 7, 10]), rng.randint(1, 3)) for _ in range(dim))
        if not any(c):
            c = (F(1),) + c[1:]
        rows.append((c, F(rng.randint(0, 12), rng.randint(1, 4))))
    w = tuple(F(rng.randint(0, 4), 2) for _ in range(dim))
    res = solve_linear_feasibility(rows, w, dim)
    assert res.feasible
    assert float(res.min_value) == pytest.approx(_scipy_min(rows, w, dim), abs=1e-7)
    # argmin satisfies every row exactly and realises the reported value
    v = res.argmin
    assert all(x >= 0 for x in v)
    assert all(sum(a * b for a, b in zip(c, v)) >= r for c, r in rows)
    assert sum(a * b for a, b in zip(w, v)) == res.min_value
    assert res.active == tuple(i for i, (c, r) in enumerate(rows) if sum(a * b for a, b in zip(c, v)) == r)
