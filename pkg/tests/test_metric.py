import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpl.metric import (
    DIAGONAL,
    INDISCERNIBLE,
    NEGATIVE,
    SYMMETRY,
    TRIANGLE,
    FiniteMetricSpace,
    MetricError,
    euclidean_space,
    metric_closure,
    validate_metric,
)
from fpl.numeric import ModeError

from oracles import shortest_paths_bruteforce

EX23 = [[0, 1, 10], [1, 0, 10], [10, 10, 0]]


def test_validate_accepts_ex23():
    rep = validate_metric(EX23)
    assert rep.ok and rep.violations == ()


def test_validate_nonzero_diagonal():
    rep = validate_metric([[0, 1], [1, 1]])
    assert not rep.ok
    assert (DIAGONAL, (1, 1), 1) in rep.violations


def test_validate_triangle():
    rep = validate_metric([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert rep.violations == ((TRIANGLE, (0, 2, 1), 1),)


def test_validate_reports_negative_without_raising():
    rep = validate_metric([[0, -1], [-1, 0]])
    kinds = {k for k, _, _ in rep.violations}
    assert NEGATIVE in kinds and INDISCERNIBLE in kinds


def test_validate_symmetry_and_order():
    rep = validate_metric([[0, 1, 2], [1, 0, 1], [2.5, 1, 0]], tol=1e-9)
    assert [v[1] for v in rep.violations] == sorted(v[1] for v in rep.violations)
    assert (SYMMETRY, (0, 2), 0.5) in rep.violations


def test_validate_non_square():
    with pytest.raises(ValueError, match="square"):
        validate_metric([[0, 1], [1]])


def test_float_tolerance():
    eps = 1e-12
    d = [[0, 1, 2 + eps], [1, 0, 1], [2 + eps, 1, 0]]
    assert validate_metric(d, tol=1e-9).ok
    assert not validate_metric(d, tol=1e-15).ok


def test_exact_mode_is_strict():
    d = [[0, 1, F(2) + F(1, 10**12)], [1, 0, 1], [F(2) + F(1, 10**12), 1, 0]]
    assert not validate_metric(d, tol=1.0).ok


def test_mixing_modes_is_an_error():
    with pytest.raises(ModeError):
        validate_metric([[0, F(1)], [1.0, 0]])


def test_from_matrix_rejects_and_keeps_report():
    with pytest.raises(MetricError) as e:
        FiniteMetricSpace.from_matrix([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert e.value.report.violations[0][0] == TRIANGLE


def test_from_matrix_labels():
    s = FiniteMetricSpace.from_matrix(EX23, ["x", "y", "z"])
    assert s.n == 3 and s.exact and s.index("z") == 2
    assert s.d(0, 2) == 10 and isinstance(s.d(0, 2), F)
    with pytest.raises(ValueError):
        FiniteMetricSpace.from_matrix(EX23, ["x", "x", "z"])


def test_point_limit():
    with pytest.raises(ValueError, match="limit"):
        FiniteMetricSpace.from_matrix([[0, 1], [1, 0]], max_points=1)


def test_euclidean_1d():
    s = euclidean_space([(F(0),), (F(1, 2),), (F(1),)])
    assert s.exact
    assert s.dist == ((0, F(1, 2), 1), (F(1, 2), 0, F(1, 2)), (1, F(1, 2), 0))


def test_euclidean_345():
    s = euclidean_space([(0, 0), (3, 4)])
    assert s.exact and s.dist[0][1] == 5


def test_euclidean_irrational_falls_back_to_float():
    s = euclidean_space([(0, 0), (1, 1), (2, 0)])
    assert not s.exact
    assert s.dist[0][1] == pytest.approx(2**0.5)


def test_euclidean_duplicate():
    with pytest.raises(ValueError, match="duplicate"):
        euclidean_space([(0,), (0,)])


def test_closure_repairs_triangle():
    s = metric_closure([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert s.dist == ((0, 1, 2), (1, 0, 1), (2, 1, 0))


def test_closure_keeps_metric():
    assert metric_closure(EX23).dist == tuple(tuple(F(v) for v in r) for r in EX23)
    assert metric_closure([[0, 2], [2, 0]]).dist == ((0, 2), (2, 0))


def test_closure_rejects_zero_weight():
    with pytest.raises(ValueError):
        metric_closure([[0, 0], [0, 0]])


def _random_weights(rng, n):
    w = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = F(rng.randint(1, 20), rng.randint(1, 4))
    return w


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32))
def test_closure_matches_bruteforce_and_is_metric(n, seed):
    w = _random_weights(random.Random(seed), n)
    s = metric_closure(w)
    assert [list(r) for r in s.dist] == shortest_paths_bruteforce(w)
    assert validate_metric(s.dist).ok
    assert all(s.dist[i][j] <= w[i][j] for i in range(n) for j in range(n))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32))
def test_closure_idempotent(n, seed):
    s = metric_closure(_random_weights(random.Random(seed), n))
    assert metric_closure(s.dist).dist == s.dist


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32))
def test_closure_relabeling_equivariance(n, seed):
    rng = random.Random(seed)
    w = _random_weights(rng, n)
    perm = list(range(n))
    rng.shuffle(perm)
    pw = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            pw[perm[i]][perm[j]] = w[i][j]
    a, b = metric_closure(w), metric_closure(pw)
    assert all(b.dist[perm[i]][perm[j]] == a.dist[i][j] for i in range(n) for j in range(n))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=2, max_size=8, unique=True))
def test_euclidean_always_valid(points):
    s = euclidean_space(points)
    assert validate_metric(s.dist, exact=s.exact).ok


def test_permuted_space():
    s = FiniteMetricSpace.from_matrix(EX23, ["x", "y", "z"])
    p = s.permuted([2, 0, 1])
    assert p.labels == ("y", "z", "x")
    assert p.dist[2][1] == s.dist[0][2]
