import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpl.classify import SelfMap, classify_crr, classify_gen_crr
from fpl.dsl import parse_map
from fpl.metric import FiniteMetricSpace, euclidean_space, metric_closure
from fpl.orbit import (
    COUNTEREXAMPLE,
    PREMISES_UNMET,
    VERIFIED,
    DomainError,
    IterationError,
    cauchy_bound,
    certified_run,
    continuity_audit,
    fixed_points,
    gamma_of,
    gap_bound,
    iterate_real,
    orbit_finite,
    period2_points,
)

from oracles import brute_orbit

EX23 = FiniteMetricSpace.from_matrix([[0, 1, 10], [1, 0, 10], [10, 10, 0]], ["x", "y", "z"])
EX23_MAP = SelfMap((0, 1, 0))
LINE3 = euclidean_space([(0,), (1,), (2,)])


def test_fixed_points():
    assert fixed_points(EX23_MAP) == {0, 1}
    assert fixed_points(SelfMap((0, 1, 2))) == {0, 1, 2}
    assert fixed_points(SelfMap((1, 2, 0))) == frozenset()


def test_period2_points():
    assert period2_points(SelfMap((1, 0, 2))) == {0, 1}
    assert period2_points(SelfMap((1, 2, 0))) == frozenset()
    assert period2_points(EX23_MAP) == frozenset()


def test_orbit_ex23():
    rep = orbit_finite(EX23, EX23_MAP, 2)
    assert rep.sequence == (2, 0) and rep.gaps == (10,)
    assert (rep.outcome.kind, rep.outcome.index, rep.outcome.step) == ("fixed_point", 0, 1)
    assert rep.to_json(EX23)["labels"] == ["z", "x"]


def test_orbit_cycles():
    rep = orbit_finite(LINE3, SelfMap((1, 2, 0)), 0)
    assert rep.sequence == (0, 1, 2)
    assert (rep.outcome.kind, rep.outcome.index, rep.outcome.step) == ("cycle", 0, 3)
    two = FiniteMetricSpace.from_matrix([[0, 1], [1, 0]])
    rep = orbit_finite(two, SelfMap((1, 0)), 0)
    assert (rep.outcome.kind, rep.outcome.index, rep.outcome.step) == ("cycle", 0, 2)


def test_orbit_tail_entry():
    space = euclidean_space([(k,) for k in range(4)])
    rep = orbit_finite(space, SelfMap((1, 2, 3, 2)), 0)
    assert rep.sequence == (0, 1, 2, 3)
    assert (rep.outcome.index, rep.outcome.step) == (2, 2)


def test_orbit_truncation():
    rep = orbit_finite(LINE3, SelfMap((1, 2, 2)), 0, max_steps=1)
    assert rep.truncated and rep.outcome is None and rep.sequence == (0, 1)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 9).flatmap(lambda n: st.tuples(st.lists(st.integers(0, n - 1), min_size=n, max_size=n),
                                                      st.integers(0, n - 1))))
def test_orbit_matches_bruteforce(data):
    image, start = data
    n = len(image)
    space = euclidean_space([(k,) for k in range(n)])
    rep = orbit_finite(space, SelfMap(tuple(image)), start)
    walk = brute_orbit(image, start)
    assert list(rep.sequence) == walk[: len(rep.sequence)]
    assert len(rep.gaps) == len(rep.sequence) - 1
    last = rep.sequence[-1]
    assert (rep.outcome.kind == "fixed_point") == (image[last] == last)
    if rep.outcome.kind == "cycle":
        entry, period = rep.outcome.index, rep.outcome.step
        assert walk[entry] == walk[entry + period]
        assert len(set(walk[entry:entry + period])) == period


def test_gamma_of():
    assert gamma_of(0, 0) == 0
    assert gamma_of(F(2, 21), 0) == F(4, 21)
    assert gamma_of(0.25, 0.3) == pytest.approx(0.941176470588235294, abs=1e-15)
    with pytest.raises(DomainError):
        gamma_of(0, 2)


def test_gamma_admissibility_grid():
    for i in range(0, 61):
        for j in range(0, 81):
            alpha, lam = F(i, 60), F(j, 60)
            assert (2 * alpha + F(3, 2) * lam < 1) == (gamma_of(alpha, lam) < 1)


def test_cauchy_bound():
    assert cauchy_bound(1, 0, 3) == 0
    assert cauchy_bound(1, 0.25, 3) == pytest.approx(0.5, abs=1e-15)
    assert cauchy_bound(10, F(4, 21), 5) == pytest.approx(0.643780741948228465, rel=1e-14)
    with pytest.raises(DomainError):
        cauchy_bound(1, 1, 3)
    with pytest.raises(DomainError):
        cauchy_bound(1, 0.5, 2)


def test_gap_bound():
    assert gap_bound(2, 0.25, 4) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        gap_bound(1, 0.5, 2)


def test_certified_run_ex23():
    cert = classify_gen_crr(EX23, EX23_MAP)
    run = certified_run(EX23, EX23_MAP, cert, 2)
    assert run.verdict == VERIFIED
    assert run.fixed_points == (0, 1)
    assert run.gamma == F(4, 21)
    assert run.a == 10


def test_certified_run_premises():
    ident = SelfMap((0, 1, 2))
    run = certified_run(LINE3, ident, classify_gen_crr(LINE3, ident), 0)
    assert run.verdict == PREMISES_UNMET and "infeasible" in run.reasons[0]
    swap = SelfMap((1, 0, 0))
    space = euclidean_space([(0,), (1,), (5,)])
    run = certified_run(space, swap, classify_gen_crr(space, swap), 2)
    assert run.verdict == PREMISES_UNMET


def test_certified_run_wrong_class():
    with pytest.raises(ValueError, match="GEN_CRR"):
        certified_run(EX23, EX23_MAP, classify_crr(EX23, EX23_MAP), 0)


def test_counterexample_detected_with_forged_certificate():
    # a cycle under a certificate claiming feasibility must not be verified
    import dataclasses

    T = SelfMap((1, 2, 0))
    cert = classify_gen_crr(LINE3, SelfMap((0, 0, 0)))
    forged = dataclasses.replace(cert, coefficients={"alpha": F(1, 10), "lambda": 0})
    run = certified_run(LINE3, T, forged, 0)
    assert run.verdict == COUNTEREXAMPLE
    assert any("cycle" in r for r in run.reasons)


def _random_instance(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 7)
    w = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = F(rng.randint(1, 10), rng.randint(1, 2))
    space = metric_closure(w)
    k = rng.randint(1, 2)
    sinks = rng.sample(range(n), k)
    img = [rng.choice(sinks + [rng.randrange(n)]) for _ in range(n)]
    for s in sinks:
        img[s] = s
    return space, SelfMap(tuple(img))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_certified_maps_verify_from_every_start(seed):
    space, T = _random_instance(seed)
    cert = classify_gen_crr(space, T)
    for s in range(space.n):
        run = certified_run(space, T, cert, s)
        assert run.verdict != COUNTEREXAMPLE, run.reasons
        if run.verdict == VERIFIED:
            assert 1 <= len(run.fixed_points) <= 2


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_continuity_bound_on_certified_maps(seed):
    space, T = _random_instance(seed)
    cert = classify_gen_crr(space, T)
    if cert.feasible and cert.coefficients["lambda"] < 1:
        audits = continuity_audit(space, T, cert.coefficients["alpha"], cert.coefficients["lambda"])
        assert all(a.passed for a in audits)


def test_continuity_audit_domain():
    with pytest.raises(DomainError):
        continuity_audit(EX23, EX23_MAP, 0, 1)
    audits = continuity_audit(EX23, EX23_MAP, F(2, 21), 0)
    # fixed point x: pair (y, z); fixed point y: pair (x, z)
    assert [a.n for a in audits] == [(0, 1, 2), (1, 0, 2)]
    assert all(a.passed for a in audits)


def test_iterate_ex22():
    T = parse_map("piecewise(x < 1 : x/4 ; 1/8)")
    rep = iterate_real(T, 1.0)
    assert rep.iterates[:3] == (1.0, 0.125, 0.03125)
    assert rep.converged and rep.asymptotically_regular
    assert rep.iterations == 21 and rep.final_gap <= 1e-12


def test_iterate_ex24():
    rep = iterate_real(parse_map("9*x/10"), 1.0)
    assert rep.converged
    for n, g in enumerate(rep.gaps[:20]):
        assert g == pytest.approx(0.1 * 0.9**n, rel=1e-12)


def test_iterate_two_cycle():
    rep = iterate_real(parse_map("1 - x"), 0.2, max_iter=1000)
    assert not rep.converged and not rep.asymptotically_regular
    assert rep.iterations == 1000
    assert all(math.isclose(g, 0.6, rel_tol=1e-12) for g in rep.gaps)


def test_iterate_error_carries_step():
    # 2 -> 1 -> division by zero at the second step
    with pytest.raises(IterationError) as e:
        iterate_real(parse_map("1/(x - 1)"), 2.0, max_iter=10)
    assert e.value.step == 2
    with pytest.raises(IterationError) as e:
        iterate_real(parse_map("sqrt(x - 1)"), 0.5)
    assert e.value.step == 1
