"""Picard iteration on finite and real spaces, with convergence-bound audits.

For a three-point CRR map with coefficients (alpha, lambda) and no points of
prime period 2, an orbit ``x_0, x_1 = T x_0, ...`` with gaps
``a_n = d(x_{n-1}, x_n)`` obeys

* ``a_{n+2} <= gamma * max(a_n, a_{n+1})`` whenever ``x_{n-1}, x_n, x_{n+1}``
  are pairwise distinct, with ``gamma = 2(2 alpha + lambda) / (2 - lambda)``;
* ``a_n <= gamma^(n/2 - 1) * a`` for n >= 3, where ``a = max(a_1, a_2)``;
* ``d(x_n, x*) <= a gamma^((n-1)/2) / (1 - sqrt(gamma))`` for n >= 3.

:func:`certified_run` measures a realised finite orbit against all three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .classify import Certificate, MappingClass, SelfMap
from .metric import FiniteMetricSpace
from .numeric import DEFAULT_TOL, fmt_scalar

VERIFIED = "verified"
PREMISES_UNMET = "premises_unmet"
COUNTEREXAMPLE = "counterexample"


class DomainError(ValueError):
    pass


def fixed_points(T: SelfMap) -> frozenset:
    return frozenset(i for i, t in enumerate(T.image) if t == i)


def period2_points(T: SelfMap) -> frozenset:
    """Points of prime period 2: ``T(T(i)) == i`` and ``T(i) != i``."""
    img = T.image
    return frozenset(i for i, t in enumerate(img) if t != i and img[t] == i)


@dataclass(frozen=True)
class Outcome:
    kind: str  # "fixed_point" | "cycle"
    index: int  # the fixed point, or the cycle entry step
    step: int  # step reaching the fixed point, or the cycle period

    def to_json(self) -> dict:
        if self.kind == "fixed_point":
            return {"kind": self.kind, "point": self.index, "step": self.step}
        return {"kind": self.kind, "entry": self.index, "period": self.step}


def fixed_point_outcome(index: int, step: int) -> Outcome:
    return Outcome("fixed_point", index, step)


def cycle_outcome(entry: int, period: int) -> Outcome:
    return Outcome("cycle", entry, period)


@dataclass(frozen=True)
class OrbitReport:
    start: int
    sequence: tuple
    gaps: tuple
    outcome: Optional[Outcome]
    truncated: bool = False

    def to_json(self, space: Optional[FiniteMetricSpace] = None) -> dict:
        out = {
            "start": self.start,
            "sequence": list(self.sequence),
            "gaps": [fmt_scalar(g) for g in self.gaps],
            "outcome": self.outcome.to_json() if self.outcome else None,
            "truncated": self.truncated,
        }
        if space is not None:
            out["labels"] = [space.labels[i] for i in self.sequence]
        return out


def orbit_finite(space: FiniteMetricSpace, T: SelfMap, start: int, max_steps: Optional[int] = None) -> OrbitReport:
    """Iterate from ``start`` until a fixed point or the first revisited point."""
    if not 0 <= start < space.n:
        raise IndexError(f"start index {start} out of range")
    if T.n != space.n:
        raise ValueError(f"map has {T.n} entries for a {space.n}-point space")
    seen = {start: 0}
    seq = [start]
    outcome = None
    while True:
        cur = seq[-1]
        nxt = T[cur]
        if nxt == cur:
            outcome = fixed_point_outcome(cur, len(seq) - 1)
            break
        if nxt in seen:
            outcome = cycle_outcome(seen[nxt], len(seq) - seen[nxt])
            break
        if max_steps is not None and len(seq) - 1 >= max_steps:
            break
        seen[nxt] = len(seq)
        seq.append(nxt)
    gaps = tuple(space.dist[a][b] for a, b in zip(seq, seq[1:]))
    return OrbitReport(start, tuple(seq), gaps, outcome, outcome is None)


def gamma_of(alpha, lam):
    """Gap contraction factor ``2(2 alpha + lambda) / (2 - lambda)``."""
    if lam >= 2:
        raise DomainError(f"lambda must be below 2, got {lam}")
    return 2 * (2 * alpha + lam) / (2 - lam)


def gap_bound(a, gamma, n: int) -> float:
    """Per-gap bound ``a * gamma^(n/2 - 1)``, n >= 3."""
    if n < 3:
        raise DomainError("the per-gap bound is stated for n >= 3")
    return float(a) * float(gamma) ** (n / 2 - 1)


def cauchy_bound(a, gamma, n: int) -> float:
    """Tail bound ``a * gamma^((n-1)/2) / (1 - sqrt(gamma))`` on ``d(x_n, x_{n+p})``."""
    if not 0 <= gamma < 1:
        raise DomainError(f"gamma must lie in [0, 1), got {gamma}")
    if n < 3:
        raise DomainError("the tail bound is stated for n >= 3")
    g = float(gamma)
    return float(a) * g ** ((n - 1) / 2) / (1 - math.sqrt(g))


@dataclass(frozen=True)
class Audit:
    kind: str  # gap_law | per_gap | cauchy | continuity
    n: object  # step index, or (fixed point, u, v) for continuity
    bound: object
    observed: object
    passed: bool

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": list(self.n) if isinstance(self.n, tuple) else self.n,
            "bound": fmt_scalar(self.bound),
            "observed": fmt_scalar(self.observed),
            "pass": self.passed,
        }


@dataclass(frozen=True)
class CertifiedRun:
    orbit: OrbitReport
    alpha: object
    lam: object
    gamma: object
    a: object
    audits: tuple
    fixed_points: tuple
    verdict: str
    reasons: tuple = ()

    @property
    def failures(self) -> tuple:
        return tuple(x for x in self.audits if not x.passed)

    def to_json(self, space: Optional[FiniteMetricSpace] = None) -> dict:
        return {
            "orbit": self.orbit.to_json(space),
            "alpha": fmt_scalar(self.alpha),
            "lambda": fmt_scalar(self.lam),
            "gamma": fmt_scalar(self.gamma),
            "a": fmt_scalar(self.a),
            "audits": [x.to_json() for x in self.audits],
            "fixed_points": list(self.fixed_points),
            "verdict": self.verdict,
            "reasons": list(self.reasons),
        }


def _leq(observed, bound, tol) -> bool:
    if isinstance(observed, Fraction) and isinstance(bound, Fraction):
        return observed <= bound + Fraction(tol)
    return float(observed) <= float(bound) + tol


def certified_run(
    space: FiniteMetricSpace, T: SelfMap, cert: Certificate, start: int, tol: float = DEFAULT_TOL
) -> CertifiedRun:
    """Run the orbit from ``start`` and audit it against the certificate's bounds."""
    if cert.mapping_class is not MappingClass.GEN_CRR:
        raise ValueError(f"certified runs need a GEN_CRR certificate, got {cert.mapping_class.value}")
    if space.n < 3:
        raise ValueError("certified runs need at least 3 points")
    orbit = orbit_finite(space, T, start)
    fps = tuple(sorted(fixed_points(T)))
    alpha = cert.coefficients.get("alpha")
    lam = cert.coefficients.get("lambda")
    reasons = []
    if not cert.feasible:
        reasons.append("certificate infeasible")
    p2 = period2_points(T)
    if p2:
        reasons.append(f"points of prime period 2: {sorted(p2)}")
    if reasons:
        return CertifiedRun(orbit, alpha, lam, None, None, (), fps, PREMISES_UNMET, tuple(reasons))

    gamma = gamma_of(alpha, lam)
    seq = orbit.sequence
    m = len(seq) - 1
    fixed = orbit.outcome is not None and orbit.outcome.kind == "fixed_point"
    zero = space.dist[0][0]

    def x(k):
        return seq[k] if k <= m else seq[m]

    def gap(k):  # a_k, zero once the orbit rests at its fixed point
        return orbit.gaps[k - 1] if k <= m else zero

    a = max(gap(1), gap(2))
    audits = []
    for n in range(1, m):
        if len({x(n - 1), x(n), x(n + 1)}) < 3:
            continue
        bound = gamma * max(gap(n), gap(n + 1))
        audits.append(Audit("gap_law", n, bound, gap(n + 2), _leq(gap(n + 2), bound, tol)))
    for n in range(3, m + 1):
        bound = gap_bound(a, gamma, n)
        audits.append(Audit("per_gap", n, bound, gap(n), _leq(gap(n), bound, tol)))
    if fixed:
        star = orbit.outcome.index
        for n in range(3, m + 1):
            bound = cauchy_bound(a, gamma, n)
            observed = space.dist[seq[n]][star]
            audits.append(Audit("cauchy", n, bound, observed, _leq(observed, bound, tol)))
    else:
        reasons.append("orbit enters a cycle instead of a fixed point")
    if not 1 <= len(fps) <= 2:
        reasons.append(f"{len(fps)} fixed points")
    if any(not x_.passed for x_ in audits):
        reasons.append("bound audit failed")
    verdict = COUNTEREXAMPLE if reasons else VERIFIED
    return CertifiedRun(orbit, alpha, lam, gamma, a, tuple(audits), fps, verdict, tuple(reasons))


def continuity_audit(space: FiniteMetricSpace, T: SelfMap, alpha, lam, tol: float = DEFAULT_TOL) -> tuple:
    """Check ``d(x*,Tu) + d(x*,Tv) <= (2a+l)/(1-l) (d(u,x*) + d(v,x*))`` exhaustively.

    Runs over every fixed point x* and unordered pair of distinct u, v other
    than x*.  Needs ``lam < 1``.
    """
    if lam >= 1:
        raise DomainError(f"lambda must be below 1, got {lam}")
    d = space.dist
    factor = (2 * alpha + lam) / (1 - lam)
    out = []
    for s in sorted(fixed_points(T)):
        others = [i for i in range(space.n) if i != s]
        for u, v in combinations(others, 2):
            observed = d[s][T[u]] + d[s][T[v]]
            bound = factor * (d[u][s] + d[v][s])
            out.append(Audit("continuity", (s, u, v), bound, observed, _leq(observed, bound, tol)))
    return tuple(out)


@dataclass(frozen=True)
class RealOrbitReport:
    iterates: tuple
    gaps: tuple
    converged: bool
    final_gap: Optional[float]
    iterations: int
    asymptotically_regular: bool

    def to_json(self, max_items: Optional[int] = None) -> dict:
        its, gaps = list(self.iterates), list(self.gaps)
        if max_items is not None:
            its, gaps = its[:max_items], gaps[:max_items]
        return {
            "iterates": its,
            "gaps": gaps,
            "converged": self.converged,
            "final_gap": self.final_gap,
            "iterations": self.iterations,
            "asymptotically_regular": self.asymptotically_regular,
        }


class IterationError(ArithmeticError):
    def __init__(self, step: int, cause: Exception):
        self.step = step
        super().__init__(f"evaluation failed at step {step}: {cause}")


def iterate_real(T, x0: float, tol: float = 1e-12, max_iter: int = 100_000) -> RealOrbitReport:
    """Float Picard iteration ``x_{k+1} = T(x_k)`` until a gap is at most ``tol``.

    The asymptotic-regularity flag is the empirical one: some gap fell to
    ``tol`` within ``max_iter`` steps.
    """
    x = float(x0)
    iterates = [x]
    gaps = []
    converged = False
    for step in range(1, max_iter + 1):
        try:
            nxt = float(T.evaluate(x) if hasattr(T, "evaluate") else T(x))
        except (ArithmeticError, ValueError) as e:
            raise IterationError(step, e) from e
        if not math.isfinite(nxt):
            raise IterationError(step, OverflowError(f"non-finite iterate {nxt!r}"))
        gap = abs(nxt - x)
        iterates.append(nxt)
        gaps.append(gap)
        x = nxt
        if gap <= tol:
            converged = True
            break
    return RealOrbitReport(
        tuple(iterates), tuple(gaps), converged, gaps[-1] if gaps else None, len(gaps), converged
    )
