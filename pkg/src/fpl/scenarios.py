"""Per-case scenario runners used by the fuzzer.

Each runner takes a space and a map and returns a JSON-ready record whose
``verdict`` is ``verified``, ``premises_unmet`` or ``counterexample``.
Scenarios that only search (``independence``, ``period2_search``) never
produce counterexamples; what they find goes under ``finds``.
"""

from __future__ import annotations

from fractions import Fraction

from .checks import check_gen_crr_triple, space_table
from .classify import (
    SelfMap,
    classify_crr,
    classify_gen_crr,
    crr_constraints,
    gen_crr_widened,
)
from .lp import solve_linear_feasibility
from .metric import FiniteMetricSpace
from .numeric import DEFAULT_TOL, fmt_scalar
from .orbit import (
    COUNTEREXAMPLE,
    PREMISES_UNMET,
    VERIFIED,
    certified_run,
    continuity_audit,
    fixed_points,
    orbit_finite,
    period2_points,
)

SCENARIOS = ("thm31", "thm42", "prop21", "independence", "period2_search")


def _reproduction(space: FiniteMetricSpace, T: SelfMap) -> dict:
    return {"space": space.to_json(), "image": list(T.image), "mode": "exact" if space.exact else "float"}


def run_scenario_thm31(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> dict:
    """Fixed-point existence and count, plus every orbit and continuity audit."""
    cert = classify_gen_crr(space, T, tol)
    fps = sorted(fixed_points(T))
    p2 = sorted(period2_points(T))
    rec = {
        "certificate": cert.to_json(),
        "fixed_points": fps,
        "period2": p2,
    }
    if not cert.feasible or p2:
        rec["verdict"] = PREMISES_UNMET
        rec["reason"] = "certificate infeasible" if not cert.feasible else "prime period 2 present"
        return rec
    alpha, lam = cert.coefficients["alpha"], cert.coefficients["lambda"]
    failures = []
    n_audits = 0
    longest = 0
    for start in range(space.n):
        run = certified_run(space, T, cert, start, tol)
        n_audits += len(run.audits)
        longest = max(longest, len(run.orbit.sequence))
        if run.verdict != VERIFIED:
            failures.append({"start": start, "reasons": list(run.reasons),
                             "audits": [a.to_json() for a in run.failures]})
    cont = continuity_audit(space, T, alpha, lam, tol)
    n_audits += len(cont)
    bad_cont = [a.to_json() for a in cont if not a.passed]
    if bad_cont:
        failures.append({"continuity": bad_cont})
    rec["audits"] = n_audits
    rec["longest_orbit"] = longest
    if failures:
        rec["verdict"] = COUNTEREXAMPLE
        rec["failures"] = failures
        rec["reproduce"] = _reproduction(space, T)
    else:
        rec["verdict"] = VERIFIED
    return rec


def _asymptotically_regular(space: FiniteMetricSpace, T: SelfMap) -> bool:
    # on a finite space gaps reach 0 exactly when the orbit reaches a fixed point
    return all(orbit_finite(space, T, s).outcome.kind == "fixed_point" for s in range(space.n))


def run_scenario_thm42(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> dict:
    """Widened coefficients (alpha < 1/2, lambda < 1) plus asymptotic regularity."""
    ok, bad = gen_crr_widened(space, T)
    regular = _asymptotically_regular(space, T)
    fps = sorted(fixed_points(T))
    rec = {"widened_feasible": ok, "asymptotically_regular": regular, "fixed_points": fps}
    if not ok or not regular:
        rec["verdict"] = PREMISES_UNMET
        return rec
    if 1 <= len(fps) <= 2:
        rec["verdict"] = VERIFIED
    else:
        rec["verdict"] = COUNTEREXAMPLE
        rec["reproduce"] = _reproduction(space, T)
    return rec


def _prop21_check(space, T, a, b, c, tol):
    """Worst slack of the three-point inequality at (alpha, lambda) = (a, b + c)."""
    lam = b + c
    worst = None
    worst_triple = None
    n = space.n
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                s = check_gen_crr_triple(space_table(space, T, (i, j, k)), a, lam)
                if worst is None or s < worst:
                    worst, worst_triple = s, (i, j, k)
    return worst, worst_triple


def run_scenario_prop21(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> dict:
    """Two-point CRR maps with 2a + 3(b+c)/2 < 1 satisfy the three-point inequality.

    Checked at the certificate's coefficients and at the vertex of the
    two-point system minimising ``2a + 3(b+c)/2``.
    """
    cert = classify_crr(space, T, tol)
    rec = {"certificate": cert.to_json()}
    if not cert.feasible:
        rec["verdict"] = PREMISES_UNMET
        rec["reason"] = "not a CRR map"
        return rec
    candidates = [tuple(cert.coefficients[k] for k in ("a", "b", "c"))]
    _, rows = crr_constraints(space, T)
    w = (2, Fraction(3, 2), Fraction(3, 2)) if space.exact else (2.0, 1.5, 1.5)
    lp = solve_linear_feasibility(rows, w, 3, tol, space.exact)
    if lp.argmin != candidates[0]:
        candidates.append(lp.argmin)
    one = 1 if space.exact else 1.0
    checked = []
    failures = []
    for a, b, c in candidates:
        premise = 2 * a + Fraction(3, 2) * (b + c) if space.exact else 2 * a + 1.5 * (b + c)
        if not (premise < one if space.exact else premise <= one - tol):
            continue
        worst, triple = _prop21_check(space, T, a, b, c, tol)
        entry = {"a": fmt_scalar(a), "b": fmt_scalar(b), "c": fmt_scalar(c),
                 "worst_slack": fmt_scalar(worst), "worst_triple": list(triple)}
        checked.append(entry)
        if worst < -tol:
            failures.append(entry)
    rec["checked"] = checked
    if not checked:
        rec["verdict"] = PREMISES_UNMET
        rec["reason"] = "no CRR coefficients with 2a+3(b+c)/2 < 1"
    elif failures:
        rec["verdict"] = COUNTEREXAMPLE
        rec["failures"] = failures
        rec["reproduce"] = _reproduction(space, T)
    else:
        rec["verdict"] = VERIFIED
    return rec


def independence_label(crr_feasible: bool, gen_feasible: bool) -> str:
    if crr_feasible and gen_feasible:
        return "both"
    if crr_feasible:
        return "crr_only"
    if gen_feasible:
        return "gen_only"
    return "neither"


def run_scenario_independence(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> dict:
    """Label the case by membership in the two-point and three-point CRR classes."""
    crr = classify_crr(space, T, tol)
    gen = classify_gen_crr(space, T, tol)
    label = independence_label(crr.feasible, gen.feasible)
    rec = {
        "label": label,
        "crr": crr.to_json(),
        "gen_crr": gen.to_json(),
        "verdict": VERIFIED,
    }
    if label in ("crr_only", "gen_only"):
        rec["finds"] = {"witness": label, "reproduce": _reproduction(space, T)}
    return rec


def run_scenario_period2_search(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL) -> dict:
    """Look for a certified three-point CRR map with a 2-cycle and no fixed point."""
    cert = classify_gen_crr(space, T, tol)
    p2 = sorted(period2_points(T))
    fps = sorted(fixed_points(T))
    rec = {"certificate": cert.to_json(), "period2": p2, "fixed_points": fps, "verdict": VERIFIED}
    if cert.feasible and p2:
        rec["finds"] = {
            "witness": "period2_without_fixed_point" if not fps else "period2_with_fixed_point",
            "reproduce": _reproduction(space, T),
        }
    return rec


RUNNERS = {
    "thm31": run_scenario_thm31,
    "thm42": run_scenario_thm42,
    "prop21": run_scenario_prop21,
    "independence": run_scenario_independence,
    "period2_search": run_scenario_period2_search,
}
