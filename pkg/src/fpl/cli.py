"""``fpl`` command-line front end.

Exit codes: 0 success (valid, feasible, verified, converged, passed),
1 a violation was found (invalid metric, infeasible certificate, negative
slack, counterexample, failed spot check, no convergence), 2 usage or input
error.  With ``--json`` the machine-readable result goes to stdout and the
human summary to stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .checks import check_gen_crr_triple
from .classify import CLASS_ALIASES, classify, classify_gen_crr
from .dsl import eval_map, parse_func, parse_map, spotcheck_f_class, spotcheck_scalar_class
from .files import dumps, load_map, load_matrix, load_space
from .fuzz import FuzzConfig, fuzz, parse_range
from .metric import validate_metric
from .numeric import DEFAULT_TOL, fmt_scalar, to_scalar
from .orbit import COUNTEREXAMPLE, certified_run, fixed_points, iterate_real, orbit_finite, period2_points


class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, payload, summary: str):
        if self.as_json:
            sys.stdout.write(dumps(payload))
            print(summary, file=sys.stderr)
        else:
            print(summary)


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, Fraction):
        return str(v)
    return repr(v)


def cmd_validate(args) -> int:
    dist = load_matrix(args.space, args.exact)
    report = validate_metric(dist, args.tol, args.exact)
    lines = ["metric OK" if report.ok else f"{len(report.violations)} violation(s)"]
    for kind, idx, mag in report.violations:
        lines.append(f"  {kind} at {idx}: {_fmt(mag)}")
    _Out(args.json).emit(report.to_json(), "\n".join(lines))
    return 0 if report.ok else 1


def cmd_classify(args) -> int:
    space = load_space(args.space, args.exact, args.tol)
    T = load_map(args.map, space)
    cert = classify(args.mapping_class, space, T, args.tol)
    coef = ", ".join(f"{k}={_fmt(v)}" for k, v in cert.coefficients.items()) or "none"
    summary = (
        f"{cert.mapping_class.value}: {'feasible' if cert.feasible else 'infeasible'}; "
        f"strictness {_fmt(cert.strictness)} vs threshold {_fmt(cert.threshold)}; coefficients {coef}"
    )
    _Out(args.json).emit(cert.to_json(), summary)
    return 0 if cert.feasible else 1


def cmd_check_triple(args) -> int:
    table = load_matrix(args.d6, args.exact)
    alpha = to_scalar(args.alpha, args.exact)
    lam = to_scalar(args.lam, args.exact)
    slack = check_gen_crr_triple(table, alpha, lam)
    _Out(args.json).emit(
        {"slack": fmt_scalar(slack), "holds": slack >= 0},
        f"slack {_fmt(slack)} ({'holds' if slack >= 0 else 'violated'})",
    )
    return 0 if slack >= 0 else 1


def cmd_fixed_points(args) -> int:
    space = load_space(args.space, args.exact, args.tol)
    T = load_map(args.map, space)
    fps = sorted(fixed_points(T))
    p2 = sorted(period2_points(T))
    payload = {
        "fixed_points": [space.labels[i] for i in fps],
        "period2": [space.labels[i] for i in p2],
    }
    _Out(args.json).emit(
        payload,
        f"fixed points: {payload['fixed_points'] or 'none'}; prime period 2: {payload['period2'] or 'none'}",
    )
    return 0


def cmd_orbit(args) -> int:
    space = load_space(args.space, args.exact, args.tol)
    T = load_map(args.map, space)
    rep = orbit_finite(space, T, space.index(args.start))
    path = " -> ".join(space.labels[i] for i in rep.sequence)
    o = rep.outcome
    if o is None:
        tail = "truncated"
    elif o.kind == "fixed_point":
        tail = f"fixed point {space.labels[o.index]} at step {o.step}"
    else:
        tail = f"cycle entered at step {o.index}, period {o.step}"
    _Out(args.json).emit(rep.to_json(space), f"{path}: {tail}")
    return 0


def cmd_certify(args) -> int:
    space = load_space(args.space, args.exact, args.tol)
    T = load_map(args.map, space)
    cert = classify_gen_crr(space, T, args.tol)
    run = certified_run(space, T, cert, space.index(args.start), args.tol)
    payload = {"certificate": cert.to_json(), "run": run.to_json(space)}
    summary = f"verdict: {run.verdict}; {len(run.audits)} audits"
    if run.reasons:
        summary += "; " + "; ".join(run.reasons)
    _Out(args.json).emit(payload, summary)
    return 1 if run.verdict == COUNTEREXAMPLE else 0


def cmd_iterate(args) -> int:
    T = parse_map(args.map)
    rep = iterate_real(T, float(Fraction(args.x0)), args.tol, args.max_iter)
    summary = (
        f"{'converged' if rep.converged else 'not converged'} after {rep.iterations} steps; "
        f"last iterate {rep.iterates[-1]!r}, final gap {rep.final_gap!r}; "
        f"asymptotically regular: {'yes' if rep.asymptotically_regular else 'no (within max-iter)'}"
    )
    _Out(args.json).emit(rep.to_json(max_items=args.show), summary)
    return 0 if rep.converged else 1


def cmd_eval(args) -> int:
    T = parse_map(args.map)
    x = Fraction(args.x) if args.exact else float(Fraction(args.x))
    y = eval_map(T, x)
    _Out(args.json).emit({"x": fmt_scalar(x), "value": fmt_scalar(y)}, f"T({_fmt(x)}) = {_fmt(y)}")
    return 0


def cmd_spotcheck(args) -> int:
    if args.f is not None:
        rep = spotcheck_f_class(parse_func(args.f, 3))
    elif args.beta is not None:
        rep = spotcheck_scalar_class(parse_func(args.beta, 1), "beta")
    else:
        rep = spotcheck_scalar_class(parse_func(args.phi, 1), "phi")
    lines = [f"{rep.kind}-class spot check (advisory): {'pass' if rep.passed else 'FAIL'}"]
    lines += [f"  {'ok  ' if p else 'FAIL'} {n}: {d}" for n, p, d in rep.checks]
    _Out(args.json).emit(rep.to_json(), "\n".join(lines))
    return 0 if rep.passed else 1


def cmd_fuzz(args) -> int:
    lo, hi = parse_range(args.n)
    cfg = FuzzConfig(args.seed, args.count, lo, hi, args.generator, args.scenario, args.tol)
    report = fuzz(cfg)
    t = report["tallies"]
    summary = (
        f"{args.scenario} x {args.count} (seed {args.seed}, {args.generator}): "
        f"{t['verified']} verified, {t['premises_unmet']} premises unmet, "
        f"{t['counterexample']} counterexamples; {len(report['notable'])} notable"
    )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(report))
    _Out(args.json).emit(report, summary)
    return 1 if t["counterexample"] else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fpl {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, space=True, mode=True):
        if mode:
            sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="float-mode tolerance")
            sp.add_argument("--exact", action="store_true", help="exact rational arithmetic")
        sp.add_argument("--json", action="store_true", help="JSON on stdout, summary on stderr")
        if space:
            sp.add_argument("space", help="space JSON file")

    sp = sub.add_parser("validate", help="check the metric axioms of a space file")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("classify", help="certify membership in a contraction class")
    sp.add_argument("--class", dest="mapping_class", required=True, choices=sorted(CLASS_ALIASES))
    common(sp)
    sp.add_argument("map", help="map JSON file")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("check-triple", help="slack of the three-point inequality on a 6x6 table")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--d6", required=True, help="JSON table over x, y, z, Tx, Ty, Tz")
    common(sp, space=False)
    sp.set_defaults(func=cmd_check_triple)

    sp = sub.add_parser("fixed-points", help="list fixed points and points of prime period 2")
    common(sp)
    sp.add_argument("map")
    sp.set_defaults(func=cmd_fixed_points)

    for name, func, helptext in (
        ("orbit", cmd_orbit, "iterate a finite map from a start point"),
        ("certify", cmd_certify, "run and audit an orbit against the fixed-point bounds"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("map")
        sp.add_argument("--start", required=True, help="start label or index")
        sp.set_defaults(func=func)

    sp = sub.add_parser("iterate", help="iterate a real map given as an expression in x")
    sp.add_argument("--map", required=True)
    sp.add_argument("--x0", required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--max-iter", type=int, default=100_000)
    sp.add_argument("--show", type=int, default=50, help="iterates to include in JSON output")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_iterate)

    sp = sub.add_parser("eval", help="evaluate a map expression at a point")
    sp.add_argument("--map", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("spotcheck", help="advisory sampling of the F, beta or phi class conditions")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--f", help="F in u, v, w")
    g.add_argument("--beta", help="beta in t")
    g.add_argument("--phi", help="phi in t")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_spotcheck)

    sp = sub.add_parser("fuzz", help="seeded scenario fuzzing")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--n", default="3..6", help="point-count range MIN..MAX")
    sp.add_argument("--generator", default="euclidean", choices=("euclidean", "closure"))
    sp.add_argument("--scenario", default="thm31",
                    choices=("thm31", "thm42", "prop21", "independence", "period2_search"))
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--out", help="also write the JSON report here")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_fuzz)
    return p


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError, IndexError, TypeError, ArithmeticError, OSError) as e:
        print(f"fpl {args.command}: error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
