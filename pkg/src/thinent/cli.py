"""Command-line interface.

Exit codes: 0 when every hard check passes, 1 when one fails, 2 for usage
or input errors.  Reports go to stdout as one JSON object and, with
``--out``, are appended to that file one object per line.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Sequence

from . import concentration as cc
from . import information as info
from . import monotonicity as mono
from . import pmf as pm
from . import shepp_olkin as so
from .errors import ThinentError
from .report import Check, InequalityReport, SuiteConfig, append_report, dumps
from .suites import ANCHORS, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with its own code
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input


def _load_pmf(path: str) -> pm.Pmf:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    try:
        return pm.Pmf.from_dict(data)
    except ThinentError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _family_from_args(args: argparse.Namespace) -> pm.Pmf:
    fam = args.family
    if args.params is not None:
        params = _floats(args.params)
    elif fam == "poisson":
        params = [args.lam]
    elif fam in ("bernoulli", "geometric"):
        params = [args.p]
    elif fam == "binomial":
        params = [args.n, args.p]
    elif fam == "negative-binomial":
        params = [args.r, args.p]
    elif fam == "tilted-poisson":
        params = [args.lam, args.beta]
    else:
        raise UsageError(f"family {fam!r} needs --params")
    if any(v is None for v in params):
        raise UsageError(f"family {fam!r} is missing a parameter flag")
    return pm.family_pmf(fam, params, args.tol)


def _pmf_from_args(args: argparse.Namespace) -> pm.Pmf:
    if args.input:
        return _load_pmf(args.input)
    if getattr(args, "family", None):
        return _family_from_args(args)
    raise UsageError("give --input FILE or --family NAME")


# ---------------------------------------------------------------------------
# compute


FUNCTIONALS: dict[str, Callable[[pm.Pmf, SuiteConfig], Any]] = {
    "mean": lambda P, cfg: P.mean,
    "variance": lambda P, cfg: P.variance,
    "moments": lambda P, cfg: list(pm.moments(P)),
    "entropy": lambda P, cfg: pm.entropy(P),
    "K": lambda P, cfg: info.scaled_fisher(P),
    "I": lambda P, cfg: info.johnstone_info(P),
    "johnstone": lambda P, cfg: info.johnstone_info(P),
    "c": lambda P, cfg: pm.c_log_concavity(P),
    "ulc": lambda P, cfg: pm.ulc_check(P),
    "R": lambda P, cfg: cc.poincare_constant(P).constant,
    "poincare": lambda P, cfg: cc.poincare_constant(P).constant,
    "size-bias": lambda P, cfg: pm.size_bias(P).to_dict(),
    "poisson-D": lambda P, cfg: mono.poisson_divergence(P, cfg.trunc_tol),
    "maxent-gap": lambda P, cfg: mono.maxent_gap(P, cfg.trunc_tol).gap,
    "tv-poisson": lambda P, cfg: pm.tv_distance(P, pm.poisson(P.mean, cfg.trunc_tol)),
}


def cmd_compute(args: argparse.Namespace, cfg: SuiteConfig) -> int:
    P = _pmf_from_args(args)
    names = [n.strip() for n in args.functionals.split(",") if n.strip()]
    unknown = [n for n in names if n not in FUNCTIONALS]
    if unknown:
        raise UsageError(f"unknown functional {unknown[0]!r}; choose from {sorted(FUNCTIONALS)}")
    values: dict[str, Any] = {}
    for n in names:
        try:
            values[n] = FUNCTIONALS[n](P, cfg)
        except ThinentError as exc:
            values[n] = {"error": type(exc).__name__, "message": str(exc)}
    return _emit(InequalityReport("compute", [], cfg.master_seed, values={"pmf": P.to_dict(), **values}), cfg)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args: argparse.Namespace, cfg: SuiteConfig) -> int:
    report = run_suite(args.suite, cfg)
    for c in sorted(report.checks, key=lambda c: c.name):
        print(f"{c.status.upper():12s} {c.name}  slack={c.slack:.3e}  tol={c.tolerance:.1e}", file=sys.stderr)
    return _emit(report, cfg)


# ---------------------------------------------------------------------------
# shepp-olkin


def cmd_so_profile(args: argparse.Namespace, cfg: SuiteConfig) -> int:
    try:
        path = so.so_path(_floats(args.p0), _floats(args.p1))
    except ThinentError as exc:
        raise UsageError(str(exc)) from exc
    prof = so.entropy_profile(path, cfg.grid_size, args.kind, args.q)
    if args.csv:
        so.write_profile_csv(prof, args.csv)
    sd = so.max_second_difference(prof)
    checks = []
    if args.kind == "shannon" or args.q == 1.0:
        name = "shepp-olkin.shannon-concavity"
        checks.append(Check(name, ANCHORS["SO"], -sd, cfg.tolerance(name, 1e-8), False, {"path": path.to_dict()}))
    values = {
        "path": path.to_dict(),
        "kind": args.kind,
        "q": args.q,
        "max_second_difference": sd,
        "profile": [[p.t, p.value, p.second_difference] for p in prof],
    }
    return _emit(InequalityReport("shepp-olkin-profile", checks, cfg.master_seed, values=values), cfg)


def cmd_so_scan(args: argparse.Namespace, cfg: SuiteConfig) -> int:
    res = so.critical_q_search(args.kind, cfg.m, cfg.trials, cfg.master_seed)
    name = f"shepp-olkin.critical-q-{args.kind}"
    slack = -res.witness.second_difference if res.witness else 0.0
    check = Check(name, ANCHORS["so-conjecture"], slack, cfg.tolerance(name, so.WITNESS_THRESHOLD), True, res.witness)
    values = {"kind": args.kind, "m": cfg.m, "trials": cfg.trials, "q_hat": res.q_hat, "bracket": list(res.bracket)}
    if args.kind == "tsallis":
        values["conjectured"] = so.tsallis_root()
    else:
        values["conjectured"] = 2.0
    if args.witness_json and res.witness is not None:
        so.dump_json(json.loads(dumps(res.witness)), args.witness_json)
    return _emit(InequalityReport("shepp-olkin-scan", [check], cfg.master_seed, values=values), cfg)


# ---------------------------------------------------------------------------
# poincare


def cmd_poincare(args: argparse.Namespace, cfg: SuiteConfig) -> int:
    P = _pmf_from_args(args)
    checks = []
    if args.mixed is not None:
        est = cc.poincare_constant_mixed(P, args.mixed)
        var = P.variance
        name = "poincare.linear-witness"
        checks.append(Check(name, ANCHORS["nablamixed"], est.constant - var, cfg.tolerance(name, 1e-9), False, {"variance": var}))
    else:
        est = cc.poincare_constant(P)
        if pm.ulc_check(P):
            name = "poincare.daly-sandwich"
            slack = min(est.constant - P.variance, P.mean - est.constant)
            checks.append(Check(name, ANCHORS["daly"], slack, cfg.tolerance(name, 1e-9), False,
                                {"variance": P.variance, "mean": P.mean}, P.tail_bound))
        if P.full_support_family and pm.c_log_concavity(P) > 0:
            r = cc.poincare_bound_clc(P)
            name = "poincare.clc-bound"
            checks.append(Check(name, ANCHORS["poincare"], r.bound - est.constant, cfg.tolerance(name, 1e-6), False,
                                {"c": r.c, "bound": r.bound}, P.tail_bound))
    values = {
        "constant": est.constant,
        "maximizer": est.maximizer,
        "derivative_kind": est.derivative_kind,
        "truncation_note": est.truncation_note,
        "residual": est.residual,
    }
    return _emit(InequalityReport("poincare", checks, cfg.master_seed, values=values), cfg)


# ---------------------------------------------------------------------------


def _emit(report: InequalityReport, cfg: SuiteConfig) -> int:
    print(report.to_json())
    if cfg.output_path:
        append_report(report, cfg.output_path)
    return EXIT_FAIL if report.hard_failures else EXIT_OK


def _overrides(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--check-tol expects NAME=VALUE, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise UsageError(f"--check-tol {name}: {value!r} is not a number") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    g.add_argument("--tol", type=float, default=pm.DEFAULT_TRUNC_TOL, help="truncation tolerance for infinite families")
    g.add_argument("--trials", type=int, default=100, help="random instances per check")
    g.add_argument("--grid", type=int, default=101, help="grid size for entropy profiles")
    g.add_argument("--out", default=None, help="append the JSON report to this file")
    g.add_argument("--input", default=None, help="Pmf JSON file")
    g.add_argument("--check-tol", action="append", default=[], metavar="NAME=VALUE", help="override one check's tolerance")
    g.add_argument("--m", type=int, default=8, help="number of Bernoulli coordinates for path suites")

    fam = _Parser(add_help=False)
    f = fam.add_argument_group("family input")
    f.add_argument("--family", choices=pm.FAMILY_NAMES)
    f.add_argument("--params", default=None, help="comma-separated family parameters")
    f.add_argument("--lambda", dest="lam", type=float)
    f.add_argument("--p", type=float)
    f.add_argument("--n", type=int)
    f.add_argument("--r", type=float)
    f.add_argument("--beta", type=float)

    parser = _Parser(prog="thinent", description="Entropy, thinning and Poisson-approximation inequalities on the integers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", parents=[common, fam], help="evaluate functionals of one mass function")
    c.add_argument("--functionals", default="entropy,mean,variance", help=f"comma list from {sorted(FUNCTIONALS)}")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", parents=[common], help="run an inequality suite")
    v.add_argument("suite", choices=[*SUITES, "all"])
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("shepp-olkin", help="entropy along Bernoulli-sum paths")
    ssub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    prof = ssub.add_parser("profile", parents=[common], help="entropy profile along one affine path")
    prof.add_argument("--p0", required=True)
    prof.add_argument("--p1", required=True)
    prof.add_argument("--kind", choices=["shannon", "renyi", "tsallis"], default="shannon")
    prof.add_argument("--q", type=float, default=1.0)
    prof.add_argument("--csv", default=None, help="write t,value,second_difference rows here")
    prof.set_defaults(func=cmd_so_profile)
    scan = ssub.add_parser("scan", parents=[common], help="search for the critical q of a generalised entropy")
    scan.add_argument("--kind", choices=["renyi", "tsallis"], required=True)
    scan.add_argument("--witness-json", default=None, help="write the witness path here")
    scan.set_defaults(func=cmd_so_scan)

    p = sub.add_parser("poincare", parents=[common, fam], help="Poincare constant of one mass function")
    p.add_argument("--mixed", type=int, default=None, metavar="N", help="use the mixed derivative on 0..N")
    p.set_defaults(func=cmd_poincare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = SuiteConfig(
            master_seed=args.seed,
            trunc_tol=args.tol,
            trials=args.trials,
            grid_size=args.grid,
            tolerance_overrides=_overrides(args.check_tol),
            output_path=args.out,
            m=args.m,
        )
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"thinent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ThinentError as exc:
        print(f"thinent: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
