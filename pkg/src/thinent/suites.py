"""Verification suites: randomized and closed-form checks of each inequality.

Each check reports its worst slack over the instances it draws (slack >= 0
means the inequality held) together with the instance attaining it.
Every trial seeds its own generator from (master seed, check name, index).
"""

from __future__ import annotations

import math
from typing import Any, Callable, Iterable

import numpy as np

from . import concentration as cc
from . import information as info
from . import monotonicity as mono
from . import pmf as pm
from . import sampling as smp
from . import shepp_olkin as so
from . import thinning as th
from .errors import BadParameter
from .report import Check, InequalityReport, SuiteConfig

# anchors name the result each check exercises
ANCHORS = {
    "bobled": "Theorem (bobled)",
    "scaledfisher": "Eq. (scaledfisher)",
    "khj": "Theorem (khj)",
    "johnstone": "Eq. (johnstone)",
    "maxent": "Theorem (maxent)",
    "daly-remark": "Theorem (maxent); Daly remark",
    "derivative": "Eq. (derivative)",
    "heateqn2": "Eq. (heateqn2)",
    "yuiid": "Theorem (yuiid)",
    "hmon": "Theorem (hmon)",
    "yugeneral": "Theorem (yugeneral)",
    "poindisc": "Def. (poindisc)",
    "klaassen": "Example (klaassen)",
    "daly": "Theorem (daly)",
    "poincare": "Theorem (poincare)",
    "nablamixed": "Eq. (nablamixed)",
    "lsi": "Theorem (lsi)",
    "SO": "Theorem (SO)",
    "key": "Eq. (key)",
    "so-conjecture": "§8 Conjecture",
    "so-monotone": "§8",
}


class _Worst:
    """Running minimum of slack with the instance that attains it."""

    def __init__(self) -> None:
        self.slack = math.inf
        self.witness: Any = None
        self.budget = 0.0
        self.count = 0

    def add(self, slack: float, witness: Callable[[], Any] | Any = None, budget: float = 0.0) -> None:
        self.count += 1
        self.budget = max(self.budget, budget)
        if slack < self.slack or self.witness is None and slack == self.slack:
            self.slack = float(slack)
            self.witness = witness() if callable(witness) else witness

    def check(self, cfg: SuiteConfig, name: str, anchor: str, tol: float, exploratory: bool = False) -> Check:
        w = {"instances": self.count, "worst": self.witness}
        return Check(name, ANCHORS[anchor], self.slack, cfg.tolerance(name, tol), exploratory, w, self.budget)


def _rngs(cfg: SuiteConfig, name: str, n: int | None = None) -> Iterable[np.random.Generator]:
    for i in range(cfg.trials if n is None else n):
        yield smp.trial_rng(cfg.master_seed, name, i)


def _tuple(rng: np.random.Generator, draw: Callable[..., pm.Pmf], max_parts: int = 4) -> list[pm.Pmf]:
    return [draw(rng, 12) for _ in range(int(rng.integers(2, max_parts + 1)))]


# ---------------------------------------------------------------------------


def poisson_approx_suite(cfg: SuiteConfig) -> list[Check]:
    checks = []

    w = _Worst()
    for p in np.arange(1, 100) / 100:
        w.add(-abs(info.scaled_fisher(pm.bernoulli(p)) - p * p / (1 - p)), {"p": p})
    checks.append(w.check(cfg, "poisson-approx.K-bernoulli", "scaledfisher", 1e-12))

    bound, dk, tv = _Worst(), _Worst(), _Worst()
    lam = 1.0

    def chain(P: pm.Pmf, tag: Any) -> info.PoissonApproxReport:
        r = info.poisson_approx_report(P, cfg.trunc_tol)
        dk.add(r.K - r.D_to_poisson, lambda: {"instance": tag, "K": r.K, "D": r.D_to_poisson}, r.error_budget)
        tv.add(r.pinsker_bound - r.tv, lambda: {"instance": tag, "tv": r.tv, "pinsker": r.pinsker_bound}, r.error_budget)
        return r

    for n in range(2, 51):
        r = chain(pm.binomial(n, lam / n), {"binomial": [n, lam / n]})
        b = info.binomial_relative_entropy_bound(n, lam)
        bound.add(b - r.D_to_poisson, lambda: {"n": n, "D": r.D_to_poisson, "bound": b}, r.error_budget)
    for rng in _rngs(cfg, "poisson-approx.chain"):
        P = smp.random_pmf(rng)
        chain(P, P.to_dict())
    checks.append(bound.check(cfg, "poisson-approx.binomial-D-bound", "khj", 1e-12))
    checks.append(dk.check(cfg, "poisson-approx.D-le-K", "bobled", 1e-10))
    checks.append(tv.check(cfg, "poisson-approx.TV-le-pinsker", "bobled", 1e-10))

    w = _Worst()
    for rng in _rngs(cfg, "poisson-approx.subadditivity"):
        Ps = _tuple(rng, smp.random_pmf)
        w.add(info.fisher_subadditivity_gap(Ps, "scaledK"), lambda: [P.to_dict() for P in Ps])
    checks.append(w.check(cfg, "poisson-approx.subadditivity-K", "khj", 1e-10))

    w = _Worst()
    for lam in (0.5, 1.0, 2.0, 5.0):
        Pi = pm.poisson(lam, cfg.trunc_tol)
        w.add(-abs(info.fisher_subadditivity_gap([Pi, Pi], "johnstoneI")), {"lambda": lam})
    checks.append(w.check(cfg, "poisson-approx.johnstone-equality", "johnstone", 1e-8))
    return checks


def maxent_suite(cfg: SuiteConfig) -> list[Check]:
    checks = []

    w = _Worst()
    for rng in _rngs(cfg, "maxent.ulc"):
        P = smp.random_ulc_mixed(rng)
        g = mono.maxent_gap(P, cfg.trunc_tol)
        w.add(g.gap, lambda: P.to_dict(), g.error_budget)
    checks.append(w.check(cfg, "maxent.ulc", "maxent", 1e-10))

    w = _Worst()
    for rng in _rngs(cfg, "maxent.size-bias-st", min(cfg.trials, 50)):
        P = smp.random_st_not_lr(rng)
        if P is None:
            continue
        g = mono.maxent_gap(P, cfg.trunc_tol)
        w.add(g.gap, lambda: P.to_dict(), g.error_budget)
    checks.append(w.check(cfg, "maxent.size-bias-st", "daly-remark", 1e-10))

    grid = np.linspace(0.0, 1.0, 21)
    deriv, agree = _Worst(), _Worst()
    for rng in _rngs(cfg, "maxent.free-energy", min(cfg.trials, 200)):
        P = smp.random_ulc_mixed(rng)
        path = th.free_energy_path(P, grid)
        lams = np.array([p.lambda_val for p in path])
        covs = np.array([p.deriv_cov for p in path])
        deriv.add(min(-covs.max(), float(-np.diff(lams).max())), lambda: P.to_dict())
        err = max(abs(p.deriv_cov - p.deriv_fd) for p in path)
        agree.add(-err, lambda: P.to_dict())
    checks.append(deriv.check(cfg, "maxent.free-energy-nonincreasing", "derivative", 1e-10))
    checks.append(agree.check(cfg, "maxent.free-energy-derivative-fd", "derivative", 1e-6))

    # the hard residual uses the extrapolated derivative so that a large third
    # derivative cannot pass for a PDE violation; the raw residual rides along
    res, ratio = _Worst(), _Worst()
    floor_hits = 0
    for rng in _rngs(cfg, "maxent.pde"):
        P = smp.random_pmf(rng)
        alpha = float(rng.uniform(0.05, 0.95))
        r1, rr = th.pde_step_halving(P, alpha)
        rx = th.pde_residual(P, alpha, richardson=True)
        res.add(-rx, lambda: {"pmf": P.to_dict(), "alpha": alpha, "raw_residual": r1})
        if math.isnan(rr):
            floor_hits += 1
            continue
        ratio.add(-abs(rr - 4.0), lambda: {"pmf": P.to_dict(), "alpha": alpha, "ratio": rr})
    checks.append(res.check(cfg, "maxent.pde-residual", "heateqn2", 1e-6))
    c = ratio.check(cfg, "maxent.pde-step-halving", "heateqn2", 0.5)
    c.witness["below_rounding_floor"] = floor_hits
    checks.append(c)
    return checks


def monotonicity_suite(cfg: SuiteConfig) -> list[Check]:
    checks = []
    d, h = _Worst(), _Worst()
    for rng in _rngs(cfg, "monotonicity.D"):
        P = smp.random_pmf(rng)
        recs = mono.thin_law_sequences(P, 6, cfg.trunc_tol)
        d.add(float(-np.diff([r.D_n for r in recs]).max()), lambda: P.to_dict())
    for rng in _rngs(cfg, "monotonicity.H"):
        P = smp.random_ulc_mixed(rng)
        recs = mono.thin_law_sequences(P, 6, cfg.trunc_tol)
        h.add(float(np.diff([r.H_n for r in recs]).min()), lambda: P.to_dict())
    checks.append(d.check(cfg, "monotonicity.D-nonincreasing", "yuiid", 1e-10))
    checks.append(h.check(cfg, "monotonicity.H-nondecreasing", "yuiid", 1e-10))

    for kind, draw, anchor in (
        ("entropy", smp.random_ulc_mixed, "hmon"),
        ("relative-entropy", smp.random_pmf, "yugeneral"),
    ):
        w = _Worst()
        for rng in _rngs(cfg, f"monotonicity.leave-one-out-{kind}"):
            Ps = _tuple(rng, draw)
            a = rng.dirichlet(np.ones(len(Ps)))
            a = a / a.sum()
            inst = mono.LeaveOneOutInstance(Ps, a, kind)
            w.add(mono.leave_one_out_gap(inst, cfg.trunc_tol), lambda: {"pmfs": [P.to_dict() for P in Ps], "alphas": a})
        checks.append(w.check(cfg, f"monotonicity.leave-one-out-{kind}", anchor, 1e-10))

    # the Poisson is a fixed point: every gap vanishes
    w = _Worst()
    for lam in (0.5, 1.0, 3.0):
        Pi = pm.poisson(lam, cfg.trunc_tol)
        recs = mono.thin_law_sequences(Pi, 4, cfg.trunc_tol)
        gaps = [r.D_n for r in recs] + list(np.diff([r.H_n for r in recs]))
        gaps.append(mono.maxent_gap(Pi, cfg.trunc_tol).gap)
        for kind in ("entropy", "relative-entropy"):
            inst = mono.LeaveOneOutInstance([Pi, Pi, Pi], [1 / 3, 1 / 3, 1 / 3], kind)
            gaps.append(mono.leave_one_out_gap(inst, cfg.trunc_tol))
        w.add(-float(np.max(np.abs(gaps))), {"lambda": lam})
    checks.append(w.check(cfg, "monotonicity.poisson-equality", "yuiid", 1e-10))
    return checks


def poincare_suite(cfg: SuiteConfig) -> list[Check]:
    checks = []
    w = _Worst()
    for lam in (0.5, 1.0, 2.0, 5.0):
        R = cc.poincare_constant(pm.poisson(lam, cfg.trunc_tol)).constant
        w.add(-abs(R - lam) / lam, {"lambda": lam, "R": R})
    checks.append(w.check(cfg, "poincare.klaassen", "klaassen", 1e-3))

    w = _Worst()
    for p in np.arange(1, 100) / 100:
        R = cc.poincare_constant(pm.bernoulli(p)).constant
        w.add(-abs(R - p), {"p": p, "R": R})
    checks.append(w.check(cfg, "poincare.bernoulli", "poindisc", 1e-9))

    w = _Worst()
    for rng in _rngs(cfg, "poincare.daly"):
        P = smp.random_ulc_mixed(rng)
        R = cc.poincare_constant(P).constant
        w.add(min(R - P.variance, P.mean - R), lambda: {"pmf": P.to_dict(), "R": R})
    checks.append(w.check(cfg, "poincare.daly-sandwich", "daly", 1e-9))

    w = _Worst()
    for rng in _rngs(cfg, "poincare.clc"):
        P = smp.random_tilted(rng, cfg.trunc_tol)
        r = cc.poincare_bound_clc(P)
        w.add(r.bound - r.estimate.constant, lambda: {"family": P.family.to_dict(), "R": r.estimate.constant, "bound": r.bound}, P.tail_bound)
    checks.append(w.check(cfg, "poincare.clc-bound", "poincare", 1e-6))

    # the constant for the mixed derivative is compared with n p (1 - p), not asserted
    w = _Worst()
    for n, p in ((2, 0.5), (5, 0.4), (10, 0.1), (20, 0.7)):
        R = cc.poincare_constant_mixed(pm.binomial(n, p), n).constant
        w.add(-abs(R - n * p * (1 - p)), {"n": n, "p": p, "R": R, "npq": n * p * (1 - p)})
    checks.append(w.check(cfg, "poincare.mixed-binomial", "nablamixed", 1e-9, exploratory=True))
    return checks


def log_sobolev_suite(cfg: SuiteConfig) -> list[Check]:
    checks = []
    bl, tight = _Worst(), _Worst()
    for rng in _rngs(cfg, "log-sobolev.poisson"):
        lam = float(rng.uniform(0.2, 5.0))
        Pi = pm.poisson(lam, cfg.trunc_tol)
        f = smp.random_log_lipschitz(rng, len(Pi) + 1)
        bl.add(cc.bobkov_ledoux_gap(lam, f, cfg.trunc_tol), lambda: {"lambda": lam, "f": f}, Pi.tail_bound)
        slack = cc.bobkov_ledoux_rhs(lam, f, cfg.trunc_tol) - cc.modified_lsi_rhs(Pi, f, 1.0 / lam)
        tight.add(slack, lambda: {"lambda": lam, "f": f})
    checks.append(bl.check(cfg, "log-sobolev.bobkov-ledoux", "bobled", 1e-10))
    checks.append(tight.check(cfg, "log-sobolev.lsi-tightens-bobkov-ledoux", "lsi", 1e-10))

    w = _Worst()
    for rng in _rngs(cfg, "log-sobolev.modified"):
        P = smp.random_tilted(rng, cfg.trunc_tol)
        f = smp.random_log_lipschitz(rng, len(P) + 1)
        g = cc.modified_lsi_gap(P, f)
        w.add(g.gap, lambda: {"family": P.family.to_dict(), "f": f, "c": g.c}, P.tail_bound)
    checks.append(w.check(cfg, "log-sobolev.modified-lsi", "lsi", 1e-10))

    # does the Poisson-type bound survive with only P* <=_st P?
    w = _Worst()
    for rng in _rngs(cfg, "log-sobolev.size-bias-st", min(cfg.trials, 50)):
        P = smp.random_st_not_lr(rng)
        if P is None:
            continue
        f = smp.random_log_lipschitz(rng, len(P) + 1)
        u = f[1:] / f[:-1]
        rhs = P.mean * float(P.probs @ (f[:-1] * (u - 1.0) ** 2))
        w.add(rhs - pm.ent_functional(P, f), lambda: {"pmf": P.to_dict(), "f": f})
    checks.append(w.check(cfg, "log-sobolev.size-bias-st", "lsi", 1e-10, exploratory=True))
    return checks


def _monotone_path(rng: np.random.Generator, m: int) -> so.PathSpec:
    k = int(rng.integers(1, m + 1))
    a, b = rng.uniform(0, 1, k), rng.uniform(0, 1, k)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return so.so_path(lo, hi) if rng.random() < 0.5 else so.so_path(hi, lo)


def shepp_olkin_suite(cfg: SuiteConfig) -> list[Check]:
    checks = []
    m = cfg.m
    ts = np.arange(1, 10) / 10

    w = _Worst()
    for rng in _rngs(cfg, "shepp-olkin.shannon"):
        path = so.random_path(rng, m) if rng.random() < 0.5 else so.so_path(*rng.uniform(0, 1, (2, int(rng.integers(1, m + 1)))))
        sd = so.max_second_difference(so.entropy_profile(path, cfg.grid_size))
        w.add(-sd, lambda: path.to_dict())
    checks.append(w.check(cfg, "shepp-olkin.shannon-concavity", "SO", 1e-8))

    key, loose = _Worst(), _Worst()
    for rng in _rngs(cfg, "shepp-olkin.key"):
        path = _monotone_path(rng, m)
        for t in ts:
            s = so.key_inequality_slack(path, t)
            key.add(s.min_slack, lambda: {"path": path.to_dict(), "t": t, "k": s.argmin_k, "f": s.interpretation})
        free = so.so_path(*rng.uniform(0, 1, (2, int(rng.integers(1, m + 1)))))
        for t in ts:
            s = so.key_inequality_slack(free, t)
            loose.add(s.min_slack, lambda: {"path": free.to_dict(), "t": t, "k": s.argmin_k, "f": s.interpretation})
    checks.append(key.check(cfg, "shepp-olkin.key-inequality-monotone", "key", 1e-9))
    checks.append(loose.check(cfg, "shepp-olkin.key-inequality-nonmonotone", "key", 1e-9, exploratory=True))

    w = _Worst()
    for rng in _rngs(cfg, "shepp-olkin.derivatives"):
        path = so.so_path(*rng.uniform(0, 1, (2, int(rng.integers(1, m + 1)))))
        t = float(rng.uniform(0, 1))
        d = so.path_pmf_derivatives(path, t)
        w.add(-max(d.fd_residual_1, d.fd_residual_2), lambda: {"path": path.to_dict(), "t": t})
    checks.append(w.check(cfg, "shepp-olkin.gh-finite-difference", "SO", 1e-6))

    checks.extend(conjecture_checks(cfg))
    return checks


def conjecture_checks(cfg: SuiteConfig) -> list[Check]:
    """Evidence for the generalised concavity and monotonicity conjectures."""
    checks = []
    m = min(cfg.m, 3)
    for kind, q in (("renyi", 1.5), ("tsallis", 2.0), ("tsallis", 4.0)):
        wit = so.find_convexity_witness(kind, q, m, cfg.trials, cfg.master_seed, cfg.grid_size)
        slack = -wit.second_difference if wit else 0.0
        name = f"shepp-olkin.{kind}-q{q:g}-witness"
        checks.append(
            Check(name, ANCHORS["so-conjecture"], slack, cfg.tolerance(name, so.WITNESS_THRESHOLD), True,
                  {"trials": cfg.trials, "m": m, "witness": wit})
        )
    res = so.monotone_entropy_check(m, cfg.trials, cfg.master_seed)
    name = "shepp-olkin.monotone-entropy"
    checks.append(
        Check(name, ANCHORS["so-monotone"], res.worst, cfg.tolerance(name, 1e-12), True,
              {"trials": res.trials, "m": m, "violations": [v.__dict__ for v in res.violations]})
    )
    return checks


SUITES: dict[str, Callable[[SuiteConfig], list[Check]]] = {
    "poisson-approx": poisson_approx_suite,
    "maxent": maxent_suite,
    "monotonicity": monotonicity_suite,
    "poincare": poincare_suite,
    "log-sobolev": log_sobolev_suite,
    "shepp-olkin": shepp_olkin_suite,
}


def run_suite(name: str, cfg: SuiteConfig) -> InequalityReport:
    if name == "all":
        checks = [c for fn in SUITES.values() for c in fn(cfg)]
    elif name in SUITES:
        checks = SUITES[name](cfg)
    else:
        raise BadParameter(f"unknown suite {name!r}; choose from {sorted(SUITES)} or all")
    return InequalityReport(name, checks, cfg.master_seed)
