"""Deterministic random instances for the verification suites.

Every trial draws from its own generator, seeded from ``(master_seed,
crc32(suite name), trial index)`` through :class:`numpy.random.SeedSequence`,
so a trial's instance does not depend on which other trials ran.
"""

from __future__ import annotations

import zlib

import numpy as np
from scipy import special

from . import pmf as pm
from .pmf import OrderKind, Pmf


def trial_rng(master_seed: int, suite: str, index: int) -> np.random.Generator:
    key = zlib.crc32(suite.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([master_seed & (2**64 - 1), key, index]))


def random_pmf(rng: np.random.Generator, max_support: int = 12, min_support: int = 2) -> Pmf:
    """Dirichlet weights on 0..k, all positive; no shape constraint."""
    k = int(rng.integers(min_support, max_support + 1))
    w = rng.dirichlet(np.full(k, rng.uniform(0.3, 3.0)))
    w = np.maximum(w, 1e-6)
    return pm.make_pmf(w / w.sum())


def random_ulc(rng: np.random.Generator, max_support: int = 12, min_support: int = 2) -> Pmf:
    """Strictly ULC mass function on 0..k.

    log(P(x) x!) is a random concave piecewise-linear sequence: increments
    decrease by at least 0.05 at every step, which keeps the ULC inequality
    strict well above rounding.
    """
    k = int(rng.integers(min_support, max_support + 1))
    first = rng.normal(0.0, 1.5)
    drops = 0.05 + rng.exponential(0.6, size=k - 2) if k > 2 else np.zeros(0)
    slopes = first - np.concatenate(([0.0], np.cumsum(drops)))
    x = np.arange(k)
    logw = np.concatenate(([0.0], np.cumsum(slopes)))[:k] - special.gammaln(x + 1.0)
    w = np.exp(logw - logw.max())
    return pm.make_pmf(w / w.sum())


def random_bernoulli_sum(rng: np.random.Generator, max_m: int = 8) -> Pmf:
    m = int(rng.integers(1, max_m + 1))
    ps = rng.uniform(0.02, 0.98, size=m)
    return pm.make_pmf(pm.bernoulli_sum_probs(ps))


def random_ulc_mixed(rng: np.random.Generator, max_support: int = 12) -> Pmf:
    """Either a concave-profile ULC law or a Bernoulli sum."""
    if rng.random() < 0.75:
        return random_ulc(rng, max_support)
    return random_bernoulli_sum(rng, max_support - 1)


def random_tilted(rng: np.random.Generator, trunc_tol: float = pm.DEFAULT_TRUNC_TOL) -> Pmf:
    lam = rng.uniform(0.2, 5.0)
    beta = rng.uniform(0.0, 0.5)
    return pm.family_pmf("tilted-poisson", [lam, beta], trunc_tol)


def random_log_lipschitz(rng: np.random.Generator, n: int, step: float | None = None) -> np.ndarray:
    """Positive f on 0..n-1 with |log f(x+1) - log f(x)| <= step."""
    step = rng.uniform(0.05, 2.0) if step is None else step
    inc = rng.uniform(-step, step, size=n - 1)
    logf = np.concatenate(([rng.normal()], inc)).cumsum()
    return np.exp(logf)


def random_st_not_lr(rng: np.random.Generator, attempts: int = 10_000, max_support: int = 6) -> Pmf | None:
    """Search for P with P* <=_st P but not ULC (P* not <=_lr P)."""
    for _ in range(attempts):
        P = random_pmf(rng, max_support, 3)
        if pm.ulc_check(P):
            continue
        if pm.stochastic_order(P, pm.size_bias(P), OrderKind.STOCHASTIC):
            return P
    return None
