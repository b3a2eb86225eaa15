"""Poisson maximum entropy and monotonicity of entropy under thinning."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from . import pmf as pm
from .errors import BadParameter, NotULC, ZeroMean
from .pmf import OrderKind, Pmf
from .thinning import thin


@dataclass(frozen=True)
class MaxentGap:
    gap: float  # H(Pi_lambda) - H(P)
    hypothesis: str  # "ulc", "size-bias-st" or "none"
    error_budget: float


def maxent_gap(P: Pmf, trunc_tol: float = pm.DEFAULT_TRUNC_TOL) -> MaxentGap:
    """Entropy deficit of P against the Poisson with the same mean."""
    lam = P.mean
    if lam <= 0:
        raise ZeroMean("maximum entropy comparison needs a positive mean")
    Pi = pm.poisson(lam, trunc_tol)
    if pm.ulc_check(P):
        hyp = "ulc"
    elif pm.stochastic_order(P, pm.size_bias(P), OrderKind.STOCHASTIC):
        hyp = "size-bias-st"
    else:
        hyp = "none"
    budget = pm.entropy_budget(P) + pm.entropy_budget(Pi)
    return MaxentGap(pm.entropy(Pi) - pm.entropy(P), hyp, budget)


def thinned_sum(pmfs: Sequence[Pmf], alphas: Sequence[float]) -> Pmf:
    """Law of sum_i T_{alpha_i} X_i for independent X_i."""
    # ratios like a_i / (1 - a_j) can round just above one
    return reduce(pm.convolve, (thin(P, min(float(a), 1.0)) for P, a in zip(pmfs, alphas)))


def poisson_divergence(P: Pmf, trunc_tol: float = pm.DEFAULT_TRUNC_TOL) -> float:
    """D(P || Pi_{lambda_P})."""
    if P.mean <= 0:
        raise ZeroMean("relative entropy to the Poisson needs a positive mean")
    return pm.relative_entropy(P, pm.poisson(P.mean, trunc_tol))


@dataclass(frozen=True)
class ThinLawRecord:
    n: int
    D_n: float
    H_n: float


def thin_law_sequences(P: Pmf, n_max: int, trunc_tol: float = pm.DEFAULT_TRUNC_TOL) -> list[ThinLawRecord]:
    """D and H of sum_{i<=n} T_{1/n} X_i, X_i iid ~ P, for n = 1..n_max."""
    if n_max < 2:
        raise BadParameter("n_max must be at least 2")
    lam = P.mean
    if lam <= 0:
        raise ZeroMean("thinned sums need a positive mean")
    Pi = pm.poisson(lam, trunc_tol)
    out = []
    for n in range(1, n_max + 1):
        law = reduce(pm.convolve, [thin(P, 1.0 / n)] * n)
        out.append(ThinLawRecord(n, pm.relative_entropy(law, Pi), pm.entropy(law)))
    return out


@dataclass(frozen=True)
class LeaveOneOutInstance:
    pmfs: tuple[Pmf, ...]
    alphas: tuple[float, ...]
    kind: str = "entropy"  # or "relative-entropy"

    def __post_init__(self) -> None:
        object.__setattr__(self, "pmfs", tuple(self.pmfs))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if len(self.pmfs) != len(self.alphas) or len(self.pmfs) < 2:
            raise BadParameter("need matching pmfs and alphas, at least two of each")
        if any(a <= 0 for a in self.alphas) or abs(sum(self.alphas) - 1.0) > 1e-12:
            raise BadParameter("alphas must be positive and sum to one")
        if self.kind not in ("entropy", "relative-entropy"):
            raise BadParameter(f"unknown kind {self.kind!r}")


def leave_one_out_gap(inst: LeaveOneOutInstance, trunc_tol: float = pm.DEFAULT_TRUNC_TOL) -> float:
    """Slack in the leave-one-out inequality; nonnegative when it holds.

    entropy:           n H(sum T_{a_i} X_i) - sum_j a^(j) H(sum_{i!=j} T_{a_i/a^(j)} X_i)
    relative-entropy:  sum_j a^(j) D(...) - n D(sum T_{a_i} X_i)

    with ``a^(j) = 1 - a_j``, ``n + 1`` summands, and ``D(Y)`` the relative
    entropy of Y to the Poisson with Y's mean.
    """
    if inst.kind == "entropy":
        bad = [i for i, P in enumerate(inst.pmfs) if not pm.ulc_check(P)]
        if bad:
            raise NotULC(f"entropy form needs ULC inputs; index {bad[0]} is not")
        F = pm.entropy
    else:
        F = lambda P: poisson_divergence(P, trunc_tol)  # noqa: E731
    a = np.array(inst.alphas)
    n = len(a) - 1
    full = F(thinned_sum(inst.pmfs, a))
    rest = 0.0
    for j in range(n + 1):
        aj = 1.0 - a[j]
        idx = [i for i in range(n + 1) if i != j]
        rest += aj * F(thinned_sum([inst.pmfs[i] for i in idx], a[idx] / aj))
    gap = n * full - rest
    return float(gap if inst.kind == "entropy" else -gap)
