"""Score functions, discrete Fisher informations and Poisson approximation bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from . import pmf as pm
from .errors import BadParameter, InfiniteInformation, InteriorZero, ZeroMean
from .pmf import Kind, Pmf


@dataclass(frozen=True)
class ScoreProfile:
    """Scaled score of one Pmf.

    ``rho[x]`` is NaN at leading zero-mass points, where the score is
    undefined and carries no weight.
    """

    rho: np.ndarray
    lam: float
    k_value: float
    johnstone: float | None = None


def _check_interval(P: Pmf) -> None:
    nz = np.flatnonzero(P.probs)
    if nz[-1] - nz[0] + 1 != nz.size:
        raise InteriorZero("mass function has a zero inside its support interval")


def scaled_score(P: Pmf) -> ScoreProfile:
    """rho_P(x) = (x+1) P(x+1) / (lambda_P P(x)) - 1 on the stored support.

    The mass at ``N + 1`` is zero for exact inputs and the analytic value
    for truncated families, so ``rho(N) = -1`` exactly in the former case.
    """
    lam = P.mean
    if lam <= 0:
        raise ZeroMean("scaled score needs a positive mean")
    _check_interval(P)
    p = P.probs
    ext = np.append(p[1:], P.next_mass())
    x = np.arange(p.size)
    pos = p > 0
    rho = np.full(p.size, np.nan)
    rho[pos] = (x[pos] + 1) * ext[pos] / (lam * p[pos]) - 1.0
    k = lam * float(p[pos] @ rho[pos] ** 2)
    return ScoreProfile(rho, lam, k)


def scaled_fisher(P: Pmf) -> float:
    """K(P) = lambda_P sum_x P(x) rho_P(x)^2."""
    return scaled_score(P).k_value


def johnstone_info(P: Pmf) -> float:
    """I(P) = sum_x (P(x-1) - P(x))^2 / P(x), summed where P(x) > 0.

    Finite-support (exact) inputs give ``inf`` through the boundary term at
    ``N + 1``.  For truncated families the analytic next mass is used; a
    truncated Pmf with no family omits that term, which is below its tail
    budget.
    """
    p = P.probs
    prev = np.concatenate(([0.0], p[:-1]))
    # a zero preceded by mass inside the stored range diverges
    if np.any((p == 0) & (prev > 0)):
        return math.inf
    pos = p > 0
    total = float((((prev - p) ** 2)[pos] / p[pos]).sum())
    if P.kind is Kind.EXACT:
        return math.inf
    nxt = P.next_mass()
    if nxt > 0:
        total += (p[-1] - nxt) ** 2 / nxt
    elif P.family is not None:
        return math.inf
    return total


def score_profile(P: Pmf) -> ScoreProfile:
    s = scaled_score(P)
    return ScoreProfile(s.rho, s.lam, s.k_value, johnstone_info(P))


def fisher_subadditivity_gap(Ps: Sequence[Pmf], kind: str = "scaledK") -> float:
    """Right-hand side minus left-hand side of the subadditivity inequality.

    ``scaledK``: (1/lambda_S) sum lambda_i K(P_i) - K(P_1 * ... * P_n).
    ``johnstoneI``: (I(P) + I(Q)) / 4 - I(P * Q) for exactly two inputs.
    """
    if not Ps:
        raise BadParameter("need at least one mass function")
    total = reduce(pm.convolve, Ps)
    if kind == "scaledK":
        lams = np.array([P.mean for P in Ps])
        ks = np.array([scaled_fisher(P) for P in Ps])
        return float(lams @ ks / lams.sum() - scaled_fisher(total))
    if kind == "johnstoneI":
        if len(Ps) != 2:
            raise BadParameter("johnstoneI subadditivity takes exactly two inputs")
        infos = [johnstone_info(P) for P in Ps]
        if not all(math.isfinite(v) for v in infos):
            raise InfiniteInformation("I(P) is infinite for a finite-support input")
        return sum(infos) / 4.0 - johnstone_info(total)
    raise BadParameter(f"unknown subadditivity kind {kind!r}")


@dataclass(frozen=True)
class PoissonApproxReport:
    lam: float
    K: float
    D_to_poisson: float
    tv: float
    pinsker_bound: float
    chain_ok: dict[str, bool] = field(default_factory=dict)
    error_budget: float = 0.0


def poisson_approx_report(
    P: Pmf, trunc_tol: float = pm.DEFAULT_TRUNC_TOL, slack: float = 1e-10
) -> PoissonApproxReport:
    """Relative entropy to the mean-matched Poisson against K(P) and TV."""
    lam = P.mean
    if lam <= 0:
        raise ZeroMean("Poisson approximation needs a positive mean")
    K = scaled_fisher(P)
    Pi = pm.poisson(lam, trunc_tol)
    D = max(pm.relative_entropy(P, Pi), 0.0)
    tv = pm.tv_distance(P, Pi)
    pinsker = math.sqrt(D / 2.0)
    chain = {
        "D_le_K": D <= K + slack,
        "TV_le_pinsker": tv <= pinsker + slack,
    }
    return PoissonApproxReport(lam, K, D, tv, pinsker, chain, P.tail_bound + Pi.tail_bound)


def binomial_relative_entropy_bound(n: int, lam: float) -> float:
    """lambda^2 / (n (n - lambda)): K(Bern(lam/n)) passed through subadditivity."""
    return lam * lam / (n * (n - lam))
