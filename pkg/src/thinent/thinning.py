"""Renyi thinning and the thinning interpolation towards the Poisson law.

The interpolation ``P_alpha`` is the law of ``T_alpha X + T_{1-alpha} Z`` with
``Z`` Poisson of the same mean as ``X``.  It runs from the Poisson at
``alpha = 0`` to ``P`` at ``alpha = 1`` and obeys

    d/d alpha P_alpha(x) = (lambda / alpha) * Dstar(P_alpha rho_alpha)(x),

with ``Dstar f(x) = f(x-1) - f(x)`` and ``f(-1) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special, stats

from . import pmf as pm
from .errors import AlphaOutOfRange, AlphaTooClose, BadParameter, ZeroMean
from .information import scaled_score
from .pmf import Family, Kind, Pmf

def thin_matrix(n: int, alpha: float) -> np.ndarray:
    """B[x, y] = C(y, x) alpha^x (1 - alpha)^(y - x) for x, y in 0..n-1."""
    x = np.arange(n)
    try:
        return stats.binom.pmf(x[:, None], x[None, :], alpha)
    except OverflowError:
        # scipy's incomplete-beta path overflows for subnormal alpha
        X, Y = x[:, None], x[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            logb = (
                special.gammaln(Y + 1.0) - special.gammaln(X + 1.0) - special.gammaln(np.abs(Y - X) + 1.0)
                + special.xlogy(X, alpha) + special.xlog1py(Y - X, -alpha)
            )
        return np.where(X <= Y, np.exp(logb), 0.0)


def thin(P: Pmf, alpha: float) -> Pmf:
    """T_alpha P, by exact summation over the stored support."""
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha={alpha} outside [0, 1]")
    probs = thin_matrix(len(P), alpha) @ P.probs
    fam = None
    if P.kind is Kind.TRUNCATED and P.family is not None and P.family.name == "poisson" and alpha > 0:
        fam = Family("poisson", (alpha * P.family.params[0],))
    probs = np.clip(probs, 0.0, None)
    if P.kind is Kind.EXACT:
        probs = probs / probs.sum()
    return pm.make_pmf(probs, P.tail_bound, family=fam)


@dataclass(frozen=True)
class InterpolationState:
    base: Pmf
    alpha: float
    lam: float
    law: Pmf


def interpolate(P: Pmf, alpha: float, trunc_tol: float = pm.DEFAULT_TRUNC_TOL) -> InterpolationState:
    """Law of T_alpha X + T_{1-alpha} Z with Z ~ Poisson(mean of P)."""
    lam = P.mean
    if lam <= 0:
        raise ZeroMean("interpolation needs a positive mean")
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha={alpha} outside [0, 1]")
    law = pm.convolve(thin(P, alpha), pm.poisson((1.0 - alpha) * lam, trunc_tol))
    return InterpolationState(P, alpha, lam, law)


def _window(P: Pmf) -> int:
    # long enough that the Poisson factor's mass past the window is < 1e-16
    return len(P) + len(pm.poisson(P.mean, 1e-16)) + 8


def law_on_window(P: Pmf, alpha: float, length: int) -> np.ndarray:
    """P_alpha on 0..length-1 with an untruncated Poisson factor.

    Keeping the window fixed makes ``P_alpha`` smooth in ``alpha``, which the
    finite-difference checks rely on.
    """
    thinned = thin_matrix(len(P), alpha) @ P.probs
    x = np.arange(length)
    poi = stats.poisson.pmf(x, (1.0 - alpha) * P.mean)
    return np.convolve(thinned, poi)[:length]


def _flux(probs: np.ndarray, lam: float) -> np.ndarray:
    """(x+1) P(x+1) / lam - P(x), i.e. P_alpha * rho_alpha.

    The score module normalises by the window's own mean, which differs
    from ``lam`` only by the (sub-1e-16) mass outside the window; rescale.
    """
    total = float(probs.sum())
    law = pm.make_pmf(probs, max(1.0 - total, 0.0) + 1e-15)
    s = scaled_score(law)
    out = np.zeros(probs.size)
    n = len(law)
    ratio = s.lam / lam
    out[:n] = np.nan_to_num(law.probs * s.rho) * ratio + law.probs * (ratio - 1.0)
    return out


def _dstar(f: np.ndarray) -> np.ndarray:
    return np.concatenate(([0.0], f[:-1])) - f


def rounding_floor(step: float) -> float:
    """Worst-case rounding error of the central quotient at ``step / 2``.

    Masses are at most 1, so each evaluation is off by at most machine
    epsilon and the quotient by ``2 eps / step``.  A residual below this
    carries no information about the truncation order.
    """
    return 2.0 * float(np.finfo(float).eps) / step


def pde_residual(P: Pmf, alpha: float, step: float = 1e-4, richardson: bool = False) -> float:
    """max_x |dP_alpha/d alpha (central difference) - (lam/alpha) Dstar(P_alpha rho_alpha)|.

    With ``richardson`` the derivative is extrapolated from ``step`` and
    ``step / 2``, which removes the O(step^2) term of the difference quotient.
    """
    if not (step < alpha < 1.0 - step):
        raise AlphaTooClose(f"alpha={alpha} within step={step} of the ends of [0, 1]")
    lam = P.mean
    if lam <= 0:
        raise ZeroMean("interpolation needs a positive mean")
    n = _window(P)

    def central(h: float) -> np.ndarray:
        return (law_on_window(P, alpha + h, n) - law_on_window(P, alpha - h, n)) / (2 * h)

    fd = central(step)
    if richardson:
        fd = (4.0 * central(step / 2) - fd) / 3.0
    rhs = (lam / alpha) * _dstar(_flux(law_on_window(P, alpha, n), lam))
    return float(np.max(np.abs(fd - rhs)))


def pde_step_halving(P: Pmf, alpha: float, step: float = 1e-4) -> tuple[float, float]:
    """Residual at ``step`` and its ratio to the residual at ``step / 2``.

    The ratio is NaN when the residual at ``step`` is under ``rounding_floor(step)``.
    """
    r1 = pde_residual(P, alpha, step)
    if r1 < rounding_floor(step):
        return r1, math.nan
    r2 = pde_residual(P, alpha, step / 2)
    return r1, r1 / r2 if r2 > 0 else math.inf


def _log_poisson(x: np.ndarray, lam: float) -> np.ndarray:
    return -lam + x * math.log(lam) - special.gammaln(x + 1.0)


def free_energy(P: Pmf, alpha: float, length: int | None = None) -> float:
    """Lambda(alpha) = -sum_x P_alpha(x) log Pi_lambda(x).

    At ``alpha = 0`` the law is the Poisson itself, so this is H(Pi_lambda).
    """
    n = length or _window(P)
    probs = law_on_window(P, alpha, n)
    return float(-probs @ _log_poisson(np.arange(n), P.mean))


def _cov_derivative(P: Pmf, alpha: float, n: int) -> float:
    lam = P.mean
    probs = law_on_window(P, alpha, n)
    x = np.arange(n)
    return float((lam / alpha) * _flux(probs, lam) @ np.log((x + 1.0) / lam))


@dataclass(frozen=True)
class FreeEnergyPoint:
    alpha: float
    lambda_val: float
    deriv_cov: float
    deriv_fd: float
    richardson: float  # |cov - fd(step)| / |cov - fd(step/2)|


def _fd(P: Pmf, a: float, h: float, n: int) -> float:
    F = lambda t: free_energy(P, t, n)  # noqa: E731
    if a - h < 0:
        return (-3 * F(a) + 4 * F(a + h) - F(a + 2 * h)) / (2 * h)
    if a + h > 1:
        return (3 * F(a) - 4 * F(a - h) + F(a - 2 * h)) / (2 * h)
    return (F(a + h) - F(a - h)) / (2 * h)


def free_energy_path(P: Pmf, grid: Sequence[float], step: float = 1e-4) -> list[FreeEnergyPoint]:
    """Lambda and two evaluations of its derivative along a sorted alpha grid.

    ``deriv_cov`` is the covariance form (lam/alpha) sum P_alpha rho_alpha
    log((x+1)/lam); at ``alpha = 0`` it is the right limit, obtained by
    quadratic extrapolation from ``step``, ``2 step`` and ``3 step``.
    """
    if P.mean <= 0:
        raise ZeroMean("free energy path needs a positive mean")
    grid = [float(a) for a in grid]
    if any(not 0.0 <= a <= 1.0 for a in grid) or grid != sorted(grid):
        raise BadParameter("grid must be sorted inside [0, 1]")
    n = _window(P)
    out = []
    for a in grid:
        if a == 0.0:
            d1, d2, d3 = (_cov_derivative(P, k * step, n) for k in (1, 2, 3))
            cov = 3 * d1 - 3 * d2 + d3
        else:
            cov = _cov_derivative(P, a, n)
        fd1 = _fd(P, a, step, n)
        fd2 = _fd(P, a, step / 2, n)
        e2 = abs(cov - fd2)
        out.append(FreeEnergyPoint(a, free_energy(P, a, n), cov, fd1, abs(cov - fd1) / e2 if e2 > 0 else math.inf))
    return out
