"""Poincare constants, modified log-Sobolev functionals and orthogonal polynomials.

The Poincare constant

    R_P = sup_g var_P(g) / sum_x P(x) (g(x+1) - g(x))^2

is computed exactly on the stored support.  In difference coordinates
``d(x) = g(x+1) - g(x)`` the variance is the quadratic form with matrix
``M(y, z) = F(min) * S(max)``, ``F`` the CDF and ``S`` the survival function,
and the energy is diagonal, so ``R_P`` is the top generalised eigenvalue.
The energy term at the last stored point is dropped (``g`` extended flatly),
which can only enlarge the estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.special

from . import pmf as pm
from .errors import (
    BadParameter,
    DegenerateSupport,
    NonPositiveF,
    NotCLogConcave,
    SupportExceedsN,
)
from .pmf import Pmf

FORWARD = "forward-delta"
MIXED = "mixed-nabla-n"


@dataclass(frozen=True)
class PoincareEstimate:
    constant: float
    maximizer: np.ndarray  # g on 0..N, g(0) = 0, unit energy
    truncation_note: float
    derivative_kind: str
    residual: float = 0.0


def _variance_form(q: np.ndarray) -> np.ndarray:
    """Covariance of the indicators 1[X > y], y = 0..len(q)-2."""
    cdf = np.cumsum(q)[:-1]
    surv = np.cumsum(q[::-1])[::-1][1:]  # summed from the right: accurate tails
    i = np.arange(cdf.size)
    lo = np.minimum.outer(i, i)
    hi = np.maximum.outer(i, i)
    return cdf[lo] * surv[hi]


def _g_from_d(d: np.ndarray, start: int, length: int) -> np.ndarray:
    """g = 0 up to ``start``, then partial sums of d, then flat."""
    g = np.zeros(length)
    g[start + 1 : start + 1 + d.size] = np.cumsum(d)
    g[start + 1 + d.size :] = g[start + d.size]
    return g


def poincare_constant(P: Pmf) -> PoincareEstimate:
    """Largest var_P(g) / sum_{x<N} P(x) (Delta g(x))^2 over nonconstant g."""
    q = P.probs / P.total
    nz = np.flatnonzero(q)
    a, b = int(nz[0]), int(nz[-1])
    if b == a:
        raise DegenerateSupport("Poincare constant needs at least two support points")
    inner = q[a : b + 1]
    zero = np.flatnonzero(inner[:-1] == 0)
    if zero.size:
        # a free jump across a zero-mass point: unbounded quotient
        d = np.zeros(b - a)
        d[zero[0]] = 1.0
        return PoincareEstimate(math.inf, _g_from_d(d, a, len(P)), P.tail_bound, FORWARD, 0.0)
    M = _variance_form(inner)
    w = np.sqrt(inner[:-1])
    S = M / np.outer(w, w)
    vals, vecs = scipy.linalg.eigh(S)
    R, u = float(vals[-1]), vecs[:, -1]
    residual = float(np.linalg.norm(S @ u - R * u) / max(abs(R), 1e-300))
    d = u / w  # unit energy: sum inner[x] d(x)^2 = |u|^2 = 1
    if d.sum() < 0:
        d = -d
    g = _g_from_d(d, a, len(P))
    return PoincareEstimate(R, g, P.tail_bound, FORWARD, residual)


def nabla_matrix(n: int) -> np.ndarray:
    """A with (nabla_n g)(x) = (A d)(x), d the forward differences of g on 0..n."""
    A = np.zeros((n + 1, n))
    x = np.arange(n + 1)
    A[x[:-1], x[:-1]] = 1.0 - x[:-1] / n
    A[x[1:], x[1:] - 1] = x[1:] / n
    return A


def poincare_constant_mixed(P: Pmf, n: int) -> PoincareEstimate:
    """Largest var_P(g) / sum_x P(x) (nabla_n g(x))^2 for g on 0..n."""
    if n < 1:
        raise BadParameter("n must be a positive integer")
    if P.support_end > n:
        raise SupportExceedsN(f"support end {P.support_end} exceeds n={n}")
    if np.count_nonzero(P.probs) < 2:
        raise DegenerateSupport("Poincare constant needs at least two support points")
    q = P.values(n + 1) / P.total
    M = _variance_form(q)
    A = nabla_matrix(n)
    E = A.T @ (q[:, None] * A)
    evals, evecs = scipy.linalg.eigh(E)
    null = evals <= 1e-14 * evals[-1]
    if np.any(null):
        # directions with zero energy: unbounded if they carry variance
        V = evecs[:, null]
        if np.max(np.abs(np.diag(V.T @ M @ V))) > 1e-14:
            k = int(np.argmax(np.diag(V.T @ M @ V)))
            return PoincareEstimate(math.inf, _g_from_d(V[:, k], 0, n + 1), P.tail_bound, MIXED, 0.0)
        keep = evecs[:, ~null]
        M, E = keep.T @ M @ keep, keep.T @ E @ keep
    else:
        keep = None
    vals, vecs = scipy.linalg.eigh(M, E)
    R, v = float(vals[-1]), vecs[:, -1]
    residual = float(np.linalg.norm(M @ v - R * (E @ v)) / max(np.linalg.norm(M @ v), 1e-300))
    d = v if keep is None else keep @ v
    d = d / math.sqrt(d @ (A.T @ (q[:, None] * A)) @ d)
    if d.sum() < 0:
        d = -d
    return PoincareEstimate(R, _g_from_d(d, 0, n + 1), P.tail_bound, MIXED, residual)


def rayleigh_quotient(P: Pmf, g: Sequence[float] | np.ndarray, mixed_n: int | None = None) -> float:
    """var_P(g) over the forward (or mixed) energy, with the conventions above."""
    g = np.asarray(g, dtype=float)
    if mixed_n is None:
        q = P.probs / P.total
        g = g[: q.size]
        var = q @ (g - q @ g) ** 2
        energy = q[:-1] @ np.diff(g) ** 2
    else:
        q = P.values(mixed_n + 1) / P.total
        g = g[: mixed_n + 1]
        var = q @ (g - q @ g) ** 2
        energy = q @ (nabla_matrix(mixed_n) @ np.diff(g)) ** 2
    return float(var / energy)


@dataclass(frozen=True)
class ClcPoincare:
    c: float
    bound: float
    estimate: PoincareEstimate
    satisfied: bool


def _clc_constant(P: Pmf) -> float:
    if not P.full_support_family:
        raise NotCLogConcave(
            "c-log-concave bounds need a truncated family supported on all of Z_+"
        )
    c = pm.c_log_concavity(P)
    if not c > 0:
        raise NotCLogConcave(f"c = {c} is not positive")
    return c


def poincare_bound_clc(P: Pmf, slack: float = 1e-6) -> ClcPoincare:
    """Compare the Poincare constant with 1/c for c-log-concave P."""
    c = _clc_constant(P)
    est = poincare_constant(P)
    return ClcPoincare(c, 1.0 / c, est, est.constant <= 1.0 / c + slack)


def _positive(f: Sequence[float] | np.ndarray, n: int) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.size < n:
        raise BadParameter(f"f needs {n} values (support plus one point), got {f.size}")
    f = f[:n]
    if np.any(f <= 0) or not np.all(np.isfinite(f)):
        raise NonPositiveF("f must be finite and strictly positive")
    return f


def bobkov_ledoux_rhs(lam: float, f: Sequence[float] | np.ndarray, trunc_tol: float = pm.DEFAULT_TRUNC_TOL) -> float:
    """lam * sum_x Pi_lam(x) (f(x+1) - f(x))^2 / f(x) over the truncated support."""
    Pi = pm.poisson(lam, trunc_tol)
    f = _positive(f, len(Pi) + 1)
    u = f[1:] / f[:-1]
    return float(lam * Pi.probs @ (f[:-1] * (u - 1.0) ** 2))


def bobkov_ledoux_gap(lam: float, f: Sequence[float] | np.ndarray, trunc_tol: float = pm.DEFAULT_TRUNC_TOL) -> float:
    """RHS minus Ent_{Pi_lam}(f); nonnegative by the Bobkov-Ledoux inequality."""
    Pi = pm.poisson(lam, trunc_tol)
    f = _positive(f, len(Pi) + 1)
    return bobkov_ledoux_rhs(lam, f, trunc_tol) - pm.ent_functional(Pi, f)


def modified_lsi_rhs(P: Pmf, f: Sequence[float] | np.ndarray, c: float) -> float:
    """(1/c) sum_x P(x) f(x+1) (log(f(x+1)/f(x)) - 1 + f(x)/f(x+1))."""
    f = _positive(f, len(P) + 1)
    u = f[1:] / f[:-1]
    # f(x+1)(log u - 1 + 1/u) = f(x) (u log u - u + 1)
    return float(P.probs @ (f[:-1] * scipy.special.kl_div(u, 1.0)) / c)


@dataclass(frozen=True)
class LsiGap:
    gap: float
    c: float
    rhs: float
    ent: float


def modified_lsi_gap(P: Pmf, f: Sequence[float] | np.ndarray) -> LsiGap:
    c = _clc_constant(P)
    f = _positive(f, len(P) + 1)
    rhs = modified_lsi_rhs(P, f, c)
    ent = pm.ent_functional(P, f)
    return LsiGap(rhs - ent, c, rhs, ent)


# ---------------------------------------------------------------------------
# orthogonal polynomials


@dataclass(frozen=True)
class OrthoPolys:
    """Monic orthogonal polynomials p_{k+1} = (x - a_k) p_k - b_k p_{k-1}."""

    family: str
    params: tuple[float, ...]
    a: np.ndarray  # a_0 .. a_{d-1}
    b: np.ndarray  # b_0 .. b_d (b_d only enters the norm of p_d)
    coeffs: np.ndarray  # row k: power-basis coefficients of p_k, ascending

    def __call__(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        """Values p_k(x) for k = 0..max_degree, shape (max_degree+1, len(x))."""
        x = np.asarray(x, dtype=float)
        out = np.zeros((self.a.size + 1, x.size))
        out[0] = 1.0
        if self.a.size:
            out[1] = x - self.a[0]
        for k in range(1, self.a.size):
            out[k + 1] = (x - self.a[k]) * out[k] - self.b[k] * out[k - 1]
        return out

    @property
    def norms(self) -> np.ndarray:
        """Squared norms sum_x w(x) p_k(x)^2 = b_1 ... b_k, k = 0..max_degree."""
        return np.concatenate(([1.0], np.cumprod(self.b[1:])))


def orthogonal_polys(family: str, params: Sequence[float], max_degree: int) -> OrthoPolys:
    """Charlier (weight Poisson(lam)) or Krawtchouk (weight Binomial(n, p))."""
    params = tuple(float(v) for v in params)
    if max_degree < 0:
        raise BadParameter("max_degree must be nonnegative")
    k = np.arange(max_degree + 1, dtype=float)
    if family == "charlier":
        if len(params) != 1 or params[0] <= 0:
            raise BadParameter("charlier takes lam > 0")
        lam = params[0]
        a, b = k + lam, k * lam
        a = a[:max_degree]
    elif family == "krawtchouk":
        if len(params) != 2:
            raise BadParameter("krawtchouk takes (n, p)")
        n, p = params
        if n < 1 or n != int(n) or not 0 < p < 1:
            raise BadParameter("krawtchouk needs integer n >= 1 and 0 < p < 1")
        if max_degree > n:
            raise BadParameter(f"max_degree {max_degree} exceeds support size {int(n)}")
        a = p * (n - k) + k * (1 - p)
        b = k * p * (1 - p) * (n - k + 1)
        a = a[:max_degree]
    else:
        raise BadParameter(f"unknown polynomial family {family!r}")
    coeffs = np.zeros((max_degree + 1, max_degree + 1))
    coeffs[0, 0] = 1.0
    for j in range(max_degree):
        nxt = np.zeros(max_degree + 1)
        nxt[1:] = coeffs[j, :-1]
        nxt -= a[j] * coeffs[j]
        if j > 0:
            nxt -= b[j] * coeffs[j - 1]
        coeffs[j + 1] = nxt
    return OrthoPolys(family, params, a, b, coeffs)
