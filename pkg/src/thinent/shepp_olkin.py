"""Entropy of Bernoulli sums along affine parameter paths.

For ``p(t) = (1 - t) p0 + t p1`` the law ``P_t`` of a sum of independent
Bernoulli(p_i(t)) variables is a polynomial in ``t`` with

    dP/dt(k)   = g(k-1) - g(k),             g(k) = sum_i p_i' P^(i)(k)
    d2P/dt2(k) = h(k-2) - 2 h(k-1) + h(k),  h(k) = sum_{i != j} p_i' p_j' P^(ij)(k)

where ``P^(i)`` omits coordinate ``i`` and ``P^(ij)`` omits ``i`` and ``j``
(``h`` sums over ordered pairs).  Both forms are checked against central
finite differences on every call.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import special

from . import pmf as pm
from .errors import BadParameter, BadQ, DirectionNotIncreasing, LengthMismatch, OutOfRange
from .pmf import Pmf
from .sampling import trial_rng

WITNESS_THRESHOLD = 1e-7
SCAN_GRID = 101


@dataclass(frozen=True)
class PathSpec:
    p0: tuple[float, ...]
    p1: tuple[float, ...]
    monotone: bool

    @property
    def m(self) -> int:
        return len(self.p0)

    @property
    def slopes(self) -> np.ndarray:
        return np.asarray(self.p1) - np.asarray(self.p0)

    def at(self, t: float) -> np.ndarray:
        return (1.0 - t) * np.asarray(self.p0) + t * np.asarray(self.p1)

    def to_dict(self) -> dict:
        return {"p0": list(self.p0), "p1": list(self.p1), "monotone": self.monotone}


def so_path(p0: Sequence[float], p1: Sequence[float]) -> PathSpec:
    """Validate an affine path in [0, 1]^m; the cube is convex so endpoints suffice."""
    a = np.asarray(p0, dtype=float).ravel()
    b = np.asarray(p1, dtype=float).ravel()
    if a.size != b.size:
        raise LengthMismatch(f"p0 has {a.size} coordinates, p1 has {b.size}")
    if a.size == 0:
        raise LengthMismatch("a path needs at least one coordinate")
    for name, v in (("p0", a), ("p1", b)):
        bad = np.flatnonzero(~((v >= 0.0) & (v <= 1.0)))
        if bad.size:
            raise OutOfRange(f"{name}[{bad[0]}] = {v[bad[0]]} outside [0, 1]")
    d = b - a
    monotone = bool(np.all(d >= 0) or np.all(d <= 0))
    return PathSpec(tuple(a.tolist()), tuple(b.tolist()), monotone)


def _check_t(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise OutOfRange(f"t = {t} outside [0, 1]")


def _leave_out(ps: np.ndarray, skip: Sequence[int]) -> np.ndarray:
    keep = np.delete(ps, list(skip))
    return pm.bernoulli_sum_probs(keep)


def _g_h(ps: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = ps.size
    g = np.zeros(m)
    for i in np.flatnonzero(d):
        g += d[i] * _leave_out(ps, [i])
    h = np.zeros(max(m - 1, 0))
    moving = np.flatnonzero(d)
    for a, i in enumerate(moving):
        for j in moving[a + 1 :]:
            h += 2.0 * d[i] * d[j] * _leave_out(ps, [i, j])
    return g, h


def _pad(v: np.ndarray, before: int, length: int) -> np.ndarray:
    out = np.zeros(length)
    out[before : before + v.size] = v
    return out


def _first_from_g(g: np.ndarray) -> np.ndarray:
    m1 = g.size + 1
    return _pad(g, 1, m1) - _pad(g, 0, m1)


def _second_from_h(h: np.ndarray, m1: int) -> np.ndarray:
    return _pad(h, 2, m1) - 2.0 * _pad(h, 1, m1) + _pad(h, 0, m1)


@dataclass(frozen=True)
class DerivativeDecomposition:
    pmf: Pmf
    g: np.ndarray
    h: np.ndarray
    fd_residual_1: float
    fd_residual_2: float


def _fd_residuals(path: PathSpec, t: float, g: np.ndarray, h: np.ndarray, step: float) -> tuple[float, float]:
    # P_t is a polynomial in t, so evaluating slightly outside [0, 1] is harmless
    P = lambda s: pm.bernoulli_sum_probs(path.at(s))  # noqa: E731
    lo, mid, hi = P(t - step), P(t), P(t + step)
    d1 = (hi - lo) / (2 * step)
    d2 = (hi - 2 * mid + lo) / step**2
    r1 = float(np.max(np.abs(d1 - _first_from_g(g))))
    r2 = float(np.max(np.abs(d2 - _second_from_h(h, mid.size))))
    return r1, r2


def path_pmf_derivatives(path: PathSpec, t: float, step: float = 1e-4) -> DerivativeDecomposition:
    """P_t with its gradient-form first and second t-derivatives."""
    _check_t(t)
    ps = path.at(t)
    g, h = _g_h(ps, path.slopes)
    r1, r2 = _fd_residuals(path, t, g, h, step)
    law = pm.make_pmf(np.clip(pm.bernoulli_sum_probs(ps), 0.0, None))
    return DerivativeDecomposition(law, g, h, r1, r2)


@dataclass(frozen=True)
class KeySlack:
    min_slack: float
    argmin_k: int
    exploratory: bool  # True off the monotone regime
    interpretation: str = "f = P_t"


def key_slack_profile(path: PathSpec, t: float) -> np.ndarray:
    """slack(k) for k = 0..m with f = P_t and g, h zero outside their ranges."""
    _check_t(t)
    ps = path.at(t)
    f = pm.bernoulli_sum_probs(ps)
    g, h = _g_h(ps, path.slopes)
    n = f.size
    F = _pad(f, 0, n + 2)
    G = _pad(g, 0, n + 1)
    H = _pad(h, 0, n)
    k = np.arange(n)
    return (
        2 * G[k] * G[k + 1] * F[k + 1]
        - G[k] ** 2 * F[k + 2]
        - G[k + 1] ** 2 * F[k]
        - H[k] * (F[k + 1] ** 2 - F[k] * F[k + 2])
    )


def key_inequality_slack(path: PathSpec, t: float) -> KeySlack:
    if not 0.0 < t < 1.0:
        raise OutOfRange(f"t = {t} outside (0, 1)")
    s = key_slack_profile(path, t)
    k = int(np.argmin(s))
    return KeySlack(float(s[k]), k, not path.monotone)


# ---------------------------------------------------------------------------
# entropy profiles


def entropy_of(probs: np.ndarray, kind: str = "shannon", q: float = 1.0) -> float:
    """Shannon, Renyi or Tsallis entropy of a probability vector (nats)."""
    if not q > 0:
        raise BadQ(f"q must be positive, got {q}")
    if kind not in ("shannon", "renyi", "tsallis"):
        raise BadParameter(f"unknown entropy kind {kind!r}")
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    if kind == "shannon" or q == 1.0:
        return float(special.entr(p).sum())
    s = float(np.sum(p[p > 0] ** q))
    if kind == "renyi":
        return math.log(s) / (1.0 - q)
    return (1.0 - s) / (q - 1.0)


@dataclass(frozen=True)
class ProfilePoint:
    t: float
    value: float
    second_difference: float  # NaN at the two ends


def entropy_profile(path: PathSpec, grid_size: int = 101, kind: str = "shannon", q: float = 1.0) -> list[ProfilePoint]:
    """Entropy of P_t on a uniform grid with divided central second differences."""
    if grid_size < 5:
        raise BadParameter("grid_size must be at least 5")
    if not q > 0:
        raise BadQ(f"q must be positive, got {q}")
    ts = np.linspace(0.0, 1.0, grid_size)
    vals = np.array([entropy_of(pm.bernoulli_sum_probs(path.at(t)), kind, q) for t in ts])
    dt = ts[1] - ts[0]
    sd = np.full(grid_size, np.nan)
    sd[1:-1] = (vals[2:] - 2 * vals[1:-1] + vals[:-2]) / dt**2
    return [ProfilePoint(float(t), float(v), float(s)) for t, v, s in zip(ts, vals, sd)]


def max_second_difference(profile: Sequence[ProfilePoint]) -> float:
    return float(np.nanmax([p.second_difference for p in profile]))


def write_profile_csv(profile: Sequence[ProfilePoint], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value", "second_difference"])
        for p in profile:
            w.writerow([repr(p.t), repr(p.value), "" if math.isnan(p.second_difference) else repr(p.second_difference)])


# ---------------------------------------------------------------------------
# conjecture scans


def random_path(rng: np.random.Generator, m: int) -> PathSpec:
    """Affine path on 1..m moving coordinates (the rest pinned at 0).

    Endpoints mix uniform draws, cube vertices and points within 1e-3 of a
    vertex, where the generalised entropies bend the most.
    """
    k = int(rng.integers(1, m + 1))
    ends = []
    for _ in range(2):
        style = rng.integers(3)
        if style == 0:
            v = rng.uniform(0.0, 1.0, k)
        elif style == 1:
            v = rng.integers(0, 2, k).astype(float)
        else:
            v = np.abs(rng.integers(0, 2, k) - rng.uniform(0.0, 1e-3, k))
        ends.append(np.concatenate((v, np.zeros(m - k))))
    return so_path(ends[0], ends[1])


@dataclass(frozen=True)
class Witness:
    path: PathSpec
    t: float
    second_difference: float
    kind: str
    q: float

    def to_dict(self) -> dict:
        return {"path": self.path.to_dict(), "t": self.t, "second_difference": self.second_difference, "kind": self.kind, "q": self.q}


def find_convexity_witness(
    kind: str, q: float, m: int, trials: int, seed: int, grid_size: int = SCAN_GRID
) -> Witness | None:
    """First sampled path whose entropy profile bends upward past the threshold."""
    for i in range(trials):
        path = random_path(trial_rng(seed, f"convexity/{m}", i), m)
        prof = entropy_profile(path, grid_size, kind, q)
        sd = np.array([p.second_difference for p in prof])
        j = int(np.nanargmax(sd))
        if sd[j] > WITNESS_THRESHOLD:
            return Witness(path, prof[j].t, float(sd[j]), kind, q)
    return None


@dataclass(frozen=True)
class CriticalQ:
    q_hat: float  # NaN if no witness anywhere in the search range
    bracket: tuple[float, float]
    witness: Witness | None


def critical_q_search(
    kind: str, m: int, trials: int, seed: int, lo: float = 1.0, hi: float = 6.0, width: float = 0.05
) -> CriticalQ:
    """Bisection for the smallest q with a sampled convexity witness.

    The same trial paths are used at every q, so the search is monotone
    in what it sees.  Absence of a witness is evidence, not proof.
    """
    if kind not in ("renyi", "tsallis"):
        raise BadParameter(f"kind must be renyi or tsallis, got {kind!r}")
    if m < 2 or trials < 1:
        raise BadParameter("need m >= 2 and trials >= 1")
    top = find_convexity_witness(kind, hi, m, trials, seed)
    if top is None:
        return CriticalQ(math.nan, (hi, math.inf), None)
    best = top
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        w = find_convexity_witness(kind, mid, m, trials, seed)
        if w is None:
            lo = mid
        else:
            hi, best = mid, w
    return CriticalQ(0.5 * (lo + hi), (lo, hi), best)


def tsallis_root(lo: float = 2.5, hi: float = 5.0) -> float:
    """Root of 2 - 4q + 2^q in (lo, hi)."""
    from scipy.optimize import brentq

    return float(brentq(lambda q: 2.0 - 4.0 * q + 2.0**q, lo, hi, xtol=1e-14))


def directional_entropy_differences(p: Sequence[float], direction: Sequence[float], steps: int = 20) -> np.ndarray:
    """H(p + s_{k+1} d) - H(p + s_k d) for s on a uniform grid of [0, 1]."""
    p = np.asarray(p, dtype=float)
    d = np.asarray(direction, dtype=float)
    if p.shape != d.shape:
        raise LengthMismatch("p and direction differ in length")
    if np.any(d < 0):
        raise DirectionNotIncreasing(f"direction has a decreasing coordinate at index {int(np.argmax(d < 0))}")
    if np.any(p < 0) or np.any(p + d > 1):
        raise OutOfRange("p and p + direction must lie in [0, 1]")
    hs = [entropy_of(pm.bernoulli_sum_probs(p + s * d)) for s in np.linspace(0.0, 1.0, steps + 1)]
    return np.diff(hs)


@dataclass(frozen=True)
class MonotoneViolation:
    p: list[float]
    direction: list[float]
    min_difference: float


@dataclass(frozen=True)
class MonotoneCheck:
    trials: int
    violations: list[MonotoneViolation]
    worst: float


def monotone_entropy_check(m: int, trials: int, seed: int, slack: float = 1e-12) -> MonotoneCheck:
    """Entropy along random increasing directions inside [0, 1/2]^m."""
    if m < 1:
        raise BadParameter("m must be at least 1")
    violations = []
    worst = math.inf
    for i in range(trials):
        rng = trial_rng(seed, f"monotone-entropy/{m}", i)
        p = rng.uniform(0.0, 0.5, m)
        d = rng.uniform(0.0, 1.0, m) * (0.5 - p)
        diffs = directional_entropy_differences(p, d)
        lo = float(diffs.min())
        worst = min(worst, lo)
        if lo < -slack:
            violations.append(MonotoneViolation(p.tolist(), d.tolist(), lo))
    return MonotoneCheck(trials, violations, worst)


def dump_json(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
