"""Probability mass functions on the nonnegative integers.

A :class:`Pmf` stores ``P(0), ..., P(N)`` together with a certified bound on
the mass that lies beyond ``N``.  Finite families are stored exactly; the
infinite-support families (Poisson, geometric, negative binomial, tilted
Poisson) are truncated at the smallest ``N`` whose tail mass is below a
requested tolerance, and remember their analytic family so that masses past
the stored support can be recovered when a functional needs them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy import special, stats

from .errors import (
    BadParameter,
    EmptySupport,
    IncomparableSupports,
    InteriorZero,
    NegativeMass,
    NonPositiveF,
    NotNormalized,
    TruncationOverflow,
    ZeroMean,
)

NORM_TOL = 1e-12
DEFAULT_TRUNC_TOL = 1e-12
TRUNCATION_CAP = 10_000
ULC_SLACK = 1e-14


class Kind(str, enum.Enum):
    EXACT = "exact-finite"
    TRUNCATED = "truncated-analytic"


class OrderKind(str, enum.Enum):
    STOCHASTIC = "stochastic"
    LIKELIHOOD_RATIO = "likelihood-ratio"


@dataclass(frozen=True)
class Family:
    """Analytic provenance of a Pmf: family name and parameters."""

    name: str
    params: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "params": [float(v) for v in self.params]}


@dataclass(frozen=True, eq=False)
class Pmf:
    """Finite-support mass function with a tail certificate.

    Use :func:`make_pmf` or :func:`family_pmf` rather than the constructor;
    they validate and trim.
    """

    probs: np.ndarray
    tail_bound: float = 0.0
    kind: Kind = Kind.EXACT
    family: Family | None = None
    _mean: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        x = np.arange(probs.size)
        object.__setattr__(self, "_mean", float(x @ probs))

    def __len__(self) -> int:
        return self.probs.size

    @property
    def support_end(self) -> int:
        return self.probs.size - 1

    @property
    def mean(self) -> float:
        return self._mean

    @property
    def variance(self) -> float:
        x = np.arange(self.probs.size)
        return float(((x - self._mean) ** 2) @ self.probs)

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    @property
    def full_support_family(self) -> bool:
        """True when the analytic family charges every nonnegative integer."""
        return (
            self.kind is Kind.TRUNCATED
            and self.family is not None
            and _FAMILIES[self.family.name].infinite
        )

    def next_mass(self) -> float:
        """Mass at ``N + 1``: zero for exact inputs, analytic when known."""
        if self.kind is Kind.EXACT or self.family is None:
            return 0.0
        return float(self.probs[-1] * _ratio(self.family, self.support_end))

    def values(self, n: int) -> np.ndarray:
        """Masses at ``0..n-1``, extended analytically past the stored support."""
        out = np.zeros(n)
        m = min(n, self.probs.size)
        out[:m] = self.probs[:m]
        if n > self.probs.size and self.kind is Kind.TRUNCATED and self.family is not None:
            p = self.probs[-1]
            for x in range(self.probs.size, n):
                p = p * _ratio(self.family, x - 1)
                out[x] = p
        return out

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "probs": [float(v) for v in self.probs],
            "tail_bound": float(self.tail_bound),
            "kind": self.kind.value,
        }
        if self.family is not None:
            d["family"] = self.family.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: Any) -> "Pmf":
        """Parse the interchange schema; errors name the offending field."""
        if not isinstance(d, dict):
            raise BadParameter("Pmf JSON must be an object")
        if "probs" not in d:
            raise BadParameter("field 'probs' is missing")
        probs = d["probs"]
        if not isinstance(probs, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in probs
        ):
            raise BadParameter("field 'probs' must be a list of numbers")
        tail = d.get("tail_bound", 0.0)
        if not isinstance(tail, (int, float)) or isinstance(tail, bool) or tail < 0:
            raise BadParameter("field 'tail_bound' must be a nonnegative number")
        family = None
        if d.get("family") is not None:
            fam = d["family"]
            if not isinstance(fam, dict) or fam.get("name") not in _FAMILIES:
                raise BadParameter(f"field 'family.name' must be one of {sorted(_FAMILIES)}")
            params = fam.get("params", [])
            if not isinstance(params, list):
                raise BadParameter("field 'family.params' must be a list of numbers")
            family = Family(fam["name"], tuple(float(v) for v in params))
            _FAMILIES[family.name].check(family.params)
        kind = d.get("kind")
        if kind is not None and kind not in (k.value for k in Kind):
            raise BadParameter(f"field 'kind' must be one of {[k.value for k in Kind]}")
        expected = Kind.EXACT if tail == 0 else Kind.TRUNCATED
        if kind is not None and Kind(kind) is not expected:
            raise BadParameter(f"field 'kind' is {kind!r} but tail_bound={tail} implies {expected.value!r}")
        try:
            return make_pmf(probs, tail, family=family)
        except (NotNormalized, NegativeMass, EmptySupport) as exc:
            raise type(exc)(f"field 'probs': {exc}") from exc


def make_pmf(
    weights: Sequence[float] | np.ndarray,
    tail_bound: float = 0.0,
    family: Family | None = None,
) -> Pmf:
    """Validate and trim a weight vector into a :class:`Pmf`."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise EmptySupport("weights must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(w)):
        raise BadParameter("weights must be finite")
    if np.any(w < 0):
        raise NegativeMass(f"negative weight at index {int(np.argmax(w < 0))}")
    if tail_bound < 0 or not math.isfinite(tail_bound):
        raise BadParameter("tail_bound must be a finite nonnegative number")
    s = float(w.sum())
    if not (1.0 - tail_bound - NORM_TOL <= s <= 1.0 + NORM_TOL):
        raise NotNormalized(f"weights sum to {s!r}, outside [1 - {tail_bound}, 1]")
    nz = np.flatnonzero(w)
    w = w[: nz[-1] + 1] if nz.size else w[:1]
    kind = Kind.EXACT if tail_bound == 0 else Kind.TRUNCATED
    return Pmf(w, float(tail_bound), kind, family)


def delta(k: int = 0) -> Pmf:
    w = np.zeros(k + 1)
    w[k] = 1.0
    return make_pmf(w)


# ---------------------------------------------------------------------------
# analytic families


@dataclass(frozen=True)
class _Spec:
    nparams: int
    infinite: bool

    def check(self, params: tuple[float, ...]) -> None:
        if self.nparams < 0:
            if not params:
                raise BadParameter("expected at least one parameter")
        elif len(params) != self.nparams:
            raise BadParameter(f"expected {self.nparams} parameters, got {len(params)}")


_FAMILIES: dict[str, _Spec] = {
    "poisson": _Spec(1, True),
    "bernoulli": _Spec(1, False),
    "binomial": _Spec(2, False),
    "geometric": _Spec(1, True),
    "negative-binomial": _Spec(2, True),
    "bernoulli-sum": _Spec(-1, False),
    "tilted-poisson": _Spec(2, True),
}


FAMILY_NAMES = tuple(sorted(_FAMILIES))


def _ratio(fam: Family, x: int) -> float:
    """P(x+1)/P(x) for an infinite-support family."""
    name, p = fam.name, fam.params
    if name == "poisson":
        return p[0] / (x + 1)
    if name == "geometric":
        return 1.0 - p[0]
    if name == "negative-binomial":
        r, q = p
        return (1.0 - q) * (x + r) / (x + 1)
    if name == "tilted-poisson":
        lam, beta = p
        return lam * math.exp(-beta * (2 * x + 1)) / (x + 1)
    raise BadParameter(f"family {name!r} has no analytic ratio")


def _ratio_sup(fam: Family, x0: int) -> float:
    """Upper bound on P(x+1)/P(x) over all x >= x0 (ratios are monotone)."""
    limit = 1.0 - fam.params[-1] if fam.name in ("geometric", "negative-binomial") else 0.0
    return max(_ratio(fam, x0), limit)


def _log_mass(fam: Family, x: int) -> float:
    """Normalised log P(x); None-like NaN for the unnormalised tilted family."""
    name, p = fam.name, fam.params
    if name == "poisson":
        return float(stats.poisson.logpmf(x, p[0]))
    if name == "geometric":
        return math.log(p[0]) + x * math.log1p(-p[0])
    if name == "negative-binomial":
        return float(stats.nbinom.logpmf(x, p[0], p[1]))
    return math.nan


def _weights(fam: Family, length: int) -> tuple[np.ndarray, int]:
    """Masses on 0..length-1 relative to the mode, built by ratio recursion.

    Recursion keeps each neighbouring ratio within a few ulps of the analytic
    one, which the ULC test needs (Poisson is an equality case).
    """
    mode = 0
    while mode < length - 1 and _ratio(fam, mode) > 1.0:
        mode += 1
    w = np.empty(length)
    w[mode] = 1.0
    for x in range(mode, length - 1):
        w[x + 1] = w[x] * _ratio(fam, x)
    for x in range(mode, 0, -1):
        w[x - 1] = w[x] / _ratio(fam, x - 1)
    return w, mode


def _truncated(fam: Family, trunc_tol: float, cap: int) -> Pmf:
    target = min(trunc_tol * 1e-6, 1e-20)
    length = 64
    while True:
        w, mode = _weights(fam, length)
        sup = _ratio_sup(fam, length)
        # certified remainder beyond the window, relative to the window's sum
        nxt = w[-1] * _ratio(fam, length - 1)
        rem = nxt / (1.0 - sup) if sup < 1.0 else math.inf
        if (rem / w.sum() <= target and mode < length - 1) or length >= 4 * cap:
            break
        length *= 2
    if fam.name == "tilted-poisson":
        scale = 1.0 / (w.sum() + (rem if math.isfinite(rem) else 0.0))
    else:
        scale = math.exp(_log_mass(fam, mode))
    probs = w * scale
    rem *= scale
    tails = np.cumsum(probs[::-1])[::-1]
    tails = np.append(tails[1:], 0.0) + rem
    ok = np.flatnonzero(tails <= trunc_tol)
    if ok.size == 0 or ok[0] > cap:
        raise TruncationOverflow(
            f"{fam.name}{fam.params}: tail above {trunc_tol} past N={cap}"
        )
    n = int(ok[0])
    tail = float(tails[n]) * (1 + 1e-9)
    if tail == 0.0:
        return make_pmf(probs[: n + 1] / probs[: n + 1].sum())
    return make_pmf(probs[: n + 1], tail, family=fam)


def bernoulli_sum_probs(ps: Sequence[float] | np.ndarray) -> np.ndarray:
    """Poisson-binomial masses by sequential convolution with ``(1-p, p)``."""
    out = np.ones(1)
    for p in np.asarray(ps, dtype=float):
        nxt = np.empty(out.size + 1)
        nxt[:-1] = out * (1.0 - p)
        nxt[-1] = 0.0
        nxt[1:] += out * p
        out = nxt
    return out


def family_pmf(
    family: str,
    params: Sequence[float],
    trunc_tol: float = DEFAULT_TRUNC_TOL,
    cap: int = TRUNCATION_CAP,
) -> Pmf:
    """Mass function of a named family.

    Parameter conventions: ``poisson (lam)``, ``bernoulli (p)``,
    ``binomial (n, p)``, ``geometric (p)`` with ``P(x) = p (1-p)^x``,
    ``negative-binomial (r, p)`` with success probability ``p`` (scipy's
    ``nbinom``), ``bernoulli-sum (p_1, ..., p_m)`` and ``tilted-poisson
    (lam, beta)`` with ``P(x)`` proportional to ``lam^x exp(-beta x^2) / x!``.
    """
    if family not in _FAMILIES:
        raise BadParameter(f"unknown family {family!r}")
    params = tuple(float(v) for v in params)
    if not all(math.isfinite(v) for v in params):
        raise BadParameter("parameters must be finite")
    if family != "bernoulli-sum":
        _FAMILIES[family].check(params)
    if not (0 < trunc_tol <= 1e-3):
        raise BadParameter("trunc_tol must lie in (0, 1e-3]")

    def unit(p: float) -> None:
        if not 0.0 <= p <= 1.0:
            raise BadParameter(f"probability {p} outside [0, 1]")

    fam = Family(family, params)
    if family == "bernoulli":
        unit(params[0])
        return make_pmf([1.0 - params[0], params[0]], family=fam)
    if family == "binomial":
        n, p = params
        if n < 1 or n != int(n):
            raise BadParameter("binomial n must be a positive integer")
        unit(p)
        return make_pmf(stats.binom.pmf(np.arange(int(n) + 1), int(n), p), family=fam)
    if family == "bernoulli-sum":
        if not params:
            raise BadParameter("bernoulli-sum needs at least one p")
        for p in params:
            unit(p)
        return make_pmf(bernoulli_sum_probs(params), family=fam)
    if family == "poisson":
        if params[0] <= 0:
            raise BadParameter("poisson needs lam > 0")
    elif family in ("geometric", "negative-binomial"):
        if not 0 < params[-1] < 1:
            raise BadParameter(f"{family} needs 0 < p < 1")
        if family == "negative-binomial" and params[0] <= 0:
            raise BadParameter("negative-binomial needs r > 0")
    elif family == "tilted-poisson":
        if params[0] <= 0 or params[1] < 0:
            raise BadParameter("tilted-poisson needs lam > 0 and beta >= 0")
    return _truncated(fam, trunc_tol, cap)


def poisson(lam: float, trunc_tol: float = DEFAULT_TRUNC_TOL) -> Pmf:
    """Truncated Poisson; ``lam == 0`` gives the point mass at zero."""
    if lam == 0:
        return delta(0)
    return family_pmf("poisson", [lam], trunc_tol)


def bernoulli(p: float) -> Pmf:
    return family_pmf("bernoulli", [p])


def binomial(n: int, p: float) -> Pmf:
    return family_pmf("binomial", [n, p])


# ---------------------------------------------------------------------------
# operations


def convolve(P: Pmf, Q: Pmf) -> Pmf:
    probs = np.convolve(P.probs, Q.probs)
    tail = P.tail_bound + Q.tail_bound
    fam = None
    if P.family and Q.family and P.family.name == Q.family.name == "poisson":
        fam = Family("poisson", (P.family.params[0] + Q.family.params[0],))
    # products of sub-normalised parts lose a little more than the tails' sum
    return make_pmf(np.clip(probs, 0.0, None), tail, family=fam if tail > 0 else None)


def moments(P: Pmf) -> tuple[float, float]:
    return P.mean, P.variance


def entropy(P: Pmf) -> float:
    """Shannon entropy in nats."""
    return float(special.entr(P.probs).sum())


def entropy_budget(P: Pmf) -> float:
    """Error allowance for entropy-type functionals of a truncated Pmf.

    Covers the omitted terms -P log P (at most t log(1/t) plus lower order)
    and the shift of the stored mean by the tail's first moment.
    """
    t = P.tail_bound
    if t == 0:
        return 0.0
    return t * (abs(math.log(t)) + P.support_end + 2.0)


def relative_entropy(Q: Pmf, P: Pmf) -> float:
    """D(Q || P) in nats; ``inf`` when Q charges a point P cannot."""
    p = P.values(len(Q))
    return float(special.rel_entr(Q.probs, p).sum())


def ent_functional(P: Pmf, f: Sequence[float] | np.ndarray) -> float:
    """Ent_P(f) = sum P f log f - (sum P f) log(sum P f).

    A truncated P is renormalised over its stored support first, so
    constants have zero entropy exactly.
    """
    f = np.asarray(f, dtype=float)[: len(P)]
    if f.size < len(P):
        raise BadParameter(f"f has {f.size} values, support needs {len(P)}")
    mask = P.probs > 0
    if np.any(f[mask] <= 0) or not np.all(np.isfinite(f[mask])):
        raise NonPositiveF("f must be finite and strictly positive on the support")
    pf = P.probs[mask] / P.total * f[mask]
    m = float(pf.sum())
    return float(pf @ np.log(f[mask]) - m * math.log(m))


_SIZE_BIAS_FAMILY = {
    "poisson": lambda p: ("poisson", p),
    "negative-binomial": lambda p: ("negative-binomial", (p[0] + 1, p[1])),
    "geometric": lambda p: ("negative-binomial", (2.0, p[0])),
}


def size_bias(P: Pmf) -> Pmf:
    """P*(x) = (x+1) P(x+1) / lambda_P."""
    lam = P.mean
    if lam <= 0:
        raise ZeroMean("size-biasing needs a positive mean")
    x = np.arange(1, len(P))
    probs = x * P.probs[1:] / lam
    if P.kind is Kind.EXACT:
        return make_pmf(probs)
    fam = None
    if P.family is not None and P.family.name in _SIZE_BIAS_FAMILY:
        fam = Family(*_SIZE_BIAS_FAMILY[P.family.name](P.family.params))
    tail = tail_moment_bound(P) / lam + P.tail_bound
    return make_pmf(probs, min(tail, 1.0), family=fam)


def tail_moment_bound(P: Pmf) -> float:
    """Bound on sum_{y > N} y P(y), the amount by which the stored mean falls short."""
    n = len(P)
    if P.family is not None:
        ext = P.values(4 * n + 64)[n:]
        y = np.arange(n, n + ext.size)
        return float(y @ ext) * (1 + 1e-6) + P.tail_bound * 1e-6
    # no analytic tail: assume at worst geometric decay at the last stored ratio
    r = P.probs[-1] / P.probs[-2] if n > 1 and P.probs[-2] > 0 else 0.5
    r = min(r, 0.99)
    return P.tail_bound * (n + 1.0 / (1.0 - r))


def ulc_check(P: Pmf, slack: float = ULC_SLACK) -> bool:
    """v P(v)^2 >= (v+1) P(v+1) P(v-1) for every v, up to relative slack."""
    p = P.values(len(P) + 1)
    pm1 = np.concatenate(([0.0], p[:-2]))
    v = np.arange(len(P))
    lhs = v * p[:-1] ** 2
    rhs = (v + 1) * p[1:] * pm1
    return bool(np.all(lhs >= rhs - slack * np.maximum(lhs, rhs)))


def c_log_concavity(P: Pmf) -> float:
    """inf over x of P(x)/P(x+1) - P(x-1)/P(x), on the stored support."""
    if np.any(P.probs <= 0):
        raise InteriorZero("c-log-concavity needs positive mass on 0..N")
    if len(P) < 2:
        return math.inf
    p = P.probs
    prev = np.concatenate(([0.0], p[:-2]))
    e = p[:-1] / p[1:] - prev / p[:-1]
    return float(e.min())


def _interval_support(p: np.ndarray) -> bool:
    nz = np.flatnonzero(p)
    return nz.size > 0 and nz[-1] - nz[0] + 1 == nz.size


def stochastic_order(P: Pmf, Q: Pmf, kind: OrderKind | str, tol: float = 1e-12) -> bool:
    """True when Q is dominated by P in the given order (Q <= P)."""
    kind = OrderKind(kind)
    n = max(len(P), len(Q))
    p, q = _pad(P.probs, n), _pad(Q.probs, n)
    if kind is OrderKind.STOCHASTIC:
        return bool(np.all(np.cumsum(p) <= np.cumsum(q) + tol))
    if not (_interval_support(p) and _interval_support(q)):
        raise IncomparableSupports("likelihood-ratio order needs interval supports")
    a = np.outer(q, p)  # a[x, y] = Q(x) P(y)
    b = a.T  # b[x, y] = P(x) Q(y)
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    ok = a >= b - tol * np.maximum(a, b)
    return bool(np.all(ok[upper]))


def _pad(p: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n)
    out[: p.size] = p
    return out


def tv_distance(P: Pmf, Q: Pmf) -> float:
    """Half-l1 distance on the stored supports plus both tail budgets."""
    n = max(len(P), len(Q))
    d = 0.5 * np.abs(_pad(P.probs, n) - _pad(Q.probs, n)).sum()
    return float(min(1.0, d + 0.5 * (P.tail_bound + Q.tail_bound)))
