"""Numerical toolkit for entropy and information inequalities of integer-valued laws.

Mass functions, thinning, discrete Fisher informations, Poincare and
log-Sobolev constants, monotonicity of entropy under thinning, and entropy
of Bernoulli sums along affine paths.
"""

from .errors import ThinentError
from .pmf import (
    Family,
    Kind,
    OrderKind,
    Pmf,
    bernoulli,
    binomial,
    c_log_concavity,
    convolve,
    entropy,
    family_pmf,
    make_pmf,
    poisson,
    relative_entropy,
    size_bias,
    stochastic_order,
    tv_distance,
    ulc_check,
)
from .thinning import interpolate, thin

__all__ = [
    "Family",
    "Kind",
    "OrderKind",
    "Pmf",
    "ThinentError",
    "bernoulli",
    "binomial",
    "c_log_concavity",
    "convolve",
    "entropy",
    "family_pmf",
    "interpolate",
    "make_pmf",
    "poisson",
    "relative_entropy",
    "size_bias",
    "stochastic_order",
    "thin",
    "tv_distance",
    "ulc_check",
]
