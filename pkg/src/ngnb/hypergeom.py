"""Pochhammer symbols and repeated-parameter hypergeometric series.

For a positive integer ``gamma`` the NGNB series is
``gammaF(gamma-1)(k, ..., k; 1, ..., 1; q)``, which gives the pgf as a ratio of
two such series and the mean through the shifted series with parameters
``k + 1`` and ``2``.  Only integer ``gamma`` is handled here; general ``gamma``
lives in :mod:`ngnb.series`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn

from .errors import DomainError, IterationLimitExceeded, NumericalOverflow
from .series import DEFAULT_EPSILON, MAX_TERMS, NgnbParams, ratio_bound

__all__ = ["PfqSpec", "pochhammer", "pfq_repeated", "log_pfq_repeated", "pgf", "mean_via_pfq"]

_POCH_DIRECT_MAX = 32


@dataclass(frozen=True)
class PfqSpec:
    """``gamma_int`` numerator parameters equal to ``k``; ``gamma_int - 1``
    denominator parameters equal to 1; argument ``z``."""

    gamma_int: int
    k: float
    z: float

    def __post_init__(self) -> None:
        if isinstance(self.gamma_int, bool) or int(self.gamma_int) != self.gamma_int or self.gamma_int < 1:
            raise DomainError(f"gamma_int must be a positive integer, got {self.gamma_int!r}")
        object.__setattr__(self, "gamma_int", int(self.gamma_int))
        if not (self.k > 0 and math.isfinite(self.k)):
            raise DomainError(f"k must be positive, got {self.k}")
        if not abs(self.z) < 1.0:
            raise DomainError(f"|z| must be below 1, got {self.z}")


def pochhammer(b: float, n: int) -> float:
    """Rising factorial ``(b)_n = b (b+1) ... (b+n-1)``, with ``(b)_0 = 1``."""
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    if n <= _POCH_DIRECT_MAX:
        return math.prod(b + i for i in range(n)) if n else 1.0
    if b <= 0 and b == math.floor(b):
        # a factor hits zero once b + i = 0
        if -b < n:
            return 0.0
        # every factor negative: (b)_n = (-1)**n (-b-n+1)_n
        return (-1.0) ** n * pochhammer(-b - n + 1.0, n)
    log_abs = gammaln(b + n) - gammaln(b)
    sign = gammasgn(b + n) * gammasgn(b)
    if log_abs > math.log(np.finfo(float).max):
        raise NumericalOverflow(f"(b)_n overflows for b={b}, n={n}")
    return float(sign * math.exp(log_abs))


def _log_repeated_series(
    a: float,
    b: float,
    order: int,
    z: float,
    epsilon: float,
    max_terms: int,
) -> float:
    """Log of ``sum_j (a)_j**order / (b)_j**(order-1) * z**j / j!`` for ``0 <= z < 1``.

    Each term is the previous one times ``(a+j)**order / (b+j)**(order-1) *
    z / (1+j)``; sums are renormalized whenever they grow large so arbitrary
    magnitudes stay representable.
    """
    if z == 0.0:
        return 0.0
    rho = ratio_bound(z)
    term = 1.0
    total = 1.0
    comp = 0.0
    log_scale = 0.0
    for j in range(max_terms):
        ratio = (a + j) ** order / (b + j) ** (order - 1) * z / (1.0 + j)
        term *= ratio
        t = total + term
        comp += (total - t) + term if total >= term else (term - t) + total
        total = t
        if total > 1e280:
            log_scale += math.log(total)
            term /= total
            comp /= total
            total = 1.0
        # ratio limit is z; once the next ratio is at most rho the rest is a
        # geometric tail with rate rho
        nxt = (a + j + 1) ** order / (b + j + 1) ** (order - 1) * z / (2.0 + j)
        if nxt <= rho and term * rho / (1.0 - rho) <= epsilon * (total + comp):
            return log_scale + math.log(total + comp)
    raise IterationLimitExceeded(f"hypergeometric series needs more than {max_terms} terms")


def log_pfq_repeated(spec: PfqSpec, epsilon: float = DEFAULT_EPSILON, *, max_terms: int = MAX_TERMS) -> float:
    if spec.z < 0.0:
        raise DomainError("log form needs z >= 0; use pfq_repeated for negative z")
    return _log_repeated_series(spec.k, 1.0, spec.gamma_int, spec.z, epsilon, max_terms)


def pfq_repeated(spec: PfqSpec, epsilon: float = DEFAULT_EPSILON, *, max_terms: int = MAX_TERMS) -> float:
    if spec.z < 0.0:
        return _alternating_series(spec, epsilon, max_terms)
    value = log_pfq_repeated(spec, epsilon, max_terms=max_terms)
    if value > math.log(np.finfo(float).max):
        raise NumericalOverflow("hypergeometric series overflows double precision")
    return math.exp(value)


def _alternating_series(spec: PfqSpec, epsilon: float, max_terms: int) -> float:
    g, k, z = spec.gamma_int, spec.k, spec.z
    rho = ratio_bound(abs(z))
    terms = [1.0]
    term = 1.0
    for j in range(max_terms):
        term *= ((k + j) / (1.0 + j)) ** g * z
        terms.append(term)
        nxt = ((k + j + 1) / (2.0 + j)) ** g * abs(z)
        if nxt <= rho and abs(term) * rho / (1.0 - rho) <= epsilon * abs(math.fsum(terms)):
            return math.fsum(terms)
    raise IterationLimitExceeded(f"hypergeometric series needs more than {max_terms} terms")


def _integer_gamma(params: NgnbParams) -> int:
    g = params.gamma
    if g != math.floor(g) or g < 1:
        raise DomainError(f"hypergeometric form needs a positive integer gamma, got {g}")
    return int(g)


def pgf(params: NgnbParams, s: float, epsilon: float = DEFAULT_EPSILON) -> float:
    """``E[s**Y]`` as a ratio of repeated-parameter hypergeometric series."""
    g = _integer_gamma(params)
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"s must lie in [0, 1], got {s}")
    num = log_pfq_repeated(PfqSpec(g, params.k, params.q * s), epsilon)
    den = log_pfq_repeated(PfqSpec(g, params.k, params.q), epsilon)
    return math.exp(num - den)


def mean_via_pfq(params: NgnbParams, epsilon: float = DEFAULT_EPSILON, *, max_terms: int = MAX_TERMS) -> float:
    """``q k**gamma F(k+1, ...; 2, ...; q) / F(k, ...; 1, ...; q)``."""
    g = _integer_gamma(params)
    k, q = params.k, params.q
    num = _log_repeated_series(k + 1.0, 2.0, g, q, epsilon, max_terms)
    den = _log_repeated_series(k, 1.0, g, q, epsilon, max_terms)
    return q * k**g * math.exp(num - den)
