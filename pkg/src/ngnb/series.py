"""Term sequence, truncation and normalizing constant of the NGNB series.

The unnormalized term is ``C(y+k-1, y)**gamma * q**y`` with the binomial read
as ``Gamma(y+k) / (Gamma(y+1) Gamma(k))`` so that ``k`` may be any positive
real.  Every quantity is kept in log space; tables are generated from the
successive-term ratio ``((y+k)/(y+1))**gamma * q`` accumulated left to right,
which keeps consecutive ratios accurate to a few ulps of the running log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvalidParams, IterationLimitExceeded, NumericalOverflow

__all__ = [
    "DEFAULT_EPSILON",
    "MAX_TERMS",
    "NgnbParams",
    "SeriesTruncation",
    "log_binomial",
    "log_term",
    "log_term_ratio",
    "term_ratio",
    "ratio_bound",
    "crossing_index",
    "truncation_point",
    "series_log_terms",
    "log_normalizing_constant",
    "normalizing_constant",
    "scan_series",
]

DEFAULT_EPSILON = 1e-12
MAX_TERMS = 10**7

_LOG_DBL_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class NgnbParams:
    """Parameter triple ``(gamma, k, q)``; ``p = 1 - q`` is derived."""

    gamma: float
    k: float
    q: float

    def __post_init__(self) -> None:
        for name in ("gamma", "k", "q"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
                raise InvalidParams(f"{name} must be a real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not math.isfinite(self.gamma):
            raise InvalidParams(f"gamma must be finite, got {self.gamma}")
        if not (math.isfinite(self.k) and self.k > 0):
            raise InvalidParams(f"k must be positive, got {self.k}")
        if not (0.0 < self.q < 1.0):
            raise InvalidParams(f"q must lie in (0, 1), got {self.q}")

    @property
    def p(self) -> float:
        return 1.0 - self.q


@dataclass(frozen=True)
class SeriesTruncation:
    """Where the series is cut and how much it can have lost.

    ``tail_bound`` and ``partial_sum`` are unnormalized but both scaled by
    ``exp(-log_anchor)`` (the largest retained term) so they stay finite.
    The normalizing constant is taken as ``partial_sum + tail_bound``.
    """

    y_max: int
    tail_bound: float
    epsilon: float
    partial_sum: float = 1.0
    log_anchor: float = 0.0


_STIRLING_MIN = 32.0


def _stirling_correction(x: np.ndarray) -> np.ndarray:
    """``lgamma(x) - ((x - 1/2) log x - x + log(2 pi)/2)`` for ``x >= 32``."""
    r = 1.0 / (x * x)
    return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r / 1680.0))) / x


def log_binomial(y, k: float):
    """``log C(y+k-1, y) = log Gamma(y+k) - log Gamma(y+1) - log Gamma(k)``.

    For large ``y`` the two big log-gammas are differenced analytically
    through Stirling's series, so the result keeps full relative accuracy
    instead of inheriting the absolute error of ``gammaln(y + k)``.
    """
    y = np.asarray(y, dtype=float)
    a, b = y + 1.0, y + k
    big = np.minimum(a, b) >= _STIRLING_MIN
    out = np.empty_like(y)
    ys, bs = y[big], b[big]
    out[big] = (
        (ys + 0.5) * np.log1p((k - 1.0) / (ys + 1.0))
        + (k - 1.0) * (np.log(bs) - 1.0)
        + (_stirling_correction(bs) - _stirling_correction(ys + 1.0))
    )
    small = ~big
    out[small] = gammaln(b[small]) - gammaln(a[small])
    out -= gammaln(k)
    out[y == 0] = 0.0
    return out if out.ndim else float(out)


def log_term(y: int, params: NgnbParams) -> float:
    if y < 0:
        raise DomainError(f"y must be nonnegative, got {y}")
    if y == 0:
        return 0.0
    return float(params.gamma * log_binomial(y, params.k) + y * math.log(params.q))


def log_term_ratio(y, params: NgnbParams):
    """Log of ``term(y+1) / term(y)``; vectorizes over ``y``."""
    y = np.asarray(y, dtype=float)
    out = params.gamma * np.log1p((params.k - 1.0) / (y + 1.0)) + math.log(params.q)
    return out if out.ndim else float(out)


def term_ratio(y: int, params: NgnbParams) -> float:
    if y < 0:
        raise DomainError(f"y must be nonnegative, got {y}")
    return ((y + params.k) / (y + 1.0)) ** params.gamma * params.q


def ratio_bound(q: float) -> float:
    """Geometric rate used to bound the tail once the term ratio drops below it."""
    return 0.5 * (1.0 + q)


def crossing_index(params: NgnbParams, max_terms: int = MAX_TERMS) -> int:
    """First ``y`` from which the term ratio stays at or below ``ratio_bound(q)``.

    The ratio is monotone in ``y`` with limit ``q``, so once below the bound
    it stays there.
    """
    g, k = params.gamma, params.k
    log_rho = math.log(ratio_bound(params.q))
    if g * (k - 1.0) <= 0.0:
        return 0
    # ((y+k)/(y+1))**g <= rho/q  <=>  y + 1 >= (k-1) / expm1(log(rho/q)/g)
    exponent = (log_rho - math.log(params.q)) / g
    if exponent > 700.0:
        return 0
    guess = (k - 1.0) / math.expm1(exponent) - 1.0
    if guess > max_terms:
        raise IterationLimitExceeded(
            f"term ratio stays above {ratio_bound(params.q):.6g} beyond {max_terms} terms"
        )
    y0 = max(0, math.ceil(guess))
    while log_term_ratio(y0, params) > log_rho:
        y0 += 1
    while y0 > 0 and log_term_ratio(y0 - 1, params) <= log_rho:
        y0 -= 1
    return y0


def _envelope(rho: float, m: np.ndarray, order: int) -> np.ndarray:
    """``sum_{j>=1} (m + j)**order * rho**j`` for ``order`` in 0..2."""
    s0 = rho / (1.0 - rho)
    if order == 0:
        return np.full_like(m, s0)
    s1 = rho / (1.0 - rho) ** 2
    if order == 1:
        return m * s0 + s1
    if order == 2:
        s2 = rho * (1.0 + rho) / (1.0 - rho) ** 3
        return m * m * s0 + 2.0 * m * s1 + s2
    raise ValueError("order must be 0, 1 or 2")


def scan_series(
    log_ratio: Callable[[np.ndarray], np.ndarray],
    y0: int,
    rho: float,
    epsilon: float,
    *,
    ratio_limit: float = 0.0,
    start: int = 0,
    order: int = 0,
    max_terms: int = MAX_TERMS,
) -> tuple[np.ndarray, SeriesTruncation]:
    """Generate log terms ``L[0..y_max]`` (``L[0] = 0``) of a ratio-defined series.

    ``log_ratio(y)`` must give ``log(term(y+1)/term(y))``, be ``<= log(rho)``
    for every ``y >= y0`` and move monotonically toward ``ratio_limit``.
    ``y_max`` is the first index at or beyond ``max(y0, start)`` where both
    the mass tail and the ``(1+y)**order``
    weighted tail, bounded geometrically with rate ``rho``, fall below
    ``epsilon`` times the corresponding partial sums (the weighted one taken
    from ``start``).
    """
    if not (0.0 < epsilon < 1.0):
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not (0.0 < rho < 1.0):
        raise DomainError(f"tail rate must lie in (0, 1), got {rho}")
    lo = max(y0, start)
    if lo > max_terms:
        raise IterationLimitExceeded(f"series needs more than {max_terms} terms")
    n = max(64, 2 * lo + 64)
    while True:
        n = min(n, max_terms + 1)
        logs = np.empty(n)
        logs[0] = 0.0
        np.cumsum(log_ratio(np.arange(n - 1, dtype=float)), out=logs[1:])
        anchor = float(logs.max())
        terms = np.exp(logs - anchor)
        ys = np.arange(n, dtype=float)
        mass = np.cumsum(terms)
        mass_tail = terms * _envelope(rho, ys + 1.0, 0)
        ok = mass_tail <= epsilon * mass
        if order:
            weighted = (1.0 + ys) ** order * terms
            weighted[:start] = 0.0
            ok &= terms * _envelope(rho, ys + 1.0, order) <= epsilon * np.cumsum(weighted)
        ok[:lo] = False
        hits = np.flatnonzero(ok)
        if hits.size:
            y_max = int(hits[0])
            logs = logs[: y_max + 1]
            # the anchor only moves if the max lies beyond y_max, which the
            # monotone tail rules out; recompute anyway for exactness
            anchor = float(logs.max())
            terms = np.exp(logs - anchor)
            partial = math.fsum(terms)
            # sharpest geometric rate valid past y_max: the ratio either
            # decreases toward its limit or increases up to it
            rate = max(math.exp(float(log_ratio(np.array([float(y_max)]))[0])), ratio_limit)
            tail = float(terms[-1] * rate / (1.0 - rate))
            return logs, SeriesTruncation(y_max, tail, epsilon, partial, anchor)
        if n > max_terms:
            raise IterationLimitExceeded(f"series needs more than {max_terms} terms")
        n *= 2


def series_log_terms(
    params: NgnbParams,
    epsilon: float = DEFAULT_EPSILON,
    *,
    start: int = 0,
    order: int = 0,
    max_terms: int = MAX_TERMS,
) -> tuple[np.ndarray, SeriesTruncation]:
    """Log terms of the NGNB series up to its truncation point."""
    y0 = crossing_index(params, max_terms)
    return scan_series(
        lambda y: log_term_ratio(y, params),
        y0,
        ratio_bound(params.q),
        epsilon,
        ratio_limit=params.q,
        start=start,
        order=order,
        max_terms=max_terms,
    )


def truncation_point(
    params: NgnbParams,
    epsilon: float = DEFAULT_EPSILON,
    *,
    max_terms: int = MAX_TERMS,
) -> SeriesTruncation:
    return series_log_terms(params, epsilon, max_terms=max_terms)[1]


def log_normalizing_constant(
    params: NgnbParams,
    epsilon: float = DEFAULT_EPSILON,
    *,
    max_terms: int = MAX_TERMS,
) -> float:
    trunc = truncation_point(params, epsilon, max_terms=max_terms)
    return trunc.log_anchor + math.log(trunc.partial_sum + trunc.tail_bound)


def normalizing_constant(
    params: NgnbParams,
    epsilon: float = DEFAULT_EPSILON,
    *,
    max_terms: int = MAX_TERMS,
) -> float:
    """``Z(gamma, k, q)``; use :func:`log_normalizing_constant` when it overflows."""
    log_z = log_normalizing_constant(params, epsilon, max_terms=max_terms)
    if log_z > _LOG_DBL_MAX:
        raise NumericalOverflow(f"Z overflows double precision (log Z = {log_z:.6g})")
    return math.exp(log_z)
