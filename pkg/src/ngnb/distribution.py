"""The NGNB distribution on top of the series engine.

A :class:`DistributionTable` caches normalized probabilities from 0 to
``y_max``; anything past ``y_max`` is reached through the successive-term
ratio, never by assuming zero mass.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.special import expit, logit

from .errors import (
    DegenerateDistribution,
    DomainError,
    FitFailed,
    InvalidParams,
    IterationLimitExceeded,
    NumericalOverflow,
    NumericalUnderflow,
)
from .series import (
    DEFAULT_EPSILON,
    MAX_TERMS,
    NgnbParams,
    SeriesTruncation,
    log_binomial,
    log_normalizing_constant,
    log_term_ratio,
    series_log_terms,
)

__all__ = [
    "PmfTable",
    "DistributionTable",
    "ShapeClass",
    "HazardCurve",
    "build",
    "table_from_log_terms",
    "pmf",
    "cdf",
    "survival",
    "quantile",
    "mean_exact",
    "variance_exact",
    "factorial_moment",
    "dispersion_index",
    "hazard",
    "hazard_curve",
    "log_concavity_ratio",
    "classify_shape",
    "sample",
    "log_likelihood",
    "fit_mle",
]

# below this, 1 - cdf(y-1) loses too many digits and the direct tail sum is used
_SURVIVAL_SWITCH = 1e-8
_TINY = 1e-300


def _compensated_cumsum(values: np.ndarray) -> np.ndarray:
    """Running sums with Neumaier compensation."""
    out = np.empty(len(values))
    s = 0.0
    c = 0.0
    for i, v in enumerate(values.tolist()):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PmfTable:
    """Normalized, truncated probabilities of a ratio-defined count law.

    ``upper[y]`` is ``P(Y >= y)`` summed directly from the tail, so it stays
    accurate where ``1 - cumulative[y-1]`` would cancel.
    """

    probs: np.ndarray
    cumulative: np.ndarray
    upper: np.ndarray
    tail_mass: float
    log_z: float
    epsilon: float
    log_ratio: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    @property
    def y_max(self) -> int:
        return len(self.probs) - 1


@dataclass(frozen=True, eq=False)
class DistributionTable(PmfTable):
    params: NgnbParams = field(default=None)  # type: ignore[assignment]


class ShapeClass(enum.Enum):
    LOG_CONCAVE_IFR = "LogConcaveIFR"
    LOG_CONVEX_DFR = "LogConvexDFR"
    CONSTANT_HAZARD = "ConstantHazard"
    INDETERMINATE = "Indeterminate"

    @property
    def tag(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class HazardCurve:
    params: NgnbParams
    ys: np.ndarray
    rates: np.ndarray

    @property
    def points(self) -> list[tuple[int, float]]:
        return [(int(y), float(r)) for y, r in zip(self.ys, self.rates)]


def table_from_log_terms(
    logs: np.ndarray,
    trunc: SeriesTruncation,
    log_ratio: Callable[[np.ndarray], np.ndarray],
    cls: type = PmfTable,
    **extra,
):
    """Normalize log terms from :func:`ngnb.series.scan_series` into a table."""
    z_scaled = trunc.partial_sum + trunc.tail_bound
    log_z = trunc.log_anchor + math.log(z_scaled)
    probs = np.exp(logs - log_z)
    tail_mass = trunc.tail_bound / z_scaled
    cumulative = _compensated_cumsum(probs)
    upper = _compensated_cumsum(probs[::-1])[::-1] + tail_mass
    return cls(
        probs=_frozen(probs),
        cumulative=_frozen(cumulative),
        upper=_frozen(upper),
        tail_mass=float(tail_mass),
        log_z=float(log_z),
        epsilon=trunc.epsilon,
        log_ratio=log_ratio,
        **extra,
    )


def build(
    params: NgnbParams,
    epsilon: float = DEFAULT_EPSILON,
    *,
    y_min: int = 0,
    max_terms: int = MAX_TERMS,
) -> DistributionTable:
    """Tabulate the pmf until the tail is negligible.

    The cut is placed so the omitted mass and the omitted contributions to the
    first two raw moments are each below ``epsilon`` relative.  ``y_min``
    forces the table to reach at least that index with the tail negligible
    relative to ``P(Y >= y_min)``, which keeps hazards accurate there.
    """
    if not isinstance(params, NgnbParams):
        raise InvalidParams(f"expected NgnbParams, got {type(params).__name__}")
    logs, trunc = series_log_terms(params, epsilon, start=y_min, order=2, max_terms=max_terms)
    return table_from_log_terms(
        logs,
        trunc,
        lambda y: log_term_ratio(y, params),
        DistributionTable,
        params=params,
    )


def _check_y(y) -> int:
    if isinstance(y, bool) or int(y) != y:
        raise DomainError(f"y must be an integer, got {y!r}")
    return int(y)


def _extended_log_probs(table: PmfTable, y_from: int, y_to: int) -> np.ndarray:
    """Log probabilities for ``y_from..y_to`` (both past ``y_max``) via the ratio."""
    steps = np.arange(table.y_max, y_to, dtype=float)
    logs = math.log(table.probs[-1]) + np.cumsum(table.log_ratio(steps))
    return logs[y_from - table.y_max - 1 :]


def pmf(table: PmfTable, y: int) -> float:
    y = _check_y(y)
    if y < 0:
        return 0.0
    if y <= table.y_max:
        return float(table.probs[y])
    return float(np.exp(_extended_log_probs(table, y, y)[0]))


def _tail_sum_beyond(table: PmfTable, y: int) -> float:
    """``P(Y >= y)`` for ``y > y_max`` by summing the extended terms."""
    total = 0.0
    chunk = 256
    lo = y
    while True:
        logs = _extended_log_probs(table, lo, lo + chunk - 1)
        vals = np.exp(logs)
        total += math.fsum(vals)
        last_ratio = math.exp(float(table.log_ratio(np.array([float(lo + chunk - 1)]))[0]))
        if vals[-1] == 0.0 or (last_ratio < 1.0 and vals[-1] * last_ratio / (1.0 - last_ratio) <= 1e-17 * total):
            return total
        lo += chunk


def survival(table: PmfTable, y: int) -> float:
    """``P(Y >= y)``."""
    y = _check_y(y)
    if y <= 0:
        return 1.0
    if y > table.y_max:
        return _tail_sum_beyond(table, y)
    s = 1.0 - float(table.cumulative[y - 1])
    if s < _SURVIVAL_SWITCH:
        s = float(table.upper[y])
    return s


def cdf(table: PmfTable, y: int) -> float:
    y = _check_y(y)
    if y < 0:
        return 0.0
    if y <= table.y_max:
        return float(table.cumulative[y])
    return 1.0 - survival(table, y + 1)


def _quantile_beyond(table: PmfTable, u: float) -> int:
    acc = float(table.cumulative[-1])
    y = table.y_max
    log_p = math.log(table.probs[-1])
    while acc < u:
        log_p += float(table.log_ratio(np.array([float(y)]))[0])
        y += 1
        if log_p < -745.0:
            # remaining mass is below double resolution
            return y
        acc += math.exp(log_p)
    return y


def quantile(table: PmfTable, u: float) -> int:
    """Smallest ``y`` with ``cdf(y) >= u``."""
    if not (0.0 <= u < 1.0):
        raise DomainError(f"u must lie in [0, 1), got {u}")
    idx = int(np.searchsorted(table.cumulative, u, side="left"))
    if idx <= table.y_max:
        return idx
    return _quantile_beyond(table, u)


def mean_exact(table: PmfTable) -> float:
    ys = np.arange(len(table.probs), dtype=float)
    return math.fsum(ys * table.probs)


def variance_exact(table: PmfTable) -> float:
    ys = np.arange(len(table.probs), dtype=float)
    m = mean_exact(table)
    return math.fsum((ys - m) ** 2 * table.probs)


def factorial_moment(table: PmfTable, r: int) -> float:
    """``E[Y (Y-1) ... (Y-r+1)]`` by direct summation."""
    if isinstance(r, bool) or int(r) != r or r < 1:
        raise DomainError(f"r must be a positive integer, got {r!r}")
    ys = np.arange(len(table.probs), dtype=float)
    falling = np.ones_like(ys)
    for i in range(int(r)):
        falling *= ys - i
    return math.fsum(falling * table.probs)


def dispersion_index(table: PmfTable) -> float:
    m = mean_exact(table)
    if m < _TINY:
        raise DegenerateDistribution(f"mean {m:.3g} is numerically zero")
    return variance_exact(table) / m


def hazard(table: PmfTable, y: int) -> float:
    """Failure rate ``P(Y = y) / P(Y >= y)``."""
    y = _check_y(y)
    if y < 0:
        raise DomainError(f"y must be nonnegative, got {y}")
    s = survival(table, y)
    if s < _TINY:
        raise NumericalUnderflow(f"P(Y >= {y}) = {s:.3g} is below 1e-300")
    return min(1.0, pmf(table, y) / s)


def hazard_curve(table: DistributionTable, y_limit: int) -> HazardCurve:
    """Failure rates for ``y = 0..y_limit``.

    The table is rebuilt out to ``y_limit`` when it is too short, so every
    rate uses a directly summed survival.
    """
    y_limit = _check_y(y_limit)
    if y_limit < 0:
        raise DomainError(f"y_limit must be nonnegative, got {y_limit}")
    if y_limit > table.y_max:
        table = build(table.params, table.epsilon, y_min=y_limit)
    ys = np.arange(y_limit + 1)
    rates = np.array([hazard(table, int(y)) for y in ys])
    return HazardCurve(table.params, ys, rates)


def log_concavity_ratio(params: NgnbParams, y) -> np.ndarray | float:
    """``p(y) p(y+2) / p(y+1)**2`` in closed form; vectorizes over ``y``."""
    y = np.asarray(y, dtype=float)
    km1 = params.k - 1.0
    out = np.exp(params.gamma * (np.log1p(km1 / (y + 2.0)) - np.log1p(km1 / (y + 1.0))))
    return out if out.ndim else float(out)


def classify_shape(params: NgnbParams) -> ShapeClass:
    """Hazard monotonicity from the sign of ``gamma`` and of ``k - 1``.

    ``gamma = 0`` or ``k = 1`` make the pmf geometric.  With ``k < 1`` the
    characterization does not apply and the class is left indeterminate.
    """
    g, k = params.gamma, params.k
    if g == 0.0 or k == 1.0:
        return ShapeClass.CONSTANT_HAZARD
    if k > 1.0:
        return ShapeClass.LOG_CONCAVE_IFR if g > 0.0 else ShapeClass.LOG_CONVEX_DFR
    return ShapeClass.INDETERMINATE


def sample(table: PmfTable, n: int, seed: int = 0) -> np.ndarray:
    """Inverse-transform draws against the cached cdf."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if isinstance(seed, bool) or int(seed) != seed or not (0 <= seed < 2**64):
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    rng = np.random.default_rng(int(seed))
    u = rng.random(int(n))
    draws = np.searchsorted(table.cumulative, u, side="left").astype(np.int64)
    for i in np.flatnonzero(draws > table.y_max):
        draws[i] = _quantile_beyond(table, float(u[i]))
    return draws


# --- fitting ----------------------------------------------------------------

GAMMA_BOUNDS = (-3.0, 5.0)
K_BOUNDS = (0.1, 50.0)
Q_BOUNDS = (0.001, 0.999)
GRID_POINTS = 16
FIT_EPSILON = 1e-10


def _as_counts(data: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(list(data) if not isinstance(data, np.ndarray) else data)
    if arr.size == 0:
        raise DomainError("data must be nonempty")
    if arr.ndim != 1:
        raise DomainError("data must be a flat sequence of counts")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise DomainError("data must be nonnegative integers")
        arr = arr.astype(np.int64)
    elif arr.dtype.kind not in "iu":
        raise DomainError("data must be nonnegative integers")
    if np.any(arr < 0):
        raise DomainError("data must be nonnegative integers")
    ys, counts = np.unique(arr, return_counts=True)
    return ys.astype(float), counts.astype(float)


def _log_terms_at(ys: np.ndarray, g: float, k: float, q: float) -> np.ndarray:
    return g * log_binomial(ys, k) + ys * math.log(q)


def _count_loglik(ys, counts, g, k, q, epsilon) -> float:
    try:
        log_z = log_normalizing_constant(NgnbParams(g, k, q), epsilon)
    except (IterationLimitExceeded, NumericalOverflow):
        return -math.inf
    return math.fsum(counts * _log_terms_at(ys, g, k, q)) - counts.sum() * log_z


def log_likelihood(params: NgnbParams, data: Iterable[int], epsilon: float = FIT_EPSILON) -> float:
    ys, counts = _as_counts(data)
    return _count_loglik(ys, counts, params.gamma, params.k, params.q, epsilon)


def _log_peak_term(g: float, k: float, q: float) -> float:
    """Log of the largest term of the series; ``log Z`` is at least this."""
    if g * (k - 1.0) <= 0.0:
        return 0.0
    # terms rise while ((y+k)/(y+1))**g * q > 1
    exponent = -math.log(q) / g
    if exponent > 700.0:
        return 0.0
    step = math.expm1(exponent)
    y_star = max(0.0, math.ceil((k - 1.0) / step - 1.0))
    cands = np.array([max(0.0, y_star - 1.0), y_star, y_star + 1.0])
    return float(np.max(_log_terms_at(cands, g, k, q)))


def _refine(loglik, u0, lo, hi, spacing) -> tuple[float, np.ndarray]:
    best_u = np.array(u0, dtype=float)
    best = loglik(best_u)
    window = spacing.copy()
    for _ in range(100):
        before = best
        for i in range(3):
            a = max(lo[i], best_u[i] - window[i])
            b = min(hi[i], best_u[i] + window[i])

            def f(x, i=i):
                u = best_u.copy()
                u[i] = x
                return -loglik(u)

            res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-9})
            if -res.fun > best:
                best = -res.fun
                best_u = best_u.copy()
                best_u[i] = res.x
        window = np.maximum(window * 0.5, 1e-6)
        if best - before <= 1e-10 * max(1.0, abs(best)) and np.all(window <= 1e-3):
            break

    res = minimize(
        lambda u: -loglik(u),
        best_u,
        method="Nelder-Mead",
        options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 4000},
    )
    if -res.fun > best:
        best, best_u = -res.fun, np.clip(res.x, lo, hi)
    return best, best_u


@dataclass(frozen=True)
class FitResult:
    params: NgnbParams
    log_likelihood: float
    grid_best: float
    n_evaluated: int


def fit_mle(
    data: Sequence[int],
    init: NgnbParams | None = None,
    *,
    epsilon: float = FIT_EPSILON,
    grid_points: int = GRID_POINTS,
    n_starts: int = 6,
    full: bool = False,
):
    """Maximum-likelihood ``(gamma, k, q)`` for a sample of counts.

    A coarse grid over ``gamma``, ``log k`` and ``logit q`` is scanned first.
    Each grid point carries the cheap upper bound ``sum log term(y_i) - n log
    max_y term(y)``; points whose bound cannot beat the incumbent are skipped
    without evaluating ``Z``.  The incumbent is then refined by coordinate-wise
    bounded Brent searches and a final simplex polish, each step accepted only
    if it raises the likelihood.  The likelihood ridge along which
    ``k * gamma * q / (1 - q)`` stays near the sample mean is narrow, so the
    refinement is started from the ``n_starts`` best grid points.
    """
    ys, counts = _as_counts(data)
    n = counts.sum()

    def data_term(g, k, q):
        return math.fsum(counts * _log_terms_at(ys, g, k, q))

    lo = np.array([GAMMA_BOUNDS[0], math.log(K_BOUNDS[0]), logit(Q_BOUNDS[0])])
    hi = np.array([GAMMA_BOUNDS[1], math.log(K_BOUNDS[1]), logit(Q_BOUNDS[1])])
    axes = [np.linspace(lo[i], hi[i], grid_points) for i in range(3)]
    spacing = (hi - lo) / (grid_points - 1)

    def unpack(u):
        return float(u[0]), float(math.exp(u[1])), float(expit(u[2]))

    def loglik(u) -> float:
        u = np.clip(u, lo, hi)
        return _count_loglik(ys, counts, *unpack(u), epsilon)

    candidates = []
    for g in axes[0]:
        for lk in axes[1]:
            for lq in axes[2]:
                gg, k, q = unpack((g, lk, lq))
                bound = data_term(gg, k, q) - n * _log_peak_term(gg, k, q)
                candidates.append((bound, (g, lk, lq)))
    candidates.sort(key=lambda c: -c[0])

    evaluated: list[tuple[float, np.ndarray]] = []
    incumbent = -math.inf
    for bound, u in candidates:
        if bound <= incumbent:
            break
        value = loglik(np.array(u))
        evaluated.append((value, np.array(u)))
        incumbent = max(incumbent, value)
    if not math.isfinite(incumbent):
        raise FitFailed("log-likelihood is non-finite at every grid point")
    grid_best = incumbent

    starts = [u for value, u in sorted(evaluated, key=lambda e: -e[0])[:n_starts] if math.isfinite(value)]
    if init is not None:
        starts.append(np.clip([init.gamma, math.log(init.k), logit(init.q)], lo, hi))

    best, best_u = -math.inf, starts[0]
    for u0 in starts:
        value, u = _refine(loglik, u0, lo, hi, spacing)
        if value > best:
            best, best_u = value, u

    fitted = NgnbParams(*unpack(best_u))
    if full:
        return FitResult(fitted, best, grid_best, len(evaluated))
    return fitted
