"""Closed-form mean/variance approximations and their error analysis.

The approximations ``k*gamma*q/(1-q)`` and ``k*gamma*q/(1-q)**2`` are the
moments of a sum of ``gamma`` independent negative binomials with size ``k``,
and are exact at ``gamma = 1``.  Errors are always ``exact - approx``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Iterator, Sequence

from .distribution import build, mean_exact, variance_exact
from .errors import Undefined
from .series import DEFAULT_EPSILON, NgnbParams

__all__ = [
    "MomentReport",
    "GridSpec",
    "GridSummary",
    "PRESETS",
    "mean_approx",
    "var_approx",
    "moment_report",
    "iter_reports",
    "grid_summary",
    "summarize_reports",
    "round_half_away",
    "ngnb_asymptotic_mean",
]


def round_half_away(x: float, ndigits: int = 2) -> float:
    """Round on the decimal repr of ``x``, ties away from zero."""
    quantum = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(float(x))).quantize(quantum, rounding=ROUND_HALF_UP))


def mean_approx(params: NgnbParams) -> float:
    return params.k * params.gamma * params.q / (1.0 - params.q)


def var_approx(params: NgnbParams) -> float:
    return params.k * params.gamma * params.q / (1.0 - params.q) ** 2


@dataclass(frozen=True)
class MomentReport:
    params: NgnbParams
    mean_exact: float
    mean_approx: float
    var_exact: float
    var_approx: float
    mean_error: float
    var_error: float

    def rounded(self, ndigits: int = 2) -> "MomentReport":
        """Same report with all four moments rounded first, errors recomputed."""
        me, ma, ve, va = (
            round_half_away(v, ndigits)
            for v in (self.mean_exact, self.mean_approx, self.var_exact, self.var_approx)
        )
        return MomentReport(self.params, me, ma, ve, va, me - ma, ve - va)


def moment_report(params: NgnbParams, epsilon: float = DEFAULT_EPSILON) -> MomentReport:
    table = build(params, epsilon)
    me, ve = mean_exact(table), variance_exact(table)
    ma, va = mean_approx(params), var_approx(params)
    return MomentReport(params, me, ma, ve, va, me - ma, ve - va)


@dataclass(frozen=True)
class GridSpec:
    gammas: tuple[float, ...]
    qs: tuple[float, ...]
    ks: tuple[float, ...]

    def __post_init__(self) -> None:
        for name in ("gammas", "qs", "ks"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ValueError(f"grid axis {name} is empty")
            object.__setattr__(self, name, values)

    @property
    def n_points(self) -> int:
        return len(self.gammas) * len(self.qs) * len(self.ks)

    def points(self) -> Iterator[NgnbParams]:
        """Canonical order: q outermost, then k, then gamma (the tables' layout)."""
        for q, k, g in itertools.product(sorted(self.qs), sorted(self.ks), sorted(self.gammas)):
            yield NgnbParams(g, k, q)

    def describe(self) -> str:
        def fmt(values):
            return "{" + ",".join(f"{v:g}" for v in sorted(values)) + "}"

        return f"gamma={fmt(self.gammas)};q={fmt(self.qs)};k={fmt(self.ks)}"


def _tenths(lo: int, hi: int) -> tuple[float, ...]:
    return tuple(i / 10 for i in range(lo, hi + 1))


# "text" grids follow the stated ranges of the error analysis; "tables" grids
# take every cell of the corresponding printed tables.
PRESETS: dict[str, GridSpec] = {
    "gamma-lt-1": GridSpec(_tenths(3, 9), _tenths(1, 8), tuple(range(5, 10))),
    "gamma-gt-1": GridSpec((1.2, 1.4, 1.5, 1.6, 1.8, 2.0), _tenths(4, 8), tuple(range(5, 10))),
    "gamma-lt-1-tables": GridSpec(_tenths(3, 9), _tenths(1, 9), tuple(range(5, 11))),
    "gamma-gt-1-tables": GridSpec((1.2, 1.4, 1.5, 1.6, 1.8, 2.0), (0.2, 0.4, 0.5, 0.6, 0.7, 0.8), tuple(range(5, 11))),
}


@dataclass(frozen=True)
class GridSummary:
    grid_spec: str
    n_points: int
    mean_avg_error: float
    mean_mse: float
    var_avg_error: float
    var_mse: float

    @property
    def mean_rmse(self) -> float:
        return math.sqrt(self.mean_mse)

    @property
    def var_rmse(self) -> float:
        return math.sqrt(self.var_mse)


def iter_reports(
    grid: GridSpec,
    epsilon: float = DEFAULT_EPSILON,
    *,
    round_to: int | None = None,
) -> Iterator[MomentReport]:
    for params in grid.points():
        report = moment_report(params, epsilon)
        yield report if round_to is None else report.rounded(round_to)


def summarize_reports(grid: GridSpec, reports: Iterable[MomentReport]) -> GridSummary:
    mean_errs: list[float] = []
    var_errs: list[float] = []
    for r in reports:
        mean_errs.append(r.mean_error)
        var_errs.append(r.var_error)
    n = len(mean_errs)
    return GridSummary(
        grid_spec=grid.describe(),
        n_points=n,
        mean_avg_error=math.fsum(mean_errs) / n,
        mean_mse=math.fsum(e * e for e in mean_errs) / n,
        var_avg_error=math.fsum(var_errs) / n,
        var_mse=math.fsum(e * e for e in var_errs) / n,
    )


def grid_summary(
    gammas: Sequence[float] | GridSpec,
    qs: Sequence[float] | None = None,
    ks: Sequence[float] | None = None,
    epsilon: float = DEFAULT_EPSILON,
    *,
    round_to: int | None = None,
) -> GridSummary:
    """Average and mean-square of ``exact - approx`` over a Cartesian grid.

    ``round_to`` rounds every exact and approximate moment before
    differencing, which is how errors read off 2-dp tables behave.
    """
    grid = gammas if isinstance(gammas, GridSpec) else GridSpec(tuple(gammas), tuple(qs), tuple(ks))
    return summarize_reports(grid, iter_reports(grid, epsilon, round_to=round_to))


def _ecomp_asymptotic_mean(p: float, gamma: float, alpha: float, beta: float) -> float:
    if alpha == beta:
        raise Undefined("asymptotic ECOMP mean needs alpha != beta")
    return p ** (1.0 / (alpha - beta)) + (1.0 - alpha + (2.0 * gamma - 1.0) * beta) / (2.0 * (alpha - beta))


def ngnb_asymptotic_mean(params: NgnbParams) -> float:
    """Always raises :class:`Undefined`: the ECOMP asymptotic mean has
    ``alpha - beta`` in a denominator, and the NGNB sets ``alpha = beta = gamma``."""
    return _ecomp_asymptotic_mean(params.p, params.gamma, params.gamma, params.gamma)
