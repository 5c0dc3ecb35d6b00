"""COM-Poisson law and the NGNB -> COM-Poisson limit.

With ``lam = k**gamma * q`` held fixed, NGNB(gamma, k, q) tends to the
COM-Poisson law with pmf proportional to ``lam**y / (y!)**gamma`` as
``k -> inf``.  Convergence is measured in total variation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distribution import PmfTable, build, table_from_log_terms
from .errors import DivergentSeries, DomainError, InvalidParams, IterationLimitExceeded
from .series import DEFAULT_EPSILON, MAX_TERMS, NgnbParams, scan_series

__all__ = [
    "ComPoissonParams",
    "ComPoissonTable",
    "com_poisson_log_ratio",
    "com_poisson_table",
    "tv_distance",
    "ConvergencePoint",
    "convergence_profile",
]


@dataclass(frozen=True)
class ComPoissonParams:
    lam: float
    gamma: float

    def __post_init__(self) -> None:
        lam, g = float(self.lam), float(self.gamma)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "gamma", g)
        if not (math.isfinite(lam) and lam > 0):
            raise InvalidParams(f"lambda must be positive, got {self.lam}")
        if not math.isfinite(g):
            raise InvalidParams(f"gamma must be finite, got {self.gamma}")
        if g < 0 or (g == 0 and lam >= 1):
            raise DivergentSeries(f"sum lam**j/(j!)**gamma diverges for lam={lam}, gamma={g}")


@dataclass(frozen=True, eq=False)
class ComPoissonTable(PmfTable):
    params: ComPoissonParams = field(default=None)  # type: ignore[assignment]


def com_poisson_log_ratio(y, params: ComPoissonParams):
    """Log of ``term(y+1)/term(y) = lam / (y+1)**gamma``."""
    y = np.asarray(y, dtype=float)
    out = math.log(params.lam) - params.gamma * np.log1p(y)
    return out if out.ndim else float(out)


def com_poisson_table(
    params: ComPoissonParams,
    epsilon: float = DEFAULT_EPSILON,
    *,
    max_terms: int = MAX_TERMS,
) -> ComPoissonTable:
    if params.gamma == 0.0:
        limit = params.lam
        rho = 0.5 * (1.0 + limit)
        y0 = 0
    else:
        limit = 0.0
        rho = 0.5
        # lam / (y+1)**gamma <= 1/2  <=>  y + 1 >= (2 lam)**(1/gamma)
        log_y0 = math.log(2.0 * params.lam) / params.gamma
        if log_y0 > math.log(max_terms):
            raise IterationLimitExceeded(f"COM-Poisson series needs more than {max_terms} terms")
        y0 = max(0, math.ceil(math.exp(log_y0) - 1.0))
        while com_poisson_log_ratio(y0, params) > math.log(rho):
            y0 += 1
    logs, trunc = scan_series(
        lambda y: com_poisson_log_ratio(y, params),
        y0,
        rho,
        epsilon,
        ratio_limit=limit,
        order=2,
        max_terms=max_terms,
    )
    return table_from_log_terms(
        logs,
        trunc,
        lambda y: com_poisson_log_ratio(y, params),
        ComPoissonTable,
        params=params,
    )


def tv_distance(a: PmfTable, b: PmfTable) -> float:
    """Half the L1 distance over the union of the tabulated supports.

    The mass past either table's end is below its ``tail_mass`` and is not
    counted; the result is accurate to ``(a.tail_mass + b.tail_mass) / 2``.
    """
    n = max(len(a.probs), len(b.probs))
    pa = np.zeros(n)
    pb = np.zeros(n)
    pa[: len(a.probs)] = a.probs
    pb[: len(b.probs)] = b.probs
    return float(min(1.0, max(0.0, 0.5 * math.fsum(np.abs(pa - pb)))))


@dataclass(frozen=True)
class ConvergencePoint:
    k: float
    q: float
    tv: float


def convergence_profile(
    gamma: float,
    lam: float,
    ks: Sequence[float],
    epsilon: float = DEFAULT_EPSILON,
) -> list[ConvergencePoint]:
    """TV distance between NGNB(gamma, k, lam / k**gamma) and COM-Poisson(lam, gamma)."""
    if not gamma > 0:
        raise DomainError(f"the limit is taken for gamma > 0, got {gamma}")
    qs = []
    for k in ks:
        if not k > 0:
            raise DomainError(f"k must be positive, got {k}")
        q = lam * float(k) ** (-gamma)
        if not (0.0 < q < 1.0):
            raise DomainError(f"k={k:g} gives q={q:g}, outside (0, 1)")
        qs.append(q)
    target = com_poisson_table(ComPoissonParams(lam, gamma), epsilon)
    return [
        ConvergencePoint(float(k), q, tv_distance(build(NgnbParams(gamma, k, q), epsilon), target))
        for k, q in zip(ks, qs)
    ]
