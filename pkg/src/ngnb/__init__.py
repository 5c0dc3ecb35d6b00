"""NGNB count distribution: pmf proportional to ``C(y+k-1, y)**gamma * q**y``."""

from .approx import GridSpec, GridSummary, MomentReport, PRESETS, grid_summary, moment_report
from .distribution import (
    DistributionTable,
    FitResult,
    HazardCurve,
    ShapeClass,
    build,
    cdf,
    classify_shape,
    dispersion_index,
    factorial_moment,
    fit_mle,
    hazard,
    hazard_curve,
    log_concavity_ratio,
    mean_exact,
    pmf,
    quantile,
    sample,
    survival,
    variance_exact,
)
from .errors import (
    DegenerateDistribution,
    DivergentSeries,
    DomainError,
    FitFailed,
    InvalidParams,
    IterationLimitExceeded,
    NgnbError,
    NumericalError,
    NumericalOverflow,
    NumericalUnderflow,
    Undefined,
)
from .hypergeom import mean_via_pfq, pfq_repeated, pgf, pochhammer
from .limits import ComPoissonParams, com_poisson_table, convergence_profile, tv_distance
from .series import NgnbParams, log_normalizing_constant, normalizing_constant, truncation_point

__version__ = "0.1.0"
