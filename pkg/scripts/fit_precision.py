"""Expected precision of the maximum-likelihood fit from Fisher information.

    python scripts/fit_precision.py [--n 100000]

The per-observation information matrix is the probability-weighted outer
product of the score, with the score taken by central differences of the
exact log-pmf.  Reports the standard error of each parameter relative to its
true value, which bounds how reliably a 10% recovery target can be met.
"""

import argparse
import math

import numpy as np

from ngnb import NgnbParams, build
from ngnb.series import log_binomial, log_normalizing_constant

CONFIGS = [(1.0, 5.0, 0.5), (0.5, 5.0, 0.5), (2.0, 3.0, 0.4)]
STEPS = np.array([1e-5, 1e-5, 1e-6])


def relative_standard_errors(params, n):
    table = build(NgnbParams(*params))
    ys = np.arange(table.y_max + 1.0)

    def log_pmf(theta):
        g, k, q = theta
        return g * log_binomial(ys, k) + ys * math.log(q) - log_normalizing_constant(NgnbParams(g, k, q))

    theta = np.array(params)
    score = np.array([
        (log_pmf(theta + h) - log_pmf(theta - h)) / (2 * h.sum())
        for h in np.diag(STEPS)
    ])
    info = (score * table.probs) @ score.T
    se = np.sqrt(np.diag(np.linalg.inv(info) / n))
    return se / np.abs(theta)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=100_000)
    n = parser.parse_args().n
    for params in CONFIGS:
        rel = relative_standard_errors(params, n)
        print(f"{params}: relative SE gamma {rel[0]:.1%}, k {rel[1]:.1%}, q {rel[2]:.1%} at n={n}")
