"""Independent high-precision reference computations.

Everything here sums the defining series term by term in mpmath at 40
digits, with no shared code path with the package (no log-ratio
accumulation, no geometric tail bound).  Used to derive and re-check the
frozen constants in the test modules.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 40


def ngnb_terms(gamma, k, q, rel=mp.mpf("1e-35"), max_terms=200_000):
    g, k, q = mp.mpf(gamma), mp.mpf(k), mp.mpf(q)
    terms = []
    total = mp.mpf(0)
    for y in range(max_terms):
        t = mp.binomial(y + k - 1, y) ** g * q**y
        terms.append(t)
        total += t
        # ratio tends to q, so once terms decay past the peak stop on size
        if y > 10 and t < rel * total and terms[-2] > t:
            return terms, total
    raise RuntimeError("oracle did not converge")


def ngnb_pmf(gamma, k, q):
    terms, z = ngnb_terms(gamma, k, q)
    return [t / z for t in terms], z


def ngnb_moments(gamma, k, q):
    probs, _ = ngnb_pmf(gamma, k, q)
    mean = mp.fsum(y * p for y, p in enumerate(probs))
    var = mp.fsum((y - mean) ** 2 * p for y, p in enumerate(probs))
    fact2 = mp.fsum(y * (y - 1) * p for y, p in enumerate(probs))
    return mean, var, fact2


def com_poisson_pmf(lam, gamma, rel=mp.mpf("1e-35")):
    lam, g = mp.mpf(lam), mp.mpf(gamma)
    terms = []
    total = mp.mpf(0)
    y = 0
    while True:
        t = lam**y / mp.factorial(y) ** g
        terms.append(t)
        total += t
        if y > 5 and t < rel * total and terms[-2] > t:
            break
        y += 1
    return [t / total for t in terms]


def geometric_tv(q1, q2, n=400):
    q1, q2 = mp.mpf(q1), mp.mpf(q2)
    return mp.fsum(abs((1 - q1) * q1**y - (1 - q2) * q2**y) for y in range(n)) / 2
