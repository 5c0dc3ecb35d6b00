import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import poch

from ngnb import NgnbParams
from ngnb.distribution import build, mean_exact
from ngnb.errors import DomainError
from ngnb.hypergeom import PfqSpec, log_pfq_repeated, mean_via_pfq, pfq_repeated, pgf, pochhammer

# mpmath oracle: sum_y s**y pmf(y) for (2, 3, 0.4) at s = 0.7
ORACLE_PGF_2_3_04_AT_07 = 0.32010422258006796398


class TestPochhammer:
    @pytest.mark.parametrize("b, n, expected", [(7.3, 0, 1.0), (-2.5, 0, 1.0), (3, 2, 12.0), (1, 5, 120.0)])
    def test_values(self, b, n, expected):
        assert pochhammer(b, n) == expected

    @given(st.floats(-30.0, 30.0, allow_subnormal=False), st.integers(0, 60))
    def test_matches_scipy(self, b, n):
        ours, ref = pochhammer(b, n), poch(b, n)
        if not math.isfinite(ref):
            return
        assert ours == pytest.approx(ref, rel=1e-11, abs=1e-300)

    def test_hits_zero_factor(self):
        assert pochhammer(-3.0, 40) == 0.0
        assert pochhammer(-3.0, 4) == 0.0

    def test_all_negative_factors(self):
        assert pochhammer(-50.0, 40) == pytest.approx(poch(-50.0, 40), rel=1e-12)

    @pytest.mark.parametrize("n", [-1, 1.5, True])
    def test_domain(self, n):
        with pytest.raises(DomainError):
            pochhammer(2.0, n)


class TestPfq:
    @given(st.floats(0.1, 20.0), st.floats(0.0, 0.95))
    def test_binomial_series(self, k, z):
        assert pfq_repeated(PfqSpec(1, k, z)) == pytest.approx((1 - z) ** -k, rel=1e-10)

    @pytest.mark.parametrize("g", [1, 2, 3, 5])
    def test_zero_argument(self, g):
        assert pfq_repeated(PfqSpec(g, 4.5, 0.0)) == 1.0

    def test_gauss_unit_parameters(self):
        assert pfq_repeated(PfqSpec(2, 1.0, 0.3)) == pytest.approx(1 / 0.7, rel=1e-12)

    @pytest.mark.parametrize("g, k, z", [(2, 2.5, 0.6), (3, 1.5, 0.4), (3, 2.5, -0.4), (1, 3.0, -0.5)])
    def test_against_mpmath(self, g, k, z):
        ref = mp.hyper([k] * g, [1] * (g - 1), z)
        assert pfq_repeated(PfqSpec(g, k, z)) == pytest.approx(float(ref), rel=1e-11)

    @pytest.mark.parametrize("spec", [(0, 1.0, 0.5), (1.5, 1.0, 0.5), (2, -1.0, 0.5), (2, 1.0, 1.0), (2, 1.0, -1.0)])
    def test_invalid_series_parameters(self, spec):
        with pytest.raises(DomainError):
            PfqSpec(*spec)

    def test_log_form_rejects_negative_argument(self):
        with pytest.raises(DomainError):
            log_pfq_repeated(PfqSpec(2, 2.0, -0.3))

    def test_log_form_handles_huge_values(self):
        # ~ exp(hundreds); only the log is representable comfortably
        value = log_pfq_repeated(PfqSpec(5, 10.0, 0.9))
        assert value > 100


def _direct_pgf(p, s):
    t = build(p)
    ys = np.arange(t.y_max + 1)
    return math.fsum(t.probs * s**ys) + t.tail_mass * s ** (t.y_max + 1)


class TestPgf:
    @pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
    def test_at_one(self, g):
        assert pgf(NgnbParams(g, 3.0, 0.4), 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_negative_binomial(self):
        assert pgf(NgnbParams(1, 5, 0.5), 0.5) == pytest.approx((0.5 / 0.75) ** 5, rel=1e-12)

    def test_against_oracle(self):
        assert pgf(NgnbParams(2, 3, 0.4), 0.7) == pytest.approx(ORACLE_PGF_2_3_04_AT_07, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            pgf(NgnbParams(1.5, 3, 0.4), 0.5)
        with pytest.raises(DomainError):
            pgf(NgnbParams(2, 3, 0.4), 1.5)

    @given(
        st.integers(1, 5),
        st.sampled_from([2.0, 5.0, 7.5]),
        st.sampled_from([0.1, 0.5, 0.8]),
        st.floats(0.0, 1.0),
    )
    def test_matches_direct_series(self, g, k, q, s):
        p = NgnbParams(g, k, q)
        assert pgf(p, s) == pytest.approx(_direct_pgf(p, s), rel=1e-9)

    @pytest.mark.parametrize("g, k, q", [(1, 5, 0.5), (2, 3, 0.4), (3, 2, 0.3), (5, 7.5, 0.1)])
    def test_derivative_at_one_is_mean(self, g, k, q):
        # s is confined to [0, 1], so use the one-sided second-order stencil
        p = NgnbParams(g, k, q)
        h = 1e-5
        deriv = (3 * pgf(p, 1.0) - 4 * pgf(p, 1 - h) + pgf(p, 1 - 2 * h)) / (2 * h)
        assert deriv == pytest.approx(mean_exact(build(p)), rel=1e-4)


class TestMeanViaPfq:
    def test_negative_binomial(self):
        assert mean_via_pfq(NgnbParams(1, 5, 0.5)) == pytest.approx(5.0, rel=1e-12)

    def test_printed_table_value(self):
        assert round(mean_via_pfq(NgnbParams(2, 5, 0.5)), 2) == 10.61

    def test_against_oracle(self):
        assert mean_via_pfq(NgnbParams(3, 2, 0.3)) == pytest.approx(2.3169058016219587248, rel=1e-11)

    @given(st.integers(1, 5), st.sampled_from([2.0, 5.0, 7.5]), st.sampled_from([0.1, 0.5, 0.8]))
    def test_matches_series_engine(self, g, k, q):
        p = NgnbParams(g, k, q)
        assert mean_via_pfq(p) == pytest.approx(mean_exact(build(p)), rel=1e-9)


class TestKempRatio:
    @given(st.floats(-2.0, 3.0), st.floats(0.05, 20.0), st.floats(0.01, 0.95))
    def test_type_1a_form(self, g, k, q):
        t = build(NgnbParams(g, k, q))
        ys = np.arange(t.y_max, dtype=float)
        kemp = (k + ys) ** g / (1 + ys) ** (g - 1) * q / (1 + ys)
        np.testing.assert_allclose(t.probs[1:] / t.probs[:-1], kemp, rtol=1e-11)
