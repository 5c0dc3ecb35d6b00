import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from ngnb import NgnbParams
from ngnb.distribution import PmfTable, build, table_from_log_terms
from ngnb.errors import DivergentSeries, DomainError, InvalidParams, IterationLimitExceeded
from ngnb.limits import ComPoissonParams, com_poisson_table, convergence_profile, tv_distance
from ngnb.series import SeriesTruncation

# mpmath oracle values (tests/oracles.py), frozen
ORACLE_CMP_2_15 = [0.31589697166796900566, 0.47384545750195350849, 0.17769204656323256568, 0.029615341093872094280]
ORACLE_TV_GEOM_05_06 = 0.11
ORACLE_TV_NB_POISSON = {10: 0.1183306677030635, 100: 0.01092624559140247, 1000: 0.0010836749047520774}
ORACLE_TV_G2_L15 = {5: 0.10534691571701564, 50: 0.0091395442295188902, 500: 0.00090157590573045457}


def point_mass(at: int) -> PmfTable:
    logs = np.full(at + 1, -np.inf)
    logs[at] = 0.0
    trunc = SeriesTruncation(at, 0.0, 1e-12, 1.0, 0.0)
    return table_from_log_terms(logs, trunc, lambda y: np.full(np.shape(y), -np.inf))


class TestComPoisson:
    @pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
    def test_poisson_collapse(self, lam):
        t = com_poisson_table(ComPoissonParams(lam, 1.0))
        ys = np.arange(t.y_max + 1)
        np.testing.assert_allclose(t.probs, stats.poisson.pmf(ys, lam), rtol=1e-12, atol=1e-300)
        assert t.probs[0] == pytest.approx(math.exp(-lam), rel=1e-12)

    def test_near_degenerate(self):
        t = com_poisson_table(ComPoissonParams(1e-4, 1.0))
        assert t.probs[0] == pytest.approx(math.exp(-1e-4), rel=1e-12)

    def test_against_oracle(self):
        t = com_poisson_table(ComPoissonParams(1.5, 2.0))
        np.testing.assert_allclose(t.probs[:4], ORACLE_CMP_2_15, rtol=1e-12)

    def test_geometric_case(self):
        t = com_poisson_table(ComPoissonParams(0.4, 0.0))
        ys = np.arange(t.y_max + 1)
        np.testing.assert_allclose(t.probs, 0.6 * 0.4**ys, rtol=1e-12)

    @pytest.mark.parametrize("lam, g", [(1.0, 0.0), (2.0, 0.0), (1.0, -0.5)])
    def test_divergent(self, lam, g):
        with pytest.raises(DivergentSeries):
            ComPoissonParams(lam, g)

    @pytest.mark.parametrize("lam, g", [(0.0, 1.0), (-1.0, 1.0), (math.nan, 1.0), (1.0, math.inf)])
    def test_invalid(self, lam, g):
        with pytest.raises(InvalidParams):
            ComPoissonParams(lam, g)

    def test_term_cap(self):
        with pytest.raises(IterationLimitExceeded):
            com_poisson_table(ComPoissonParams(4.0, 0.125))

    @given(st.floats(0.01, 30.0), st.floats(0.5, 4.0))
    def test_normalization(self, lam, g):
        t = com_poisson_table(ComPoissonParams(lam, g))
        assert abs(t.cumulative[-1] + t.tail_mass - 1) < 1e-10


class TestTvDistance:
    def test_identical(self):
        t = build(NgnbParams(0.5, 5, 0.5))
        assert tv_distance(t, t) == 0.0

    def test_disjoint_point_masses(self):
        assert tv_distance(point_mass(0), point_mass(1)) == 1.0

    def test_geometric_pair(self):
        a, b = build(NgnbParams(0, 5, 0.5)), build(NgnbParams(0, 5, 0.6))
        assert tv_distance(a, b) == pytest.approx(ORACLE_TV_GEOM_05_06, abs=1e-11)

    @given(
        st.tuples(st.floats(-1, 2), st.floats(0.5, 8), st.floats(0.05, 0.8)),
        st.tuples(st.floats(-1, 2), st.floats(0.5, 8), st.floats(0.05, 0.8)),
        st.tuples(st.floats(-1, 2), st.floats(0.5, 8), st.floats(0.05, 0.8)),
    )
    def test_metric_axioms(self, pa, pb, pc):
        a, b, c = (build(NgnbParams(*p)) for p in (pa, pb, pc))
        ab, ba = tv_distance(a, b), tv_distance(b, a)
        assert ab == ba
        assert 0.0 <= ab <= 1.0
        assert ab <= tv_distance(a, c) + tv_distance(c, b) + 1e-12
        if pa == pb:
            assert ab == 0.0


class TestConvergence:
    def test_negative_binomial_to_poisson(self):
        prof = convergence_profile(1.0, 2.0, [10, 100, 1000])
        for pt in prof:
            assert pt.q == pytest.approx(2.0 / pt.k)
            assert pt.tv == pytest.approx(ORACLE_TV_NB_POISSON[int(pt.k)], rel=1e-9)
        tvs = [pt.tv for pt in prof]
        assert tvs[0] > tvs[1] > tvs[2]
        # the classical rate is about lam / (2k): 1.08e-3 at k = 1000
        assert tvs[2] < 1.1e-3

    def test_com_poisson_gamma_two(self):
        prof = convergence_profile(2.0, 1.5, [5, 50, 500])
        for pt in prof:
            assert pt.q == pytest.approx(1.5 / pt.k**2)
            assert pt.tv == pytest.approx(ORACLE_TV_G2_L15[int(pt.k)], rel=1e-9)
        assert prof[0].tv > prof[1].tv > prof[2].tv
        assert prof[2].tv < 0.01

    def test_invalid_q(self):
        with pytest.raises(DomainError):
            convergence_profile(1.0, 2.0, [1])

    def test_requires_positive_gamma(self):
        with pytest.raises(DomainError):
            convergence_profile(0.0, 0.5, [10])
