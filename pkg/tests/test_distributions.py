import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloudprice import (
    DiscreteDistribution,
    PiecewiseLinearDistribution,
    UniformDistribution,
    make_bimodal,
)

TWO_POINT = DiscreteDistribution([(0.2, 0.9), (0.9, 0.1)])


class TestStrictCdf:
    def test_uniform(self):
        assert UniformDistribution(0, 1).cdf_strict(0.3) == pytest.approx(0.3)

    def test_atom_at_query_excluded(self):
        assert TWO_POINT.cdf_strict(0.2) == 0.0

    def test_mass_strictly_below(self):
        assert TWO_POINT.cdf_strict(0.9) == pytest.approx(0.9)

    def test_left_continuity_at_atoms(self):
        # no atom in [v - eps, v), so the left limit equals the value at v
        for v in TWO_POINT.values:
            assert TWO_POINT.cdf_strict(v - 1e-9) == pytest.approx(
                TWO_POINT.cdf_strict(v), abs=1e-15
            )

    def test_tail_complement(self):
        for x in (0.0, 0.2, 0.5, 0.9, 1.5):
            assert TWO_POINT.cdf_strict(x) + TWO_POINT.tail_prob(x) == pytest.approx(
                1.0, abs=1e-12
            )


class TestPartialExpectation:
    def test_uniform_formula(self):
        uni = UniformDistribution(0, 1)
        assert uni.partial_expectation(0.0) == pytest.approx(0.5)
        for p in (0.1, 0.3, 0.7):
            assert uni.partial_expectation(p) == pytest.approx((1 - p ** 2) / 2)

    def test_single_included_atom(self):
        assert TWO_POINT.partial_expectation(0.9) == pytest.approx(0.09)

    def test_empty_tail(self):
        assert TWO_POINT.partial_expectation(1.0) == 0.0
        assert UniformDistribution(0, 1).partial_expectation(2.0) == 0.0


discrete_dists = st.lists(
    st.tuples(
        st.floats(0.0, 10.0, allow_nan=False),
        st.floats(0.01, 1.0, allow_nan=False),
    ),
    min_size=1,
    max_size=6,
).map(
    lambda atoms: sorted({round(v, 6): w for v, w in atoms}.items())
).filter(
    lambda atoms: len(atoms) >= 1
).map(
    lambda atoms: DiscreteDistribution(
        [(v, w / sum(w for _, w in atoms)) for v, w in atoms]
    )
)


@settings(max_examples=200, deadline=None)
@given(discrete_dists, st.floats(0.0, 11.0, allow_nan=False))
def test_split_at_price_recovers_mean(dist, p):
    below = float(np.sum(dist.values * dist.weights * (dist.values < p)))
    assert dist.partial_expectation(p) + below == pytest.approx(dist.mean(), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(discrete_dists, st.floats(0.0, 11.0), st.floats(0.0, 11.0))
def test_monotonicity(dist, p, q):
    lo, hi = min(p, q), max(p, q)
    assert dist.partial_expectation(lo) >= dist.partial_expectation(hi) - 1e-12
    assert dist.cdf_strict(lo) <= dist.cdf_strict(hi) + 1e-12


class TestSupportCandidates:
    def test_discrete_enumeration(self):
        cands = TWO_POINT.support_candidates()
        assert cands[0] == 0.0
        assert list(cands[1:3]) == [0.2, 0.9]
        assert 0.9 < cands[3] <= 0.9 + 1e-5

    def test_uniform_grid(self):
        assert list(UniformDistribution(0, 1).support_candidates(5)) == [
            0.0,
            0.25,
            0.5,
            0.75,
            1.0,
        ]

    def test_single_atom(self):
        one = DiscreteDistribution([(0.4, 1.0)])
        cands = one.support_candidates()
        assert cands[0] == 0.0 and cands[1] == 0.4 and cands[2] > 0.4


class TestBimodal:
    def test_construction(self):
        dist = make_bimodal(0.1, 0.01, 0.99)
        assert list(dist.values) == [0.01, 0.99]
        assert list(dist.weights) == pytest.approx([0.9, 0.1])

    def test_tail_and_partial_at_high_value(self):
        dist = make_bimodal(0.1, 0.01, 0.99)
        assert dist.tail_prob(0.99) == pytest.approx(0.1)
        assert dist.partial_expectation(0.99) == pytest.approx(0.099)

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            make_bimodal(0.1, 0.5, 0.5)


class TestValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([(0.2, 0.5), (0.9, 0.4)])

    def test_values_must_ascend(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([(0.9, 0.5), (0.2, 0.5)])

    def test_uniform_bounds(self):
        with pytest.raises(ValueError):
            UniformDistribution(1.0, 1.0)
        with pytest.raises(ValueError):
            UniformDistribution(-0.5, 1.0)


class TestPiecewiseLinear:
    # triangular density f(x) = x/2 on [0, 2]
    TRI = PiecewiseLinearDistribution([(0.0, 0.0), (2.0, 1.0)])

    def test_cdf(self):
        assert self.TRI.cdf_strict(1.0) == pytest.approx(0.25)
        assert self.TRI.cdf_strict(2.0) == 1.0

    def test_partial_expectation_vs_quadrature(self):
        xs = np.linspace(0, 2, 200001)
        for p in (0.0, 0.5, 1.3):
            mask = xs >= p
            quad = np.trapezoid(xs[mask] * xs[mask] / 2.0, xs[mask])
            assert self.TRI.partial_expectation(p) == pytest.approx(quad, abs=1e-6)

    def test_mean(self):
        assert self.TRI.mean() == pytest.approx(4.0 / 3.0)

    def test_mass_must_be_one(self):
        with pytest.raises(ValueError):
            PiecewiseLinearDistribution([(0.0, 0.0), (1.0, 1.0)])


class TestSampling:
    @pytest.mark.parametrize(
        "dist",
        [
            TWO_POINT,
            UniformDistribution(0.2, 1.7),
            PiecewiseLinearDistribution([(0.0, 0.0), (2.0, 1.0)]),
        ],
    )
    def test_sample_mean_matches(self, dist):
        rng = np.random.default_rng(1)
        draws = dist.sample(rng, 200_000)
        assert float(np.mean(draws)) == pytest.approx(dist.mean(), abs=5e-3)

    def test_discrete_sample_frequencies(self):
        rng = np.random.default_rng(2)
        draws = TWO_POINT.sample(rng, 100_000)
        assert np.mean(draws == 0.9) == pytest.approx(0.1, abs=5e-3)

    def test_tail_sampling_matches_cdf(self):
        dist = PiecewiseLinearDistribution([(0.0, 0.0), (2.0, 1.0)])
        rng = np.random.default_rng(3)
        draws = dist.sample(rng, 200_000)
        for q in (0.5, 1.0, 1.5):
            assert np.mean(draws < q) == pytest.approx(dist.cdf_strict(q), abs=5e-3)
