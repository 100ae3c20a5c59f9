"""Tests for tilt module."""

import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guesswork_budget.errors import (
    DimensionMismatchError,
    IllConditionedError,
    OutOfEntropyRangeError,
    OutOfRangeError,
    UniformBaseError,
)
from guesswork_budget.source_stats import (
    binary_source,
    make_source,
    shannon_entropy,
    uniform_source,
)
from guesswork_budget.tilt import (
    cross_entropy,
    derivative_checks,
    entropy_floor,
    family_entropy,
    family_scan,
    kl_divergence,
    rate_function,
    solve_alpha_for_entropy,
    tilt,
    tilted_cross_varentropy,
    tilted_renyi_entropy,
)

FIG1_SOURCE = (0.1, 0.2, 0.7)


@pytest.fixture
def fig1():
    return make_source(FIG1_SOURCE)


class TestTilt:
    """Test single tilts."""

    def test_identity(self, fig1):
        """Test order 1 returns the base with zero KL."""
        point = tilt(fig1, 1.0)
        assert np.allclose(point.dist.probs, fig1.probs, rtol=0, atol=1e-15)
        assert point.kl_to_base == pytest.approx(0.0, abs=1e-15)
        assert point.member == "base"

    def test_order_zero_uniform(self, fig1):
        """Test order 0 gives the uniform source."""
        point = tilt(fig1, 0.0)
        assert np.allclose(point.dist.probs, [1 / 3] * 3, rtol=0, atol=1e-15)
        assert point.entropy == pytest.approx(math.log(3), rel=1e-14)
        assert point.member == "high"

    def test_order_two(self, fig1):
        """Test the squared tilt (0.01, 0.04, 0.49) / 0.54."""
        point = tilt(fig1, 2.0)
        assert np.allclose(point.dist.probs, [0.01 / 0.54, 0.04 / 0.54, 0.49 / 0.54], rtol=1e-13)
        assert point.member == "low"

    def test_entropy_and_kl_populated(self, fig1):
        """Test the TiltPoint statistics match direct evaluation."""
        point = tilt(fig1, 0.5)
        assert point.entropy == pytest.approx(shannon_entropy(point.dist), rel=1e-12)
        assert point.kl_to_base == pytest.approx(kl_divergence(point.dist, fig1), rel=1e-10)

    def test_large_order_clamped(self, fig1, caplog):
        """Test a huge order stays a valid source and reports clamping."""
        with caplog.at_level(logging.WARNING, logger="guesswork_budget.tilt"):
            point = tilt(fig1, 1000.0)
        assert np.all(np.isfinite(point.dist.probs))
        assert point.dist.probs.min() > 0
        assert point.dist.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert "clamped" in caplog.text

    def test_negative_order(self, fig1):
        """Test negative orders are rejected."""
        with pytest.raises(OutOfRangeError):
            tilt(fig1, -1.0)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 3.0])
    def test_composition(self, fig1, alpha, beta):
        """Test tau(theta, alpha * beta) = tau(tau(theta, beta), alpha)."""
        direct = tilt(fig1, alpha * beta).dist.probs
        nested = tilt(tilt(fig1, beta).dist, alpha).dist.probs
        assert np.allclose(direct, nested, rtol=0, atol=1e-12)

    def test_high_low_split(self, fig1):
        """Test orders below 1 raise the entropy and orders above 1 lower it."""
        h = shannon_entropy(fig1)
        for alpha in (0.1, 0.5, 0.9):
            assert tilt(fig1, alpha).entropy > h
        for alpha in (1.1, 2.0, 5.0):
            assert tilt(fig1, alpha).entropy < h


class TestKlDivergence:
    """Test KL divergence and cross-entropy."""

    def test_self_zero(self, fig1):
        """Test D(p || p) = 0."""
        assert kl_divergence(fig1, fig1) == pytest.approx(0.0, abs=1e-15)

    def test_uniform_against_skewed(self):
        """Test D(u2 || (0.25, 0.75))."""
        expected = 0.5 * math.log(0.5 / 0.25) + 0.5 * math.log(0.5 / 0.75)
        assert kl_divergence(uniform_source(2), make_source([0.25, 0.75])) == pytest.approx(expected)
        assert expected == pytest.approx(0.143841, abs=1e-6)

    def test_skewed_against_uniform(self):
        """Test D(p || u) = log 2 - H(p)."""
        p = make_source([0.25, 0.75])
        value = kl_divergence(p, uniform_source(2))
        assert value == pytest.approx(math.log(2) - shannon_entropy(p), rel=1e-12)
        assert value == pytest.approx(0.130812, abs=1e-6)

    def test_dimension_mismatch(self, fig1):
        """Test different alphabets are rejected."""
        with pytest.raises(DimensionMismatchError):
            kl_divergence(fig1, uniform_source(2))
        with pytest.raises(DimensionMismatchError):
            cross_entropy(fig1, uniform_source(2))

    def test_cross_entropy_decomposes(self, fig1):
        """Test H(p || q) = H(p) + D(p || q)."""
        q = make_source([0.3, 0.3, 0.4])
        assert cross_entropy(fig1, q) == pytest.approx(
            shannon_entropy(fig1) + kl_divergence(fig1, q), rel=1e-12
        )


class TestFamilyEntropy:
    """Test the entropy of family members and its inversion."""

    def test_endpoints(self, fig1):
        """Test order 0 gives log |X| and order 1 gives H."""
        assert family_entropy(fig1, 0.0) == pytest.approx(math.log(3), rel=1e-14)
        assert family_entropy(fig1, 1.0) == pytest.approx(shannon_entropy(fig1), rel=1e-12)

    def test_unique_maximum_limit(self, fig1):
        """Test order 10 is already close to the floor log 1 = 0."""
        assert family_entropy(fig1, 10.0) < 1e-3
        assert entropy_floor(fig1) == 0.0

    def test_floor_with_ties(self):
        """Test two maximal entries give the floor log 2."""
        assert entropy_floor(make_source([0.45, 0.45, 0.1])) == pytest.approx(math.log(2))

    def test_uniform_base(self):
        """Test the uniform base is rejected."""
        with pytest.raises(UniformBaseError):
            family_entropy(uniform_source(3), 2.0)

    def test_strictly_decreasing(self, fig1):
        """Test entropy decreases along a grid of orders."""
        values = [family_entropy(fig1, a) for a in np.linspace(0, 8, 81)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_solve_identity(self, fig1):
        """Test g = H(base) inverts to order 1."""
        alpha = solve_alpha_for_entropy(fig1, shannon_entropy(fig1))
        assert alpha == pytest.approx(1.0, abs=1e-8)

    def test_solve_near_uniform_end(self):
        """Test g just below log 2 inverts to an order near 0."""
        alpha = solve_alpha_for_entropy(make_source([0.3, 0.7]), math.log(2) - 1e-9)
        assert 0.0 <= alpha < 1e-3

    def test_solve_round_trip(self):
        """Test family_entropy(solve(g)) = g over the attainable range."""
        base = make_source([0.3, 0.7])
        for g in np.linspace(0.01, math.log(2) - 0.01, 40):
            alpha = solve_alpha_for_entropy(base, float(g))
            assert family_entropy(base, alpha) == pytest.approx(g, abs=1e-9)

    def test_solve_round_trip_ties(self):
        """Test inversion above the log 2 floor of a tied maximum."""
        base = make_source([0.4, 0.4, 0.2])
        for g in (0.7, 0.8, 1.0):
            alpha = solve_alpha_for_entropy(base, g)
            assert family_entropy(base, alpha) == pytest.approx(g, abs=1e-9)

    def test_solve_out_of_range(self, fig1):
        """Test unattainable targets."""
        for g in (0.0, -0.1, math.log(3), 2.0):
            with pytest.raises(OutOfEntropyRangeError):
                solve_alpha_for_entropy(fig1, g)
        with pytest.raises(OutOfEntropyRangeError):
            solve_alpha_for_entropy(make_source([0.45, 0.45, 0.1]), 0.5)

    def test_solve_uniform_base(self):
        """Test inversion of the uniform family is rejected."""
        with pytest.raises(UniformBaseError):
            solve_alpha_for_entropy(uniform_source(2), 0.5)


class TestRateFunction:
    """Test the guesswork rate function."""

    def test_zero_at_entropy(self, fig1):
        """Test the rate vanishes at g = H."""
        assert rate_function(fig1, shannon_entropy(fig1)) <= 1e-9

    def test_positive_elsewhere(self):
        """Test the rate is positive away from H."""
        base = make_source([0.3, 0.7])
        assert rate_function(base, 0.4) > 0
        assert rate_function(base, 0.68) > 0

    def test_uniform_closed_form(self):
        """Test the uniform rate is log |X| - g."""
        for k in (2, 3, 5):
            for g in np.linspace(0.01, math.log(k) - 0.01, 11):
                value = rate_function(uniform_source(k), float(g))
                assert abs(value - (math.log(k) - g)) <= 1e-12

    def test_uniform_out_of_range(self):
        """Test budgets above log |X| are rejected for the uniform source."""
        with pytest.raises(OutOfEntropyRangeError):
            rate_function(uniform_source(2), 1.0)

    def test_convex(self, fig1):
        """Test midpoint convexity on an equally spaced grid."""
        gs = np.linspace(0.05, math.log(3) - 0.05, 41)
        rates = [rate_function(fig1, float(g)) for g in gs]
        for lo, mid, hi in zip(rates, rates[1:], rates[2:]):
            assert mid <= 0.5 * (lo + hi) + 1e-9

    def test_matches_tilt_kl(self, fig1):
        """Test the rate equals the KL of the solved tilt."""
        g = 0.4
        alpha = solve_alpha_for_entropy(fig1, g)
        assert rate_function(fig1, g) == pytest.approx(tilt(fig1, alpha).kl_to_base, rel=1e-9)


class TestFamilyScan:
    """Test family scans."""

    def test_single_point(self, fig1):
        """Test a scan at order 1 returns the base."""
        (point,) = family_scan(fig1, [1.0], threads=1)
        assert np.allclose(point.dist.probs, fig1.probs, rtol=0, atol=1e-15)

    def test_endpoints(self, fig1):
        """Test orders 0 and 1 give uniform and base."""
        points = family_scan(fig1, [0.0, 1.0], threads=1)
        assert [p.alpha for p in points] == [0.0, 1.0]
        assert points[0].entropy == pytest.approx(math.log(3))

    def test_geometric_grid_decreasing(self, fig1):
        """Test entropy decreases along a geometric grid from 0.1 to 10."""
        points = family_scan(fig1, np.geomspace(0.1, 10, 25), threads=4)
        entropies = [p.entropy for p in points]
        assert all(b < a for a, b in zip(entropies, entropies[1:]))

    def test_thread_count_irrelevant(self, fig1):
        """Test scans are identical for one and several threads."""
        alphas = np.linspace(0, 5, 30)
        single = family_scan(fig1, alphas, threads=1)
        multi = family_scan(fig1, alphas, threads=3)
        assert [p.entropy for p in single] == [p.entropy for p in multi]


class TestTiltedHelpers:
    """Test the tilted Renyi entropy and cross-varentropy helpers."""

    def test_renyi_beta_one(self, fig1):
        """Test beta = 1 gives the member entropy."""
        assert tilted_renyi_entropy(fig1, 2.0, 1.0) == pytest.approx(family_entropy(fig1, 2.0))

    def test_renyi_half_of_base(self):
        """Test H_1/2 at alpha = 1 matches the direct formula."""
        expected = 2 * math.log(math.sqrt(0.1) + math.sqrt(0.9))
        value = tilted_renyi_entropy(make_source([0.1, 0.9]), 1.0, 0.5)
        assert value == pytest.approx(expected, rel=1e-12)

    def test_cross_varentropy_at_one(self):
        """Test V(theta || theta) is the varentropy."""
        src = binary_source(0.1)
        assert tilted_cross_varentropy(src, 1.0) == pytest.approx(0.09 * math.log(9) ** 2, rel=1e-12)


class TestDerivativeChecks:
    """Test finite-difference identities of the tilted family."""

    @pytest.mark.parametrize(
        "probs", [(0.3, 0.7), FIG1_SOURCE, (0.33, 0.33, 0.34), (0.05, 0.15, 0.3, 0.5)]
    )
    def test_examples_pass(self, probs):
        """Test all five identities hold on reference sources."""
        report = derivative_checks(make_source(probs))
        assert len(report.checks) == 5
        assert report.passed, report.residuals()

    def test_near_uniform_small(self):
        """Test residuals near the uniform point are tiny in absolute terms."""
        report = derivative_checks(make_source([0.33, 0.33, 0.34]))
        assert max(report.residuals().values()) <= 1e-6

    def test_ill_conditioned(self):
        """Test sources with entries below 1e-6 are rejected."""
        with pytest.raises(IllConditionedError):
            derivative_checks(make_source([1e-7, 0.5, 0.5 - 1e-7]))

    def test_check_names(self, fig1):
        """Test the report names every identity."""
        names = set(derivative_checks(fig1).residuals())
        assert names == {
            "entropy_alpha",
            "renyi_beta",
            "renyi_alpha_beta",
            "cross_varentropy_alpha",
            "entropy_product",
        }

    @settings(deadline=None, max_examples=50)
    @given(
        st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=2, max_size=6).filter(
            lambda w: max(w) - min(w) > 0.05
        )
    )
    def test_random_sources(self, weights):
        """Test the identities on random well-conditioned sources."""
        assert derivative_checks(make_source(weights)).passed
