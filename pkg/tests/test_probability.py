import math
import sys
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from evidentia.errors import ModelError
from evidentia.probability import (
    IntervalLR,
    Odds,
    OddsInterval,
    PointLR,
    Probability,
    Undefined,
    approximation_bound,
    bayes_update,
    combine_lrs,
    innocent_profile_rate,
    likelihood_ratio,
    odds_from_probability,
    probability_from_odds,
    to_probability,
)

probs = st.floats(0, 1, allow_nan=False)
open_probs = st.floats(0, 1, exclude_max=True, allow_nan=False)
lrs = st.floats(0, 1e6, allow_nan=False)


class TestProbability:
    def test_clamps_tiny_overshoot(self):
        assert Probability(1 + 5e-10) == 1.0
        assert Probability(-5e-10) == 0.0

    @pytest.mark.parametrize("bad", [1.01, -0.1, 1 + 2e-9, float("nan")])
    def test_rejects(self, bad):
        with pytest.raises(ModelError):
            Probability(bad)

    def test_odds_reject_negative(self):
        with pytest.raises(ModelError):
            Odds(-1)

    def test_odds_from_ratio(self):
        assert Odds.from_ratio(1, 1000) == 0.001
        assert math.isinf(Odds.from_ratio(1, 0))


@pytest.mark.parametrize("p, expected", [(0.5, 1.0), (0.9375, 15.0), (0.0, 0.0)])
def test_odds_from_probability(p, expected):
    assert odds_from_probability(p) == expected


def test_certainty_is_infinite_odds():
    assert math.isinf(odds_from_probability(1.0))
    assert probability_from_odds(math.inf) == 1.0


@pytest.mark.parametrize("o, expected", [(15, 0.9375), (80, 80 / 81), (1, 0.5)])
def test_probability_from_odds(o, expected):
    assert probability_from_odds(o) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("prior, lr, expected", [(1, 15, 15), (1, 80, 80), (2, 1, 2)])
def test_bayes_update_point(prior, lr, expected):
    assert bayes_update(prior, PointLR(lr)) == expected


def test_bayes_update_interval_and_undefined():
    post = bayes_update(2, IntervalLR(40, 95))
    assert post == OddsInterval(80, 190)
    assert bayes_update(1, Undefined("zero-base-rate")) == Undefined("zero-base-rate")
    assert bayes_update(math.inf, PointLR(0)) == Undefined("zero-times-infinity")


class TestLikelihoodRatio:
    def test_burglary(self):
        assert likelihood_ratio(0.80, 0.01) == PointLR(80.0)

    def test_vue(self):
        assert likelihood_ratio(0.95, 0.06).value == pytest.approx(95 / 6, abs=1e-12)

    def test_non_probative(self):
        assert likelihood_ratio(0.3, 0.3) == PointLR(1.0)

    def test_zero_denominator(self):
        assert likelihood_ratio(0.5, 0) == Undefined("zero-denominator")
        assert likelihood_ratio(0, 0) == Undefined("vacuous")

    def test_kind_invariants(self):
        with pytest.raises(ModelError):
            PointLR(-1)
        with pytest.raises(ModelError):
            IntervalLR(2, 1)
        with pytest.raises(ModelError):
            Undefined("")
        assert IntervalLR(3, 3).is_point


class TestInnocentProfileRate:
    def test_exact_matches_fraction_oracle(self):
        # total probability solved by hand in exact rationals
        pp, a, g = Fraction("0.01"), Fraction("0.8"), Fraction("0.001")
        oracle = (pp - a * g) / (1 - g)
        assert float(oracle) == pytest.approx(0.0092092092, abs=1e-10)
        assert innocent_profile_rate(0.01, 0.8, 0.001, "exact") == pytest.approx(float(oracle), abs=1e-15)

    def test_approximate(self):
        assert innocent_profile_rate(0.01, 0.8, 0.001, "approximate") == 0.01

    def test_independent_profile(self):
        assert innocent_profile_rate(0.06, 0.06, 0.5, "exact") == pytest.approx(0.06, abs=1e-15)

    def test_degenerate(self):
        with pytest.raises(ModelError) as e:
            innocent_profile_rate(0.5, 0.5, 1.0)
        assert e.value.code == "degenerate-conditioning"

    def test_incoherent(self):
        with pytest.raises(ModelError) as e:
            innocent_profile_rate(0.01, 0.9, 0.5)
        assert e.value.code == "incoherent-inputs"


@given(open_probs)
def test_roundtrip(p):
    assert probability_from_odds(odds_from_probability(p)) == pytest.approx(p, abs=1e-12)


@given(open_probs, lrs)
def test_bayes_consistency(p, lr):
    post = probability_from_odds(bayes_update(odds_from_probability(p), PointLR(lr)))
    denom = p * lr + (1 - p)
    assume(denom > 0)
    assert post == pytest.approx(p * lr / denom, abs=1e-12)


@given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6), st.floats(1.0001, 10))
def test_monotone_in_lr_and_prior(prior, lr, factor):
    assert bayes_update(prior, PointLR(lr * factor)) > bayes_update(prior, PointLR(lr))
    assert bayes_update(prior * factor, PointLR(lr)) > bayes_update(prior, PointLR(lr))


@given(st.floats(1e-9, 1))
def test_lr_of_identical_likelihoods_is_one(x):
    assert likelihood_ratio(x, x) == PointLR(1.0)


@given(probs, probs, st.floats(0, 0.999))
def test_approximation_bound(pp, a, g):
    assume(pp - a * g >= 0 and (pp - a * g) / (1 - g) <= 1)
    exact = innocent_profile_rate(pp, a, g, "exact")
    approx = innocent_profile_rate(pp, a, g, "approximate")
    bound = approximation_bound(pp, a, g)
    # rounding in (P - a g) / (1 - g) grows like eps / (1 - g)
    slack = 8 * sys.float_info.epsilon / (1 - g)
    assert abs(exact - approx) <= bound + slack


@given(st.lists(st.one_of(lrs.map(PointLR),
                          st.tuples(lrs, lrs).map(lambda t: IntervalLR(min(t), max(t)))), max_size=6),
       st.randoms())
def test_combine_order_independent(items, rnd):
    shuffled = list(items)
    rnd.shuffle(shuffled)
    assert combine_lrs(items) == combine_lrs(shuffled)


def test_combine_kinds():
    assert combine_lrs([]) == PointLR(1.0)
    assert combine_lrs([PointLR(2), IntervalLR(1, 3)]) == IntervalLR(2, 6)
    assert combine_lrs([PointLR(2), Undefined("x")]) == Undefined("x")
    assert combine_lrs([PointLR(math.inf), PointLR(0)]) == Undefined("zero-times-infinity")


def test_to_probability():
    assert to_probability(Odds(15)) == 0.9375
    assert to_probability(OddsInterval(1, 3)) == (0.5, 0.75)
    assert to_probability(Undefined("r")) == Undefined("r")
