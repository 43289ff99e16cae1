"""Probabilities, odds, likelihood ratios and odds-form Bayesian updating.

All values are plain IEEE doubles. Nothing here rounds for display; that is
left to :mod:`evidentia.report`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Union

from .errors import ModelError

#: Values this far outside [0, 1] are clamped; anything further is rejected.
CLAMP_TOLERANCE = 1e-9


class Probability(float):
    """A float constrained to [0, 1]."""

    def __new__(cls, value: float) -> "Probability":
        v = float(value)
        if math.isnan(v):
            raise ModelError("not-a-probability", "probability is NaN")
        if v < 0.0:
            if v < -CLAMP_TOLERANCE:
                raise ModelError("not-a-probability", f"{value!r} < 0")
            v = 0.0
        elif v > 1.0:
            if v > 1.0 + CLAMP_TOLERANCE:
                raise ModelError("not-a-probability", f"{value!r} > 1")
            v = 1.0
        return super().__new__(cls, v)

    def __repr__(self) -> str:
        return f"Probability({float(self)!r})"


class Odds(float):
    """For-to-against odds in [0, inf]; ``inf`` represents certainty."""

    def __new__(cls, value: float) -> "Odds":
        v = float(value)
        if math.isnan(v) or v < 0.0:
            raise ModelError("negative-odds", f"odds must be >= 0, got {value!r}")
        return super().__new__(cls, v)

    @classmethod
    def from_ratio(cls, for_: float, against: float) -> "Odds":
        if for_ < 0 or against < 0 or (for_ == 0 and against == 0):
            raise ModelError("negative-odds", f"bad odds {for_}:{against}")
        if against == 0:
            return cls(math.inf)
        return cls(for_ / against)

    @property
    def is_certain(self) -> bool:
        return math.isinf(self)

    def __repr__(self) -> str:
        return f"Odds({float(self)!r})"


@dataclass(frozen=True)
class Undefined:
    """A quantity that cannot be assessed; ``reason`` is a reason code."""

    reason: str

    def __post_init__(self):
        if not self.reason:
            raise ModelError("empty-reason", "undefined values need a reason code")


@dataclass(frozen=True)
class PointLR:
    value: float

    def __post_init__(self):
        if math.isnan(self.value) or self.value < 0:
            raise ModelError("negative-lr", f"likelihood ratio must be >= 0, got {self.value!r}")


@dataclass(frozen=True)
class IntervalLR:
    """Range of possible likelihood ratios; never collapsed to a midpoint."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or not 0 <= self.lo <= self.hi:
            raise ModelError("bad-interval", f"need 0 <= lo <= hi, got [{self.lo}, {self.hi}]")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class OddsInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or not 0 <= self.lo <= self.hi:
            raise ModelError("bad-interval", f"need 0 <= lo <= hi, got [{self.lo}, {self.hi}]")


LikelihoodRatio = Union[PointLR, IntervalLR, Undefined]
Posterior = Union[Odds, OddsInterval, Undefined]


def odds_from_probability(p: float) -> Odds:
    p = Probability(p)
    if p == 1.0:
        return Odds(math.inf)
    return Odds(p / (1.0 - p))


def probability_from_odds(o: float) -> Probability:
    o = Odds(o)
    if math.isinf(o):
        return Probability(1.0)
    return Probability(o / (1.0 + o))


def likelihood_ratio(num: float, den: float) -> LikelihoodRatio:
    """``P(E|H) / P(E|not H)`` as a point LR, or :class:`Undefined` when ``den`` is 0."""
    num, den = Probability(num), Probability(den)
    if den == 0.0:
        return Undefined("vacuous" if num == 0.0 else "zero-denominator")
    return PointLR(num / den)


def _mul(a: float, b: float) -> float:
    if (a == 0 and math.isinf(b)) or (b == 0 and math.isinf(a)):
        raise ZeroDivisionError
    return a * b


def bayes_update(prior: float, lr: LikelihoodRatio) -> Posterior:
    """Posterior odds = prior odds x likelihood ratio.

    Interval LRs give an interval posterior (endpoint products). An undefined
    LR gives an undefined posterior with the same reason. ``0 x inf`` has no
    meaningful value and is reported as ``Undefined("zero-times-infinity")``.
    """
    prior = Odds(prior)
    try:
        if isinstance(lr, Undefined):
            return lr
        if isinstance(lr, PointLR):
            return Odds(_mul(prior, lr.value))
        if isinstance(lr, IntervalLR):
            return OddsInterval(_mul(prior, lr.lo), _mul(prior, lr.hi))
    except ZeroDivisionError:
        return Undefined("zero-times-infinity")
    raise TypeError(f"not a likelihood ratio: {lr!r}")


def combine_lrs(lrs: Iterable[LikelihoodRatio]) -> LikelihoodRatio:
    """Product of independent likelihood ratios.

    Factors are multiplied in sorted order so the result does not depend on
    the order of ``lrs``. Any undefined factor makes the product undefined
    (the first reason in sorted order wins).
    """
    lrs = list(lrs)
    undefined = sorted(lr.reason for lr in lrs if isinstance(lr, Undefined))
    if undefined:
        return Undefined(undefined[0])
    los = sorted(lr.value if isinstance(lr, PointLR) else lr.lo for lr in lrs)
    his = sorted(lr.value if isinstance(lr, PointLR) else lr.hi for lr in lrs)
    try:
        lo, hi = 1.0, 1.0
        for x in los:
            lo = _mul(lo, x)
        for x in his:
            hi = _mul(hi, x)
    except ZeroDivisionError:
        return Undefined("zero-times-infinity")
    if any(isinstance(lr, IntervalLR) for lr in lrs):
        return IntervalLR(lo, hi)
    return PointLR(lo)


def to_probability(posterior: Posterior) -> Union[float, tuple[float, float], Undefined]:
    """Convert a posterior to probability; intervals map endpoint-wise."""
    if isinstance(posterior, Undefined):
        return posterior
    if isinstance(posterior, OddsInterval):
        return (float(probability_from_odds(posterior.lo)), float(probability_from_odds(posterior.hi)))
    return float(probability_from_odds(posterior))


def innocent_profile_rate(
    p_profile: float,
    p_profile_given_guilt: float,
    p_guilt: float,
    mode: Literal["exact", "approximate"] = "exact",
) -> Probability:
    """Profile rate among the innocent, ``P(P | not G)``.

    ``exact`` solves the total-probability identity
    ``P(P) = P(P|G) P(G) + P(P|not G) (1 - P(G))`` for ``P(P|not G)``;
    ``approximate`` returns ``P(P)``, which is adequate when ``P(G)`` is small.
    The gap between the two is ``P(G) |P(P|G) - P(P)| / (1 - P(G))``.
    """
    p_profile = Probability(p_profile)
    p_profile_given_guilt = Probability(p_profile_given_guilt)
    p_guilt = Probability(p_guilt)
    if mode == "approximate":
        return p_profile
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if p_guilt == 1.0:
        raise ModelError("degenerate-conditioning", "P(G) = 1 leaves nobody innocent")
    numerator = p_profile - p_profile_given_guilt * p_guilt
    if numerator < -CLAMP_TOLERANCE:
        raise ModelError(
            "incoherent-inputs",
            f"P(P)={p_profile} < P(P|G)P(G)={p_profile_given_guilt * p_guilt}",
        )
    rate = max(numerator, 0.0) / (1.0 - p_guilt)
    if rate > 1.0 + CLAMP_TOLERANCE:
        raise ModelError("incoherent-inputs", f"implied P(P|not G)={rate} exceeds 1")
    return Probability(rate)


def approximation_bound(p_profile: float, p_profile_given_guilt: float, p_guilt: float) -> float:
    """Upper bound on ``|exact - approximate|`` for :func:`innocent_profile_rate`."""
    return p_guilt * abs(p_profile_given_guilt - p_profile) / (1.0 - p_guilt)
