"""Scenarios: priors at two hypothesis levels plus tagged evidence items.

Each evidence item targets either the generic hypothesis (the defendant
committed some crime of this type) or the specific one (they committed this
crime). Items are combined per level by multiplying likelihood ratios.

Profiling items never move the specific level unless the scenario sets
``allow_profiling_on_specific``. With the override, the specific-level LR of
a profiling item comes from the partition model (the crime's context, or the
unknown-context interval); without a partition it falls back to the item's own
LR, which reproduces the naive calculation that treats generic and specific
prevalence as interchangeable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

from . import nesting
from .errors import ModelError
from .nesting import UNKNOWN, HypothesisLevel, PartitionModel
from .probability import (
    IntervalLR,
    LikelihoodRatio,
    Odds,
    PointLR,
    Posterior,
    Undefined,
    bayes_update,
    combine_lrs,
    to_probability,
)

PROFILING = "profiling"
CASE_SPECIFIC = "case_specific"
KINDS = (PROFILING, CASE_SPECIFIC)


@dataclass(frozen=True)
class EvidenceItem:
    label: str
    target: HypothesisLevel
    lr: LikelihoodRatio
    kind: str = CASE_SPECIFIC

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError("bad-kind", f"evidence kind must be one of {KINDS}, got {self.kind!r}")
        if not isinstance(self.lr, (PointLR, IntervalLR, Undefined)):
            raise ModelError("bad-lr", f"{self.label}: not a likelihood ratio: {self.lr!r}")

    @property
    def is_profiling(self) -> bool:
        return self.kind == PROFILING


def scenario_violations(
    evidence, partition: Optional[PartitionModel], allow_profiling_on_specific: bool,
    independence_assumed: bool, crime_context: str = UNKNOWN,
) -> list[tuple[str, str, str]]:
    """Every scenario-level invariant violation as ``(code, where, message)``."""
    problems = []
    if independence_assumed is not True:
        problems.append(("independence-required", "independence_assumed",
                         "evidence is combined multiplicatively; independence must be asserted"))
    labels = set(partition.labels) if partition is not None else set()

    def check_context(ctx, where):
        if ctx == UNKNOWN:
            return
        if partition is None:
            problems.append(("partition-required", where, f"context {ctx!r} needs a partition"))
        elif ctx not in labels:
            problems.append(("no-such-context", where, f"no context {ctx!r} in {sorted(labels)}"))

    check_context(crime_context, "crime_context")
    seen = set()
    for i, item in enumerate(evidence):
        where = f"evidence[{i}]"
        if item.label in seen:
            problems.append(("duplicate-item-label", where, f"evidence label {item.label!r} repeated"))
        seen.add(item.label)
        if item.is_profiling and not item.target.is_generic and not allow_profiling_on_specific:
            problems.append(("profiling-level", where,
                             f"profiling item {item.label!r} targets {item.target} without the override"))
        if not item.target.is_generic:
            check_context(item.target.context, where + ".target")
    return problems


@dataclass(frozen=True)
class Scenario:
    crime_type: str
    prior_generic: float
    prior_specific: float
    evidence: tuple[EvidenceItem, ...] = ()
    partition: Optional[PartitionModel] = None
    allow_profiling_on_specific: bool = False
    independence_assumed: bool = True
    crime_context: str = UNKNOWN

    def __post_init__(self):
        object.__setattr__(self, "prior_generic", Odds(self.prior_generic))
        object.__setattr__(self, "prior_specific", Odds(self.prior_specific))
        object.__setattr__(self, "evidence", tuple(self.evidence))
        problems = scenario_violations(self.evidence, self.partition, self.allow_profiling_on_specific,
                                       self.independence_assumed, self.crime_context)
        if problems:
            raise ModelError(problems[0][0], "; ".join(f"{w}: {m}" for _, w, m in problems))

    @property
    def has_profiling(self) -> bool:
        return any(e.is_profiling for e in self.evidence)


@dataclass(frozen=True)
class ReportWarning:
    code: str
    item: Optional[str] = None
    detail: str = ""


@dataclass(frozen=True)
class Contribution:
    """What one evidence item did at each level (``None``: level untouched)."""

    label: str
    kind: str
    target: HypothesisLevel
    generic_lr: Optional[LikelihoodRatio]
    specific_lr: Optional[LikelihoodRatio]


@dataclass(frozen=True)
class EvaluationReport:
    posterior_generic: Posterior
    posterior_specific: Posterior
    combined_generic_lr: LikelihoodRatio
    combined_specific_lr: LikelihoodRatio
    contributions: tuple[Contribution, ...] = ()
    warnings: tuple[ReportWarning, ...] = ()

    def codes(self) -> list[str]:
        return [w.code for w in self.warnings]


def _kind_warning(lr, item_label, prefix="") -> Optional[ReportWarning]:
    if isinstance(lr, IntervalLR):
        return ReportWarning(prefix + "interval-lr", item_label, f"[{lr.lo!r}, {lr.hi!r}]")
    if isinstance(lr, Undefined):
        return ReportWarning(prefix + "undefined-lr", item_label, lr.reason)
    return None


def _profiling_specific_lr(s: Scenario, item: EvidenceItem, context: str):
    if s.partition is None:
        return item.lr, [ReportWarning("invariance-assumed", item.label,
                                       "no partition: generic LR reused at the specific level")]
    lr = nesting.specific_lr(s.partition, HypothesisLevel.specific(context))
    w = _kind_warning(lr, item.label, prefix="derived-")
    return lr, [w] if w else []


def evaluate(s: Scenario) -> EvaluationReport:
    generic, specific = [], []
    contributions, warnings = [], []
    for item in s.evidence:
        w = _kind_warning(item.lr, item.label)
        if w:
            warnings.append(w)
        g_lr = s_lr = None
        if item.target.is_generic:
            g_lr = item.lr
            if item.is_profiling:
                if s.allow_profiling_on_specific:
                    s_lr, extra = _profiling_specific_lr(s, item, s.crime_context)
                    warnings.extend(extra)
                else:
                    s_lr = PointLR(1.0)
                    warnings.append(ReportWarning("profiling-non-probative-specific", item.label))
        elif item.is_profiling:
            s_lr, extra = _profiling_specific_lr(s, item, item.target.context)
            warnings.extend(extra)
        else:
            s_lr = item.lr
        if g_lr is not None:
            generic.append(g_lr)
        if s_lr is not None:
            specific.append(s_lr)
        contributions.append(Contribution(item.label, item.kind, item.target, g_lr, s_lr))

    link = combine_levels_diagnostic(s)
    if link is not None:
        warnings.append(link)
    pg, ps = s.prior_generic, s.prior_specific
    if ps > pg and not math.isinf(pg):
        warnings.append(ReportWarning("prior-specific-exceeds-generic", None,
                                      f"specific guilt entails generic guilt, but {ps!r} > {pg!r}"))
    g_comb, s_comb = combine_lrs(generic), combine_lrs(specific)
    return EvaluationReport(
        posterior_generic=bayes_update(pg, g_comb),
        posterior_specific=bayes_update(ps, s_comb),
        combined_generic_lr=g_comb,
        combined_specific_lr=s_comb,
        contributions=tuple(contributions),
        warnings=tuple(warnings),
    )


def combine_levels_diagnostic(s: Scenario) -> Optional[ReportWarning]:
    """Flag generic certainty sitting next to specific-level evidence.

    Certainty that the defendant committed *some* crime of the type does not,
    in this model, raise the probability that they committed *this* one, and
    no rule for linking the two levels is assumed.
    """
    certain = [e.label for e in s.evidence
               if e.target.is_generic and isinstance(e.lr, PointLR) and math.isinf(e.lr.value)]
    has_specific = any(not e.target.is_generic for e in s.evidence)
    if certain and has_specific:
        return ReportWarning("generic-specific-not-linked", certain[0],
                       "generic certainty does not propagate to the specific hypothesis")
    return None


class TruthTracking(str, enum.Enum):
    TRACKING = "tracking"
    NON_TRACKING = "non_tracking"
    INDETERMINATE = "indeterminate"


def truth_tracking_status(lr: LikelihoodRatio) -> TruthTracking:
    """Minimal truth tracking: the evidence tracks the hypothesis iff LR > 1."""
    if isinstance(lr, Undefined):
        return TruthTracking.INDETERMINATE
    if isinstance(lr, PointLR):
        return TruthTracking.TRACKING if lr.value > 1 else TruthTracking.NON_TRACKING
    if lr.lo > 1:
        return TruthTracking.TRACKING
    if lr.hi <= 1:
        return TruthTracking.NON_TRACKING
    return TruthTracking.INDETERMINATE


ProbabilityView = Union[float, tuple[float, float], Undefined]


def stereotype_gap(s: Scenario) -> tuple[ProbabilityView, ProbabilityView]:
    """Posterior probability of generic and of specific guilt, side by side."""
    if not s.has_profiling:
        raise ModelError("no-profiling-evidence", "stereotype_gap needs at least one profiling item")
    rep = evaluate(s)
    return to_probability(rep.posterior_generic), to_probability(rep.posterior_specific)
