"""Partitioned offender populations and generic vs specific profile prevalence.

A :class:`PartitionModel` splits the offenders of one crime type into
contexts. Each context has a share of the offenders (its weight) and its own
profile prevalence. The generic prevalence is the weighted average; the
prevalence relevant to one particular crime is that of the crime's context,
and when that context is unknown all we can state is the range spanned by
the contexts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ModelError
from .probability import IntervalLR, LikelihoodRatio, PointLR, Probability, Undefined

UNKNOWN = "unknown"
DEFAULT_TOLERANCE = 0.01
WEIGHT_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ContextCell:
    label: str
    weight: float
    prevalence: float

    def __post_init__(self):
        object.__setattr__(self, "weight", float(Probability(self.weight)))
        object.__setattr__(self, "prevalence", float(Probability(self.prevalence)))


def partition_violations(cells: Sequence[ContextCell]) -> list[tuple[str, str]]:
    """All invariant violations of a cell list as ``(code, message)`` pairs."""
    problems = []
    if not cells:
        problems.append(("empty-partition", "a partition needs at least one context"))
        return problems
    seen = set()
    for c in cells:
        if c.label in seen:
            problems.append(("duplicate-label", f"context label {c.label!r} used twice"))
        seen.add(c.label)
        if c.label == UNKNOWN:
            problems.append(("reserved-label", f"{UNKNOWN!r} cannot name a context"))
    total = math.fsum(c.weight for c in cells)
    if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
        problems.append(("weights-sum", f"context weights sum to {total!r}, not 1"))
    return problems


@dataclass(frozen=True)
class PartitionModel:
    crime_type: str
    cells: tuple[ContextCell, ...]
    profile_base_rate: float

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "profile_base_rate", float(Probability(self.profile_base_rate)))
        problems = partition_violations(self.cells)
        if problems:
            code, msg = problems[0]
            raise ModelError(code, "; ".join(m for _, m in problems))

    @classmethod
    def from_lists(cls, crime_type, labels, weights, prevalences, profile_base_rate):
        cells = [ContextCell(l, w, p) for l, w, p in zip(labels, weights, prevalences, strict=True)]
        return cls(crime_type, tuple(cells), profile_base_rate)

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.cells]

    def cell(self, label: str) -> ContextCell:
        for c in self.cells:
            if c.label == label:
                return c
        raise ModelError("no-such-context", f"no context {label!r} in {self.labels}")

    def occupied(self) -> list[ContextCell]:
        """Cells with positive weight; only these can bound a specific prevalence."""
        return [c for c in self.cells if c.weight > 0]

    def restricted_to(self, labels: Iterable[str]) -> "PartitionModel":
        """Sub-model over ``labels`` with weights renormalised to sum to one.

        Use this when case evidence narrows the crime down to several
        contexts rather than a single one.
        """
        chosen = [self.cell(l) for l in dict.fromkeys(labels)]
        total = math.fsum(c.weight for c in chosen)
        if total <= 0:
            raise ModelError("weights-sum", "restricted contexts carry no weight")
        cells = tuple(ContextCell(c.label, c.weight / total, c.prevalence) for c in chosen)
        return PartitionModel(self.crime_type, cells, self.profile_base_rate)


@dataclass(frozen=True)
class HypothesisLevel:
    """Generic guilt (some crime of the type) or specific guilt (this crime).

    ``context`` is only meaningful for the specific level: a cell label, or
    :data:`UNKNOWN` when the crime's context has not been identified.
    """

    kind: str
    context: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("generic", "specific"):
            raise ModelError("bad-level", f"unknown hypothesis level {self.kind!r}")
        if self.kind == "generic" and self.context is not None:
            raise ModelError("bad-level", "generic level takes no context")
        if self.kind == "specific" and not self.context:
            object.__setattr__(self, "context", UNKNOWN)

    @classmethod
    def generic(cls) -> "HypothesisLevel":
        return cls("generic")

    @classmethod
    def specific(cls, context: str = UNKNOWN) -> "HypothesisLevel":
        return cls("specific", context)

    @classmethod
    def parse(cls, text: str) -> "HypothesisLevel":
        """Parse ``"generic"``, ``"specific"`` or ``"specific:<label>"``."""
        kind, _, ctx = text.partition(":")
        if kind == "generic" and not ctx:
            return cls.generic()
        if kind == "specific":
            return cls.specific(ctx or UNKNOWN)
        raise ModelError("bad-level", f"cannot parse hypothesis level {text!r}")

    @property
    def is_generic(self) -> bool:
        return self.kind == "generic"

    def __str__(self) -> str:
        return "generic" if self.is_generic else f"specific:{self.context}"


@dataclass(frozen=True)
class ConditionCheck:
    """Outcome of a uniformity/representativeness test.

    ``measure`` is the spread or gap that was compared against ``tol``.
    """

    holds: bool
    measure: float
    tol: float


def _bounds(m: PartitionModel) -> tuple[float, float]:
    prevs = [c.prevalence for c in m.occupied()]
    return min(prevs), max(prevs)


def generic_prevalence(m: PartitionModel) -> float:
    """Weighted mean of cell prevalences, ``sum_i P(P|G_g,S_i) P(S_i|G_g)``.

    Computed as an offset from the smallest occupied prevalence so that a
    uniform partition returns its common value exactly and the result never
    leaves the [min, max] range through rounding.
    """
    lo, hi = _bounds(m)
    total = math.fsum(c.weight for c in m.cells)
    excess = math.fsum(c.weight * (c.prevalence - lo) for c in m.cells) / total
    return min(lo + excess, hi)


def specific_prevalence(m: PartitionModel, k: str) -> float:
    return m.cell(k).prevalence


def _over_base(m: PartitionModel, value: float) -> float:
    return value / m.profile_base_rate


def generic_lr(m: PartitionModel) -> LikelihoodRatio:
    if m.profile_base_rate == 0:
        return Undefined("zero-base-rate")
    return PointLR(_over_base(m, generic_prevalence(m)))


def specific_lr(m: PartitionModel, level: HypothesisLevel) -> LikelihoodRatio:
    """Specific-level LR of the profile.

    A known context gives a point value. An unknown context gives the
    interval spanned by the occupied cells; it is deliberately not averaged.
    """
    if level.is_generic:
        raise ModelError("bad-level", "specific_lr needs a specific hypothesis level")
    if level.context != UNKNOWN:
        prev = specific_prevalence(m, level.context)
        if m.profile_base_rate == 0:
            return Undefined("zero-base-rate")
        return PointLR(_over_base(m, prev))
    if m.profile_base_rate == 0:
        return Undefined("zero-base-rate")
    lo, hi = _bounds(m)
    return IntervalLR(_over_base(m, lo), _over_base(m, hi))


def extreme_cells(m: PartitionModel) -> tuple[str, str]:
    """Labels of the occupied cells with min and max prevalence (first wins ties)."""
    occ = m.occupied()
    lo = min(occ, key=lambda c: c.prevalence)
    hi = max(occ, key=lambda c: c.prevalence)
    # max() keeps the first maximal element already; min() likewise
    return lo.label, hi.label


def uniformity_check(m: PartitionModel, tol: float = DEFAULT_TOLERANCE) -> ConditionCheck:
    if tol < 0:
        raise ModelError("negative-tolerance", f"tol must be >= 0, got {tol}")
    prevs = [c.prevalence for c in m.cells]
    spread = max(prevs) - min(prevs)
    return ConditionCheck(spread <= tol, spread, tol)


def invariance_gap(m: PartitionModel, k: str) -> float:
    """``|P(P|G_s) - P(P|G_g)|`` when the crime lies in context ``k``."""
    return abs(specific_prevalence(m, k) - generic_prevalence(m))


def representativeness_check(m: PartitionModel, k: str, tol: float = DEFAULT_TOLERANCE) -> ConditionCheck:
    if tol < 0:
        raise ModelError("negative-tolerance", f"tol must be >= 0, got {tol}")
    gap = invariance_gap(m, k)
    return ConditionCheck(gap <= tol, gap, tol)
