"""Seeded Monte Carlo population oracle.

Generative model, per individual:

* offender with probability ``crime_rate``;
* an offender falls in context ``S_i`` with probability ``weight_i`` and then
  has the profile with probability ``prevalence_i``;
* a non-offender has the profile with the non-offender rate, solved by default
  so the population reproduces ``partition.profile_base_rate``.

Individuals are i.i.d., so a replication is drawn through the sufficient
counts (binomial / multinomial) rather than one Bernoulli per person; the
joint law of the count table is the same. One offender per replication
(within ``designated_context``, or among all offenders when it is
``"unknown"``) is drawn uniformly to play the perpetrator of the specific
crime.

RNG: numpy ``PCG64`` bit generators. The master seed feeds a
``numpy.random.SeedSequence`` that is split into one child per replication,
so replications are independent and a given seed is reproducible
bit-for-bit on the same numpy version.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import nesting
from .errors import InsufficientSamples, ModelError, SimulationError
from .nesting import UNKNOWN, PartitionModel
from .probability import PointLR, Probability, innocent_profile_rate

SE_MULTIPLIER = 3.0
CHECK_SLACK = 1e-12


@dataclass(frozen=True)
class SimulationConfig:
    population_size: int
    crime_rate: float
    partition: PartitionModel
    seed: int
    replications: int = 1
    designated_context: str = UNKNOWN
    non_offender_rate: Optional[float] = None

    def __post_init__(self):
        if int(self.population_size) != self.population_size or self.population_size < 1:
            raise ModelError("bad-population-size", "population_size must be a positive integer")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ModelError("bad-replications", "replications must be a positive integer")
        if not 0.0 < self.crime_rate < 1.0:
            raise ModelError("bad-crime-rate", f"crime_rate must lie in (0, 1), got {self.crime_rate}")
        if not 0 <= self.seed < 2**64:
            raise ModelError("bad-seed", "seed must be an unsigned 64-bit integer")
        if self.designated_context != UNKNOWN:
            self.partition.cell(self.designated_context)
        if self.non_offender_rate is not None:
            Probability(self.non_offender_rate)

    def resolved_non_offender_rate(self) -> float:
        """Profile rate among non-offenders used by the generator."""
        if self.non_offender_rate is not None:
            return float(self.non_offender_rate)
        m = self.partition
        try:
            return float(innocent_profile_rate(m.profile_base_rate, nesting.generic_prevalence(m),
                                               self.crime_rate, "exact"))
        except ModelError as exc:
            raise SimulationError("infeasible-base-rate",
                                  f"no non-offender profile rate reproduces P(P)={m.profile_base_rate}: "
                                  f"{exc.message}") from exc

    def implied_base_rate(self) -> float:
        """Population-wide profile rate under this configuration."""
        if self.non_offender_rate is None:
            return self.partition.profile_base_rate
        r = self.crime_rate
        return r * nesting.generic_prevalence(self.partition) + (1 - r) * self.non_offender_rate


@dataclass(frozen=True)
class Perpetrator:
    context: str
    profile: bool


@dataclass(frozen=True)
class SampleStats:
    """Pooled counts over all replications.

    ``counts`` maps ``(offender, context, profile)`` to a count; ``context`` is
    ``None`` for non-offenders. ``perpetrators`` holds one entry per
    replication, ``None`` when that replication had no eligible offender.
    """

    labels: tuple[str, ...]
    occupied: tuple[str, ...]
    population_size: int
    replications: int
    counts: dict = field(default_factory=dict)
    perpetrators: tuple[Optional[Perpetrator], ...] = ()

    def merge(self, other: "SampleStats") -> "SampleStats":
        if (self.labels, self.occupied, self.population_size) != (other.labels, other.occupied,
                                                                   other.population_size):
            raise ValueError("cannot merge stats from different models")
        counts = dict(self.counts)
        for k, v in other.counts.items():
            counts[k] = counts.get(k, 0) + v
        return SampleStats(self.labels, self.occupied, self.population_size, self.replications + other.replications,
                           _ordered(counts, self.labels), self.perpetrators + other.perpetrators)

    def count(self, offender=None, context=None, profile=None) -> int:
        """Marginal count over the cells matching the given coordinates."""
        return sum(v for (o, c, p), v in self.counts.items()
                   if (offender is None or o == offender)
                   and (context is None or c == context)
                   and (profile is None or p == profile))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def perpetrator_profile_count(self) -> tuple[int, int]:
        """(perpetrators with the profile, replications with a perpetrator)."""
        perps = [p for p in self.perpetrators if p is not None]
        return sum(p.profile for p in perps), len(perps)


def _ordered(counts: dict, labels) -> dict:
    keys = [(False, None, False), (False, None, True)]
    keys += [(True, l, p) for l in labels for p in (False, True)]
    return {k: int(counts.get(k, 0)) for k in keys}


def _replicate(cfg: SimulationConfig, q: float, seed_seq: np.random.SeedSequence) -> SampleStats:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    m = cfg.partition
    weights = np.array([c.weight for c in m.cells])
    weights = weights / weights.sum()
    prev = np.array([c.prevalence for c in m.cells])
    n = cfg.population_size

    n_off = int(rng.binomial(n, cfg.crime_rate))
    in_ctx = rng.multinomial(n_off, weights)
    prof_ctx = rng.binomial(in_ctx, prev)
    n_inn = n - n_off
    prof_inn = int(rng.binomial(n_inn, q))

    counts = {(False, None, True): prof_inn, (False, None, False): n_inn - prof_inn}
    for c, k, x in zip(m.cells, in_ctx, prof_ctx):
        counts[(True, c.label, True)] = int(x)
        counts[(True, c.label, False)] = int(k - x)

    if cfg.designated_context == UNKNOWN:
        eligible = np.ones(len(m.cells), dtype=bool)
    else:
        eligible = np.array([c.label == cfg.designated_context for c in m.cells])
    pool = np.where(eligible, in_ctx, 0)
    perp = None
    if pool.sum() > 0:
        # offenders in a cell are exchangeable: the first prof_ctx[i] of them carry the profile
        pick = int(rng.integers(pool.sum()))
        i = int(np.searchsorted(np.cumsum(pool), pick, side="right"))
        offset = pick - int(pool[:i].sum())
        perp = Perpetrator(m.cells[i].label, offset < int(prof_ctx[i]))
    return SampleStats(tuple(m.labels), tuple(c.label for c in m.occupied()), n, 1, _ordered(counts, m.labels), (perp,))


def simulate(cfg: SimulationConfig) -> SampleStats:
    q = cfg.resolved_non_offender_rate()
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    stats = None
    for child in children:
        rep = _replicate(cfg, q, child)
        stats = rep if stats is None else stats.merge(rep)
    return stats


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float

    def within(self, target: float, k: float = SE_MULTIPLIER) -> bool:
        return abs(self.value - target) <= k * self.se + CHECK_SLACK


def _proportion(x: int, n: int, cell: str) -> Estimate:
    if n == 0:
        raise InsufficientSamples(cell)
    p = x / n
    return Estimate(p, math.sqrt(p * (1 - p) / n))


def ratio_estimate(a: Estimate, b: Estimate, cov: float = 0.0, cell: str = "denominator") -> Estimate:
    """Delta-method estimate of ``a / b``.

    ``Var(a/b) ~ Var(a)/b^2 + a^2 Var(b)/b^4 - 2 a Cov(a,b)/b^3``.
    """
    if b.value == 0:
        raise InsufficientSamples(cell, f"zero estimate in denominator cell {cell!r}")
    r = a.value / b.value
    var = a.se**2 / b.value**2 + a.value**2 * b.se**2 / b.value**4 - 2 * a.value * cov / b.value**3
    return Estimate(r, math.sqrt(max(var, 0.0)))


@dataclass(frozen=True)
class EmpiricalLRs:
    p_profile: Estimate
    p_profile_given_offender: Estimate
    innocent_rate: Estimate
    p_profile_given_not_specific: Estimate
    prevalence: dict
    generic_lr: Estimate
    generic_lr_exact: Estimate
    specific_lr: dict


def empirical_lrs(stats: SampleStats) -> EmpiricalLRs:
    """Plug-in estimates of the profile rates and LRs, with delta-method SEs.

    Raises :class:`InsufficientSamples` naming the first starved cell.
    The generic and per-context LRs divide by the population profile rate,
    the same denominator the analytic model uses. ``generic_lr_exact``
    divides by the non-offender rate instead.
    """
    total = stats.total
    x_all = stats.count(profile=True)
    p_all = _proportion(x_all, total, "population")
    p_off = _proportion(stats.count(offender=True, profile=True), stats.count(offender=True), "offenders")
    p_inn = _proportion(stats.count(offender=False, profile=True), stats.count(offender=False), "non-offenders")

    perp_x, perp_n = stats.perpetrator_profile_count()
    p_ns = _proportion(x_all - perp_x, total - perp_n, "not-specific")

    prevalence = {}
    for label in stats.occupied:
        n_k = stats.count(offender=True, context=label)
        prevalence[label] = _proportion(stats.count(offender=True, context=label, profile=True), n_k, label)

    # a cell's proportion shares its individuals with the population rate: Cov = p(1-p)/N
    generic = ratio_estimate(p_off, p_all, p_off.value * (1 - p_off.value) / total, "population")
    generic_exact = ratio_estimate(p_off, p_inn, 0.0, "non-offenders")
    specific = {
        label: ratio_estimate(est, p_ns, est.value * (1 - est.value) / total, "not-specific")
        for label, est in prevalence.items()
    }
    return EmpiricalLRs(p_all, p_off, p_inn, p_ns, prevalence, generic, generic_exact, specific)


@dataclass(frozen=True)
class Comparison:
    name: str
    analytic: float
    empirical: float
    se: float

    @property
    def z(self) -> float:
        diff = self.empirical - self.analytic
        if self.se == 0:
            return 0.0 if abs(diff) <= CHECK_SLACK else math.copysign(math.inf, diff)
        return diff / self.se

    @property
    def passed(self) -> bool:
        return abs(self.empirical - self.analytic) <= SE_MULTIPLIER * self.se + CHECK_SLACK


def compare(cfg: SimulationConfig, stats: SampleStats) -> list[Comparison]:
    """Analytic vs empirical value for every quantity the oracle estimates."""
    est = empirical_lrs(stats)
    m = cfg.partition
    base = cfg.implied_base_rate()
    if base != m.profile_base_rate:
        m = dataclasses.replace(m, profile_base_rate=base)
    q = cfg.resolved_non_offender_rate()
    p_g = nesting.generic_prevalence(m)

    rows = [
        Comparison("P(P)", base, est.p_profile.value, est.p_profile.se),
        Comparison("P(P|G_g)", p_g, est.p_profile_given_offender.value, est.p_profile_given_offender.se),
        Comparison("P(P|not G_g)", q, est.innocent_rate.value, est.innocent_rate.se),
        Comparison("P(P|not G_s)", base, est.p_profile_given_not_specific.value,
                   est.p_profile_given_not_specific.se),
    ]
    for cell in m.occupied():
        e = est.prevalence[cell.label]
        rows.append(Comparison(f"P(P|G_g,{cell.label})", cell.prevalence, e.value, e.se))
    glr = nesting.generic_lr(m)
    if isinstance(glr, PointLR):
        rows.append(Comparison("generic LR", glr.value, est.generic_lr.value, est.generic_lr.se))
    if q > 0:
        rows.append(Comparison("generic LR (exact denominator)", p_g / q,
                               est.generic_lr_exact.value, est.generic_lr_exact.se))
    for cell in m.occupied():
        slr = nesting.specific_lr(m, nesting.HypothesisLevel.specific(cell.label))
        if isinstance(slr, PointLR):
            e = est.specific_lr[cell.label]
            rows.append(Comparison(f"specific LR ({cell.label})", slr.value, e.value, e.se))
    return rows


@dataclass(frozen=True)
class CellSweep:
    label: str
    analytic_lr: float
    empirical: Estimate
    perpetrator_profile_rate: Optional[float]
    perpetrators: int

    @property
    def passed(self) -> bool:
        return self.empirical.within(self.analytic_lr)


@dataclass(frozen=True)
class InvarianceReport:
    focal: str
    cells: tuple[CellSweep, ...]
    analytic_interval: tuple[float, float]
    empirical_generic_lr: Estimate
    analytic_gap: float
    empirical_gap: Estimate

    @property
    def spread(self) -> float:
        vals = [c.empirical.value for c in self.cells]
        return max(vals) - min(vals)

    @property
    def spread_se(self) -> float:
        """SE of the difference between the extreme cells."""
        lo = min(self.cells, key=lambda c: c.empirical.value)
        hi = max(self.cells, key=lambda c: c.empirical.value)
        return math.hypot(lo.empirical.se, hi.empirical.se)

    @property
    def spread_is_zero(self) -> bool:
        return self.spread <= SE_MULTIPLIER * self.spread_se + CHECK_SLACK


def invariance_experiment(cfg: SimulationConfig, k: str) -> InvarianceReport:
    """Sweep the specific crime's context over every occupied cell.

    Each sweep step reruns the oracle with the same seed and only the
    designated context changed, so all steps see the same population and
    differ only in who plays the perpetrator. ``k`` is the focal context for
    the invariance-gap comparison.
    """
    m = cfg.partition
    m.cell(k)
    if m.profile_base_rate == 0:
        raise SimulationError("zero-base-rate", "specific LRs need a positive base rate")
    sweeps = []
    last = last_stats = None
    for cell in m.occupied():
        stats = simulate(dataclasses.replace(cfg, designated_context=cell.label))
        est = empirical_lrs(stats)
        x, n = stats.perpetrator_profile_count()
        sweeps.append(CellSweep(cell.label, cell.prevalence / cfg.implied_base_rate(),
                                est.specific_lr[cell.label], x / n if n else None, n))
        last, last_stats = est, stats
    lo, hi = min(c.analytic_lr for c in sweeps), max(c.analytic_lr for c in sweeps)
    focal = last.prevalence.get(k)
    if focal is None:
        raise SimulationError("no-such-context", f"context {k!r} carries no weight")
    # the focal cell's offenders are part of the pooled offenders: Cov(p_k, p_g) = p_k(1-p_k)/n_off
    pooled = last.p_profile_given_offender
    n_off = last_stats.count(offender=True)
    gap_var = max(focal.se**2 + pooled.se**2 - 2 * focal.value * (1 - focal.value) / n_off, 0.0)
    gap = Estimate(abs(focal.value - pooled.value), math.sqrt(gap_var))
    return InvarianceReport(k, tuple(sweeps), (lo, hi), last.generic_lr,
                            nesting.invariance_gap(m, k), gap)
