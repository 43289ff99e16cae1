import dataclasses

import numpy as np
import pytest

from evidentia.errors import InsufficientSamples, SimulationError
from evidentia.nesting import PartitionModel, generic_prevalence
from evidentia.oracle import (
    Estimate,
    SimulationConfig,
    compare,
    empirical_lrs,
    invariance_experiment,
    ratio_estimate,
    simulate,
)
from evidentia.probability import innocent_profile_rate


@pytest.fixture
def appendix_cfg(appendix_model):
    return SimulationConfig(1_000_000, 0.001, appendix_model, seed=42, replications=10, designated_context="S1")


def test_determinism(appendix_cfg):
    assert simulate(appendix_cfg) == simulate(appendix_cfg)
    other = simulate(dataclasses.replace(appendix_cfg, seed=43))
    assert other.counts != simulate(appendix_cfg).counts


def test_count_conservation(appendix_cfg):
    s = simulate(appendix_cfg)
    assert s.total == appendix_cfg.population_size * appendix_cfg.replications
    assert s.count(offender=True) + s.count(offender=False) == s.total
    assert s.count(profile=True) + s.count(profile=False) == s.total
    assert sum(s.count(offender=True, context=l) for l in s.labels) == s.count(offender=True)
    for l in s.labels:
        assert (s.count(offender=True, context=l, profile=True) + s.count(offender=True, context=l, profile=False)
                == s.count(offender=True, context=l))
    assert len(s.perpetrators) == appendix_cfg.replications


def test_merge_is_commutative_and_associative(appendix_cfg):
    cfg = dataclasses.replace(appendix_cfg, population_size=10_000, replications=1)
    a, b, c = (simulate(dataclasses.replace(cfg, seed=i)) for i in range(3))
    assert a.merge(b).counts == b.merge(a).counts
    assert a.merge(b).merge(c).counts == a.merge(b.merge(c)).counts


def test_generic_prevalence_recovered(appendix_cfg):
    est = empirical_lrs(simulate(appendix_cfg))
    assert abs(est.p_profile_given_offender.value - 0.7375) <= 0.02


def test_deterministic_profiles():
    m = PartitionModel.from_lists("x", ["only"], [1.0], [1.0], 0.5)
    cfg = SimulationConfig(10_000, 0.3, m, seed=1, replications=2, non_offender_rate=0.0)
    s = simulate(cfg)
    assert s.count(offender=True, profile=False) == 0
    assert s.count(offender=False, profile=True) == 0
    assert all(p.profile for p in s.perpetrators if p is not None)


def test_independent_profile_gives_unit_lr():
    m = PartitionModel.from_lists("x", ["a", "b"], [0.5, 0.5], [0.2, 0.2], 0.2)
    cfg = SimulationConfig(200_000, 0.5, m, seed=7, replications=5)
    assert cfg.resolved_non_offender_rate() == pytest.approx(0.2, abs=1e-15)
    est = empirical_lrs(simulate(cfg))
    assert est.generic_lr.within(1.0)


def test_empirical_lrs_against_analytic(appendix_cfg, appendix_model):
    est = empirical_lrs(simulate(appendix_cfg))
    assert est.generic_lr.within(73.75)
    assert est.specific_lr["S1"].within(40.0)
    exact = innocent_profile_rate(0.01, generic_prevalence(appendix_model), 0.001, "exact")
    assert est.innocent_rate.within(exact)
    assert all(r.passed for r in compare(appendix_cfg, simulate(appendix_cfg)))


def test_infeasible_base_rate():
    m = PartitionModel.from_lists("x", ["a"], [1.0], [0.9], 0.001)
    with pytest.raises(SimulationError) as e:
        simulate(SimulationConfig(1000, 0.5, m, seed=0))
    assert e.value.code == "infeasible-base-rate"


def test_insufficient_samples_names_cell(appendix_cfg):
    stats = simulate(dataclasses.replace(appendix_cfg, population_size=100, replications=1, seed=3))
    with pytest.raises(InsufficientSamples) as e:
        empirical_lrs(stats)
    assert e.value.code == "insufficient-samples"
    assert e.value.cell in ("offenders", "S1", "S2", "S3", "S4")


def test_delta_method_matches_seed_spread(appendix_model):
    # independent check of the SE formula: spread of the estimate across seeds
    cfg = SimulationConfig(100_000, 0.01, appendix_model, seed=0, replications=1)
    vals, ses = [], []
    for seed in range(400):
        est = empirical_lrs(simulate(dataclasses.replace(cfg, seed=seed)))
        vals.append(est.generic_lr.value)
        ses.append(est.generic_lr.se)
    assert np.std(vals) == pytest.approx(np.mean(ses), rel=0.1)


def test_ratio_estimate_zero_denominator():
    with pytest.raises(InsufficientSamples):
        ratio_estimate(Estimate(0.1, 0.01), Estimate(0.0, 0.0), cell="x")
    assert ratio_estimate(Estimate(0.5, 0.0), Estimate(0.25, 0.0)) == Estimate(2.0, 0.0)


def test_consistency_over_sizes(appendix_model):
    base = SimulationConfig(10_000, 0.001, appendix_model, seed=0, replications=10)
    medians = []
    for n in (10_000, 100_000, 1_000_000):
        errs, fails = [], {}
        for seed in range(100):
            cfg = dataclasses.replace(base, population_size=n, seed=seed)
            rows = compare(cfg, simulate(cfg))
            for r in rows:
                fails[r.name] = fails.get(r.name, 0) + (not r.passed)
            errs.append(abs(rows[1].empirical - rows[1].analytic))
        medians.append(float(np.median(errs)))
        if n >= 100_000:
            assert max(fails.values()) <= 1, fails
    assert medians[0] > medians[1] > medians[2]


def test_perpetrator_tracks_context_prevalence(appendix_model):
    cfg = SimulationConfig(20_000, 0.01, appendix_model, seed=11, replications=4000, designated_context="S1")
    x, n = simulate(cfg).perpetrator_profile_count()
    rate = x / n
    se = np.sqrt(0.4 * 0.6 / n)
    assert abs(rate - 0.40) <= 3 * se
    assert abs(rate - 0.7375) > 10 * se


class TestInvarianceExperiment:
    def test_appendix(self, appendix_cfg):
        rep = invariance_experiment(appendix_cfg, "S1")
        emp = [c.empirical.value for c in rep.cells]
        assert [c.label for c in rep.cells] == ["S1", "S2", "S3", "S4"]
        assert emp == sorted(emp)
        assert all(c.passed for c in rep.cells)
        assert rep.analytic_interval == (40.0, 95.0)
        assert not rep.spread_is_zero
        assert rep.empirical_gap.within(rep.analytic_gap)

    def test_uniform(self):
        m = PartitionModel.from_lists("x", ["a", "b", "c"], [0.3, 0.3, 0.4], [0.5] * 3, 0.01)
        rep = invariance_experiment(SimulationConfig(1_000_000, 0.001, m, seed=5, replications=10), "a")
        assert rep.spread_is_zero

    def test_two_cells_mean_containment(self):
        m = PartitionModel.from_lists("x", ["a", "b"], [0.9, 0.1], [0.3, 0.9], 0.01)
        rep = invariance_experiment(SimulationConfig(1_000_000, 0.002, m, seed=9, replications=10), "b")
        lo, hi = sorted(c.empirical.value for c in rep.cells)
        assert lo < rep.empirical_generic_lr.value < hi
