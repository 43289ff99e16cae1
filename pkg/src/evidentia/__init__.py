"""Likelihood-ratio calculus for profiling vs case-specific evidence."""

from .errors import EvidentiaError, InsufficientSamples, ModelError, SimulationError
from .nesting import (
    UNKNOWN,
    ContextCell,
    HypothesisLevel,
    PartitionModel,
    generic_lr,
    generic_prevalence,
    invariance_gap,
    representativeness_check,
    specific_lr,
    specific_prevalence,
    uniformity_check,
)
from .oracle import SampleStats, SimulationConfig, empirical_lrs, invariance_experiment, simulate
from .probability import (
    IntervalLR,
    Odds,
    OddsInterval,
    PointLR,
    Probability,
    Undefined,
    bayes_update,
    innocent_profile_rate,
    likelihood_ratio,
    odds_from_probability,
    probability_from_odds,
)
from .scenario import (
    EvidenceItem,
    Scenario,
    combine_levels_diagnostic,
    evaluate,
    stereotype_gap,
    truth_tracking_status,
)

__version__ = "0.1.0"
