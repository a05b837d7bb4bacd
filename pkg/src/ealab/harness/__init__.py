"""Experiment orchestration, verification suites and the command-line interface."""

from .experiments import (
    ExperimentSpec,
    ScalingTable,
    SlowdownTable,
    TrialBatch,
    run_trials,
    scaling_experiment,
    slowdown_experiment,
    trial_seed,
)
from .stats import TrialStats
from .verify import SuiteResult, verify_suites

__all__ = [
    "ExperimentSpec",
    "ScalingTable",
    "SlowdownTable",
    "TrialBatch",
    "TrialStats",
    "SuiteResult",
    "run_trials",
    "scaling_experiment",
    "slowdown_experiment",
    "trial_seed",
    "verify_suites",
]
