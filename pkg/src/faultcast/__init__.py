"""Bayesian fault-count modeling with decision-utility reporting.

Fits Poisson and zero-inflated Poisson regressions of fault-detection
experiments by MCMC, compares them by out-of-sample predictive criteria,
derives posterior-predictive outcome distributions, and converts them into
cumulative-prospect-theory utilities for concrete decision scenarios.
"""

from .cpt import (
    CostProfile,
    Prospect,
    WeightingParams,
    decision_weights,
    expected_utility,
    tail_breakdown,
    tk_weight,
)
from .model import Dataset, ModelSpec, Observation, ParameterVector
from .model_compare import compare, pointwise_loglik, psis_loo, waic
from .posterior import (
    Posterior,
    PredictorSetting,
    fit,
    marginal_density,
    posterior_predictive,
    predictive_interval,
    summarize,
)
from .sampler import BlockSpec, Draws, SamplerConfig, ess_bulk, run_mcmc, split_rhat
from .scenarios import (
    Scenario,
    ScenarioOption,
    build_prospect,
    builtin_scenario,
    evaluate_scenario,
    sensitivity_sweep,
)
from .synthetic import DesignSpec, balanced_design, generate, summary_stats

__version__ = "0.1.0"

__all__ = [
    "BlockSpec",
    "CostProfile",
    "Dataset",
    "DesignSpec",
    "Draws",
    "ModelSpec",
    "Observation",
    "ParameterVector",
    "Posterior",
    "PredictorSetting",
    "Prospect",
    "SamplerConfig",
    "Scenario",
    "ScenarioOption",
    "WeightingParams",
    "balanced_design",
    "build_prospect",
    "builtin_scenario",
    "compare",
    "decision_weights",
    "ess_bulk",
    "evaluate_scenario",
    "expected_utility",
    "fit",
    "generate",
    "marginal_density",
    "pointwise_loglik",
    "posterior_predictive",
    "predictive_interval",
    "psis_loo",
    "run_mcmc",
    "sensitivity_sweep",
    "split_rhat",
    "summarize",
    "summary_stats",
    "tail_breakdown",
    "tk_weight",
    "waic",
]
