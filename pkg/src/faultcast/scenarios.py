"""Manager decision problems evaluated end to end.

A scenario is a set of options, each a predictor setting plus an hourly-cost
selector.  Evaluation turns each option's posterior-predictive fault counts
into a monetary prospect and scores it with cumulative prospect theory,
reporting expected subjective utility, a Monte-Carlo standard error, and the
tail breakdown.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cpt import (
    CostProfile,
    Prospect,
    WeightingParams,
    expected_utility,
    tail_breakdown,
    value,
)
from .errors import InputError
from .posterior import OUTCOME, Posterior, PredictorSetting, posterior_predictive

DEFAULT_EXPERIENCE_SPLIT = (12, 23)  # low/high headcount of the built-in design
DEFAULT_APPROACH_SPLIT = (1, 1)  # both approaches equally represented

SWEEPABLE = {
    "S": "savings_per_fault",
    "C_low": "hourly_cost_low",
    "C_high": "hourly_cost_high",
    "C_mixed": "hourly_cost_mixed",
    "h": "session_hours",
}


@dataclass(frozen=True)
class ScenarioOption:
    label: str
    setting: PredictorSetting
    cost: str = "mixed"  # low | high | mixed


@dataclass(frozen=True)
class Scenario:
    name: str
    options: tuple

    def __post_init__(self):
        if len(self.options) < 2:
            raise InputError("a scenario needs at least two options")
        labels = [o.label for o in self.options]
        if len(set(labels)) != len(labels):
            raise InputError("option labels must be unique")


def _normalize(split) -> tuple[float, float]:
    lo, hi = float(split[0]), float(split[1])
    total = lo + hi
    if total <= 0:
        raise InputError("split weights must have positive total")
    return lo / total, hi / total


def builtin_scenario(
    name: str,
    experience_split=DEFAULT_EXPERIENCE_SPLIT,
    approach_split=DEFAULT_APPROACH_SPLIT,
) -> Scenario:
    """The three stock decision problems.

    ``approach``: exploratory vs test-case testing with a mixed-experience
    pool.  ``experience``: hire low- vs high-experience testers, both using a
    mix of approaches.  ``exploratory``: choose the experience level when
    everyone tests exploratively.
    """
    exp_weights = _normalize(experience_split)
    app_weights = _normalize(approach_split)
    if name == "approach":
        options = (
            ScenarioOption(
                label="exploratory",
                setting=PredictorSetting(
                    approach=0, experience=None, experience_weights=exp_weights
                ),
                cost="mixed",
            ),
            ScenarioOption(
                label="test-case",
                setting=PredictorSetting(
                    approach=1, experience=None, experience_weights=exp_weights
                ),
                cost="mixed",
            ),
        )
    elif name == "experience":
        options = (
            ScenarioOption(
                label="low",
                setting=PredictorSetting(
                    approach=None, approach_weights=app_weights, experience=0
                ),
                cost="low",
            ),
            ScenarioOption(
                label="high",
                setting=PredictorSetting(
                    approach=None, approach_weights=app_weights, experience=1
                ),
                cost="high",
            ),
        )
    elif name == "exploratory":
        options = (
            ScenarioOption(
                label="low",
                setting=PredictorSetting(approach=0, experience=0),
                cost="low",
            ),
            ScenarioOption(
                label="high",
                setting=PredictorSetting(approach=0, experience=1),
                cost="high",
            ),
        )
    else:
        raise InputError(
            f"unknown scenario {name!r}; built-ins are approach, experience, exploratory"
        )
    return Scenario(name=name, options=options)


def build_prospect(
    post: Posterior,
    setting: PredictorSetting,
    cost_selector: str,
    profile: CostProfile,
    n_rep: int = 1,
    seed=0,
    subject_mode: str = "fresh",
) -> Prospect:
    """Posterior-predictive fault counts folded into a monetary prospect.

    The prospect's support is exactly the set of distinct simulated counts.
    """
    pd = posterior_predictive(
        post, setting, mode=OUTCOME, n_rep=n_rep, seed=seed, subject_mode=subject_mode
    )
    return _prospect_from_counts(pd.samples, cost_selector, profile)


def _prospect_from_counts(counts, cost_selector, profile: CostProfile) -> Prospect:
    counts = np.asarray(counts)
    if counts.size == 0:
        raise InputError("no predictive samples to build a prospect from")
    support, tallies = np.unique(counts, return_counts=True)
    probs = tallies / counts.size
    hourly = profile.hourly_cost(cost_selector)
    values = value(support, profile.savings_per_fault, hourly, profile.session_hours)
    return Prospect(values=np.asarray(values, dtype=float), probabilities=probs)


@dataclass(frozen=True)
class OptionResult:
    label: str
    utility: float
    mc_se: float
    tails: tuple  # three TailSegment entries
    n_outcomes: int  # prospect support size


@dataclass(frozen=True)
class UtilityReport:
    scenario: str
    options: tuple
    best: str
    profile: CostProfile
    weighting: WeightingParams
    n_samples: int
    seed: int


_MC_BATCHES = 20


def _mc_standard_error(counts, cost_selector, profile, weighting) -> float:
    """Batch-means standard error of the expected utility."""
    counts = np.asarray(counts)
    batches = np.array_split(counts, _MC_BATCHES)
    utilities = [
        expected_utility(_prospect_from_counts(b, cost_selector, profile), weighting)
        for b in batches
        if b.size
    ]
    if len(utilities) < 2:
        return 0.0
    return float(np.std(utilities, ddof=1) / np.sqrt(len(utilities)))


def _option_counts(post: Posterior, scenario: Scenario, n_rep: int, seed: int,
                   subject_mode: str):
    """Outcome-mode predictive counts per option, from per-option derived seeds."""
    children = np.random.SeedSequence(seed).spawn(len(scenario.options))
    counts = {}
    for option, child in zip(scenario.options, children):
        pd = posterior_predictive(
            post,
            option.setting,
            mode=OUTCOME,
            n_rep=n_rep,
            seed=child,
            subject_mode=subject_mode,
        )
        counts[option.label] = pd.samples
    return counts


def evaluate_scenario(
    post: Posterior,
    scenario: Scenario,
    profile: CostProfile = CostProfile(),
    weighting: WeightingParams = WeightingParams(),
    n_rep: int = 1,
    seed: int = 0,
    subject_mode: str = "fresh",
) -> UtilityReport:
    """Expected subjective utility and tail breakdown for every option."""
    counts = _option_counts(post, scenario, n_rep, seed, subject_mode)
    results = []
    for option in scenario.options:
        c = counts[option.label]
        prospect = _prospect_from_counts(c, option.cost, profile)
        results.append(
            OptionResult(
                label=option.label,
                utility=expected_utility(prospect, weighting),
                mc_se=_mc_standard_error(c, option.cost, profile, weighting),
                tails=tuple(tail_breakdown(prospect)),
                n_outcomes=len(prospect),
            )
        )
    best = max(results, key=lambda r: r.utility).label
    return UtilityReport(
        scenario=scenario.name,
        options=tuple(results),
        best=best,
        profile=profile,
        weighting=weighting,
        n_samples=len(next(iter(counts.values()))),
        seed=seed,
    )


@dataclass(frozen=True)
class SweepRow:
    value: float
    utilities: dict  # label -> expected utility
    best: str


@dataclass(frozen=True)
class SweepResult:
    scenario: str
    parameter: str
    rows: tuple


def sensitivity_sweep(
    post: Posterior,
    scenario: Scenario,
    profile: CostProfile,
    weighting: WeightingParams,
    parameter: str,
    sweep_values,
    n_rep: int = 1,
    seed: int = 0,
    subject_mode: str = "fresh",
) -> SweepResult:
    """Re-evaluate the scenario over a grid of one cost parameter.

    The predictive samples are drawn once and reused for every grid value,
    so the sweep isolates the cost effect from Monte-Carlo noise.
    """
    if parameter not in SWEEPABLE:
        raise InputError(
            f"sweep parameter must be one of {sorted(SWEEPABLE)}, got {parameter!r}"
        )
    field_name = SWEEPABLE[parameter]
    counts = _option_counts(post, scenario, n_rep, seed, subject_mode)
    rows = []
    for grid_value in sweep_values:
        swept = replace(profile, **{field_name: float(grid_value)})
        utilities = {
            option.label: expected_utility(
                _prospect_from_counts(counts[option.label], option.cost, swept),
                weighting,
            )
            for option in scenario.options
        }
        best = max(utilities, key=utilities.get)
        rows.append(SweepRow(value=float(grid_value), utilities=utilities, best=best))
    return SweepResult(scenario=scenario.name, parameter=parameter, rows=tuple(rows))


def format_report(report: UtilityReport) -> str:
    header = (
        f"{'option':<14} {'utility':>10} {'mc_se':>8} "
        f"{'lo3%':>10} {'mid94%':>10} {'hi3%':>10}"
    )
    lines = [f"scenario: {report.scenario}", header, "-" * len(header)]
    for opt in report.options:
        lo, mid, hi = opt.tails
        marker = " *" if opt.label == report.best else ""
        lines.append(
            f"{opt.label:<14} {opt.utility:>10.2f} {opt.mc_se:>8.2f} "
            f"{lo.value:>10.2f} {mid.value:>10.2f} {hi.value:>10.2f}{marker}"
        )
    lines.append(f"best option: {report.best}")
    return "\n".join(lines)


def format_sweep(sweep: SweepResult) -> str:
    labels = list(sweep.rows[0].utilities)
    header = f"{sweep.parameter:>10} " + " ".join(f"{l:>12}" for l in labels) + f" {'best':>12}"
    lines = [f"scenario: {sweep.scenario} (sweep over {sweep.parameter})", header,
             "-" * len(header)]
    for row in sweep.rows:
        cells = " ".join(f"{row.utilities[l]:>12.2f}" for l in labels)
        lines.append(f"{row.value:>10g} {cells} {row.best:>12}")
    return "\n".join(lines)
