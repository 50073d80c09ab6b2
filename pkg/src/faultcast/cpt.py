"""Cumulative prospect theory: values, probability weighting, decision weights.

A prospect is a finite set of monetary outcomes with probabilities.  Expected
subjective utility weights each outcome by a transform of its probability
rather than the probability itself: rank-dependent (cumulative) weighting by
default, with the plain per-outcome weighting available for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError

# Below roughly 0.28 the inverse-S weighting curve stops being monotone.
GAMMA_FLOOR = 0.28

CUMULATIVE = "cumulative"
POINTWISE = "pointwise"


@dataclass(frozen=True)
class CostProfile:
    """Monetary context for a testing session.

    The mixed-pool hourly cost is an explicit figure, never derived from the
    low/high costs, so the pool composition it reflects stays a modelling
    input.
    """

    savings_per_fault: float = 150.0
    hourly_cost_low: float = 100.0
    hourly_cost_high: float = 200.0
    hourly_cost_mixed: float = 134.38
    session_hours: float = 3.0

    def __post_init__(self):
        if self.session_hours <= 0:
            raise InputError("session_hours must be positive")
        for name in ("savings_per_fault", "hourly_cost_low", "hourly_cost_high",
                     "hourly_cost_mixed"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be nonnegative")

    def hourly_cost(self, selector: str) -> float:
        try:
            return {
                "low": self.hourly_cost_low,
                "high": self.hourly_cost_high,
                "mixed": self.hourly_cost_mixed,
            }[selector]
        except KeyError:
            raise InputError(
                f"cost selector must be low, high or mixed, got {selector!r}"
            ) from None


@dataclass(frozen=True)
class WeightingParams:
    """Probability-weighting configuration.

    Defaults are the standard curvature estimates (0.61 gains, 0.69 losses).
    ``value_exponent`` and ``loss_aversion`` default to the identity value
    transform; set (0.88, 2.25) for the classic power-value form.
    """

    gamma_gain: float = 0.61
    gamma_loss: float = 0.69
    mode: str = CUMULATIVE
    value_exponent: float = 1.0
    loss_aversion: float = 1.0

    def __post_init__(self):
        for name in ("gamma_gain", "gamma_loss"):
            g = getattr(self, name)
            if not GAMMA_FLOOR < g <= 1.0:
                raise DomainError(f"{name} must lie in ({GAMMA_FLOOR}, 1], got {g}")
        if self.mode not in (CUMULATIVE, POINTWISE):
            raise InputError(f"weighting mode must be cumulative or pointwise")
        if self.value_exponent <= 0 or self.loss_aversion <= 0:
            raise InputError("value transform parameters must be positive")


@dataclass(frozen=True)
class Prospect:
    """Discrete outcomes (monetary values with probabilities) and a reference point."""

    values: np.ndarray
    probabilities: np.ndarray
    reference: float = 0.0

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        probs = np.atleast_1d(np.asarray(self.probabilities, dtype=float))
        if values.size == 0:
            raise InputError("a prospect needs at least one outcome")
        if values.shape != probs.shape:
            raise InputError("values and probabilities must align")
        if not np.all(np.isfinite(values)):
            raise InputError("outcome values must be finite")
        if np.any(probs < 0):
            raise InputError("probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise InputError(f"probabilities must sum to 1, got {probs.sum()!r}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def from_pairs(cls, outcomes, reference: float = 0.0) -> "Prospect":
        values = [v for v, _ in outcomes]
        probs = [p for _, p in outcomes]
        return cls(values=np.asarray(values), probabilities=np.asarray(probs),
                   reference=reference)

    def __len__(self):
        return self.values.size


def tk_weight(p, gamma: float):
    """Inverse-S probability weighting: p^g / (p^g + (1-p)^g)^(1/g).

    Overweights small probabilities, underweights large ones; fixes 0 and 1.
    """
    if not GAMMA_FLOOR < gamma <= 1.0:
        raise DomainError(f"gamma must lie in ({GAMMA_FLOOR}, 1], got {gamma}")
    parr = np.asarray(p, dtype=float)
    if np.any(parr < 0) or np.any(parr > 1):
        raise DomainError("probabilities must lie in [0, 1]")
    num = parr**gamma
    den = (num + (1.0 - parr) ** gamma) ** (1.0 / gamma)
    out = num / den
    return float(out) if np.ndim(p) == 0 else out


def value(faults, savings_per_fault: float, hourly_cost: float, session_hours: float):
    """Money from a session that finds ``faults`` faults: S*x - C*h."""
    return savings_per_fault * np.asarray(faults) - hourly_cost * session_hours


def decision_weights(prospect: Prospect, params: WeightingParams) -> np.ndarray:
    """Per-outcome decision weights, aligned with the prospect's outcome order.

    Cumulative mode ranks the outcomes and weights gains by successive
    differences of the gain curve applied to upper-tail probabilities, losses
    by differences of the loss curve on lower-tail probabilities.  Pointwise
    mode transforms each outcome's own probability.
    """
    values = prospect.values
    probs = prospect.probabilities
    gains = values >= prospect.reference
    if params.mode == POINTWISE:
        weights = np.where(
            gains,
            tk_weight(probs, params.gamma_gain),
            tk_weight(probs, params.gamma_loss),
        )
        return weights

    order = np.argsort(values, kind="stable")
    sorted_probs = probs[order]
    sorted_gain = gains[order]
    n = len(prospect)
    upper_tail = np.concatenate([np.cumsum(sorted_probs[::-1])[::-1], [0.0]])
    lower_tail = np.concatenate([[0.0], np.cumsum(sorted_probs)])
    sorted_weights = np.empty(n)
    for i in range(n):
        if sorted_gain[i]:
            sorted_weights[i] = tk_weight(
                min(upper_tail[i], 1.0), params.gamma_gain
            ) - tk_weight(min(upper_tail[i + 1], 1.0), params.gamma_gain)
        else:
            sorted_weights[i] = tk_weight(
                min(lower_tail[i + 1], 1.0), params.gamma_loss
            ) - tk_weight(min(lower_tail[i], 1.0), params.gamma_loss)
    weights = np.empty(n)
    weights[order] = sorted_weights
    return weights


def _subjective_values(prospect: Prospect, params: WeightingParams) -> np.ndarray:
    centered = prospect.values - prospect.reference
    if params.value_exponent == 1.0 and params.loss_aversion == 1.0:
        return centered
    exponent = params.value_exponent
    return np.where(
        centered >= 0,
        np.abs(centered) ** exponent,
        -params.loss_aversion * np.abs(centered) ** exponent,
    )


def expected_utility(prospect: Prospect, params: WeightingParams) -> float:
    """Decision-weighted average of outcome values relative to the reference.

    With gamma = 1 (and the identity value transform) the cumulative mode
    reduces exactly to the plain expectation.
    """
    weights = decision_weights(prospect, params)
    return float(np.sum(weights * _subjective_values(prospect, params)))


@dataclass(frozen=True)
class TailSegment:
    probability: float
    value: float  # probability-weighted mean outcome value within the segment


def tail_breakdown(prospect: Prospect, split=(0.03, 0.94, 0.03)) -> list[TailSegment]:
    """Split the outcome distribution into probability bands by rank.

    Outcomes are sorted by value; each band of the split receives its share
    of probability mass in order, with boundary outcomes apportioned
    fractionally.  Each segment reports the mean outcome value of its mass.
    """
    split = tuple(float(s) for s in split)
    if any(s < 0 for s in split):
        raise InputError("split masses must be nonnegative")
    if abs(sum(split) - 1.0) > 1e-9:
        raise InputError("split masses must sum to 1")
    order = np.argsort(prospect.values, kind="stable")
    values = prospect.values[order]
    probs = prospect.probabilities[order]
    probs = probs / probs.sum()

    segments = []
    seg_index = 0
    remaining = split[0]
    mass_acc = 0.0
    value_acc = 0.0
    for v, p in zip(values, probs):
        left = p
        while left > 0 and seg_index < len(split):
            take = min(left, remaining)
            mass_acc += take
            value_acc += take * v
            left -= take
            remaining -= take
            if remaining <= 1e-15 and seg_index < len(split):
                segments.append(
                    TailSegment(
                        probability=split[seg_index],
                        value=value_acc / mass_acc if mass_acc > 0 else math.nan,
                    )
                )
                seg_index += 1
                remaining = split[seg_index] if seg_index < len(split) else 0.0
                mass_acc = 0.0
                value_acc = 0.0
    while len(segments) < len(split):
        # numerical leftovers: close the final open segment
        segments.append(
            TailSegment(
                probability=split[len(segments)],
                value=value_acc / mass_acc if mass_acc > 0 else math.nan,
            )
        )
        mass_acc = 0.0
        value_acc = 0.0
    return segments
