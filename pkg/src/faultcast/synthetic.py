"""Synthetic fault-count datasets drawn from known model parameters.

Used for calibration: generate with a known truth, fit, and check that the
posterior recovers it.  The built-in design mirrors the regime the package
defaults target: 35 testers, 12 with low and 23 with high experience, split
as evenly as possible between the two testing approaches.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import nan

import numpy as np

from .distributions import sample_poisson, sample_zip
from .errors import DomainError, InputError
from .model import M1, M2, Dataset, ModelSpec, Observation, ParameterVector, _rates, _zero_inflation


@dataclass(frozen=True)
class DesignSpec:
    """Cell allocation of subjects over the 2x2 (approach, experience) grid.

    ``cells`` maps each combination to a subject count; subjects are numbered
    consecutively cell by cell.
    """

    cells: tuple  # ((approach, experience, count), ...)
    sessions_per_subject: int = 1

    def __post_init__(self):
        if self.sessions_per_subject < 1:
            raise InputError("sessions_per_subject must be positive")
        seen = set()
        for approach, experience, count in self.cells:
            if approach not in (0, 1) or experience not in (0, 1):
                raise InputError("cell labels must be binary")
            if count < 0:
                raise InputError("cell counts must be nonnegative")
            if (approach, experience) in seen:
                raise InputError("duplicate design cell")
            seen.add((approach, experience))
        if self.n_subjects < 1:
            raise InputError("design must allocate at least one subject")

    @property
    def n_subjects(self) -> int:
        return sum(count for _, _, count in self.cells)


def balanced_design(n_low: int = 12, n_high: int = 23, sessions: int = 1) -> DesignSpec:
    """2x2 design splitting each experience group evenly across approaches."""
    cells = (
        (0, 0, (n_low + 1) // 2),
        (1, 0, n_low // 2),
        (0, 1, (n_high + 1) // 2),
        (1, 1, n_high // 2),
    )
    return DesignSpec(cells=cells, sessions_per_subject=sessions)


DESIGN_PRESETS = {
    "reference": balanced_design(),
}

# Built-in truth presets.  "reference" has a strong negative approach effect,
# a mild positive experience effect, zero inflation concentrated in the
# test-case arm, and modest subject-level variation.
TRUTH_PRESETS = {
    "reference": (
        ParameterVector(
            alpha=1.95, beta_a=-1.47, beta_e=0.33,
            alpha_p=-4.61, beta_p=3.39, mu_s=0.0, sigma_s=0.29,
        ),
        M2,
    ),
    "reference-poisson": (
        ParameterVector(alpha=1.95, beta_a=-1.47, beta_e=0.33),
        M1,
    ),
}


def generate(truth: ParameterVector, design: DesignSpec, spec: ModelSpec, seed: int) -> Dataset:
    """Draw one dataset from the model at a fixed parameter point.

    Subject intercepts are drawn once per subject from
    Normal(mu_s, sigma_s); counts then follow the model likelihood.
    Deterministic given the seed.
    """
    if spec.kind == M2 and (not np.isfinite(truth.sigma_s) or truth.sigma_s <= 0):
        raise DomainError("truth for the varying-effects model needs sigma_s > 0")
    rng = np.random.default_rng(seed)
    n = design.n_subjects

    subject_cell = []
    for approach, experience, count in design.cells:
        subject_cell.extend([(approach, experience)] * count)
    approach = np.array([cell[0] for cell in subject_cell])
    experience = np.array([cell[1] for cell in subject_cell])

    point = ParameterVector(
        alpha=truth.alpha,
        beta_a=truth.beta_a,
        beta_e=truth.beta_e,
        alpha_p=truth.alpha_p,
        beta_p=truth.beta_p,
        mu_s=truth.mu_s,
        sigma_s=truth.sigma_s if spec.kind == M2 else 1.0,
        z_subjects=rng.standard_normal(n) if spec.kind == M2 else np.zeros(n),
    )
    lam = _rates(point, approach, experience, np.arange(n), spec)

    observations = []
    for session in range(design.sessions_per_subject):
        if spec.kind == M2:
            p = np.clip(_zero_inflation(point, approach, spec), 0.0, 1.0)
            counts = sample_zip(lam, p, rng)
        else:
            counts = sample_poisson(lam, rng)
        for s in range(n):
            observations.append(
                Observation(
                    subject=s,
                    approach=int(approach[s]),
                    experience=int(experience[s]),
                    faults=int(counts[s]),
                )
            )
    return Dataset(observations=tuple(observations), n_subjects=n)


@dataclass(frozen=True)
class GroupStats:
    group: str
    n: int
    median: float
    mean: float
    sd: float
    min: int
    max: int


def summary_stats(data: Dataset) -> list[GroupStats]:
    """Per-experience-group fault statistics, plus the overall row.

    The standard deviation is the sample (n-1) estimate; with a single
    observation it is reported as NaN.
    """
    rows = []
    for label, mask in (
        ("low", data.experience == 0),
        ("high", data.experience == 1),
        ("any", np.ones(len(data), dtype=bool)),
    ):
        faults = data.faults[mask]
        if faults.size == 0:
            rows.append(GroupStats(label, 0, nan, nan, nan, 0, 0))
            continue
        sd = float(faults.std(ddof=1)) if faults.size > 1 else nan
        rows.append(
            GroupStats(
                group=label,
                n=int(faults.size),
                median=float(np.median(faults)),
                mean=float(faults.mean()),
                sd=sd,
                min=int(faults.min()),
                max=int(faults.max()),
            )
        )
    return rows
