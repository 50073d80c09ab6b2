import math

import numpy as np
import pytest

from faultcast.errors import DomainError, InputError
from faultcast.model import M1, M2, ModelSpec, ParameterVector
from faultcast.synthetic import (
    DESIGN_PRESETS,
    TRUTH_PRESETS,
    DesignSpec,
    balanced_design,
    generate,
    summary_stats,
)

REFERENCE_TRUTH, _ = TRUTH_PRESETS["reference"]
M2_SPEC = ModelSpec(kind=M2)
M1_SPEC = ModelSpec(kind=M1)


class TestDesignSpec:
    def test_balanced_default(self):
        design = balanced_design()
        assert design.n_subjects == 35
        counts = {(a, e): n for a, e, n in design.cells}
        assert counts[(0, 0)] + counts[(1, 0)] == 12
        assert counts[(0, 1)] + counts[(1, 1)] == 23
        assert abs(counts[(0, 1)] - counts[(1, 1)]) <= 1

    def test_preset_registered(self):
        assert DESIGN_PRESETS["reference"].n_subjects == 35

    def test_validation(self):
        with pytest.raises(InputError):
            DesignSpec(cells=((0, 0, 2),), sessions_per_subject=0)
        with pytest.raises(InputError):
            DesignSpec(cells=((0, 0, 1), (0, 0, 2)))
        with pytest.raises(InputError):
            DesignSpec(cells=((0, 0, 0),))


class TestGenerate:
    def test_row_count_and_determinism(self):
        d1 = generate(REFERENCE_TRUTH, balanced_design(), M2_SPEC, seed=11)
        d2 = generate(REFERENCE_TRUTH, balanced_design(), M2_SPEC, seed=11)
        d3 = generate(REFERENCE_TRUTH, balanced_design(), M2_SPEC, seed=12)
        assert len(d1) == 35 and d1.n_subjects == 35
        assert d1.observations == d2.observations
        assert d1.observations != d3.observations

    def test_certain_zero_arm(self):
        truth = ParameterVector(
            alpha=1.5, alpha_p=60.0, beta_p=0.0, mu_s=0.0, sigma_s=0.2
        )
        data = generate(truth, balanced_design(), M2_SPEC, seed=3)
        # alpha_p huge makes p = 1 on both arms; every count is zero
        assert np.all(data.faults == 0)

    def test_inflation_concentrates_in_testcase_arm(self):
        zero_by_arm = np.zeros(2)
        trials = np.zeros(2)
        for seed in range(40):
            d = generate(REFERENCE_TRUTH, balanced_design(), M2_SPEC, seed=seed)
            for a in (0, 1):
                mask = d.approach == a
                zero_by_arm[a] += np.sum(d.faults[mask] == 0)
                trials[a] += mask.sum()
        overall_zero_fraction = zero_by_arm.sum() / trials.sum()
        assert overall_zero_fraction >= 0.10
        assert zero_by_arm[1] / trials[1] > 3 * (zero_by_arm[0] / trials[0])

    def test_mean_matches_regime_over_replications(self):
        # analytic mean of this generative process is ~5.5 faults; the
        # observed-data target regime (mean 4.9) sits within 15 percent
        means = [
            generate(REFERENCE_TRUTH, balanced_design(), M2_SPEC, seed=s).faults.mean()
            for s in range(200)
        ]
        grand = float(np.mean(means))
        assert abs(grand - 4.9) / 4.9 < 0.15

    def test_subject_intercepts_constant_within_subject(self):
        design = balanced_design(sessions=3)
        truth = ParameterVector(
            alpha=2.0, beta_a=0.0, beta_e=0.0, alpha_p=-60.0, beta_p=0.0,
            mu_s=0.0, sigma_s=1.5,
        )
        data = generate(truth, design, M2_SPEC, seed=7)
        assert len(data) == 105
        # strong subject effects: within-subject count variation stays
        # Poisson-like while between-subject variation is much larger
        per_subject_means = [
            data.faults[data.subject == s].mean() for s in range(35)
        ]
        assert np.var(per_subject_means) > 5 * data.faults.mean() / 3

    def test_m1_generation(self):
        truth, kind = TRUTH_PRESETS["reference-poisson"]
        data = generate(truth, balanced_design(), ModelSpec(kind=kind), seed=5)
        assert len(data) == 35
        # no zero-inflation: zero counts only where the Poisson rate allows
        expl = data.faults[data.approach == 0]
        assert expl.mean() > 4

    def test_invalid_truth(self):
        bad = ParameterVector(alpha=1.0, sigma_s=-0.5)
        with pytest.raises(DomainError):
            generate(bad, balanced_design(), M2_SPEC, seed=1)


class TestSummaryStats:
    def test_layout_and_values(self):
        data = generate(REFERENCE_TRUTH, balanced_design(), M2_SPEC, seed=21)
        rows = summary_stats(data)
        assert [r.group for r in rows] == ["low", "high", "any"]
        low, high, overall = rows
        assert low.n == 12 and high.n == 23 and overall.n == 35
        assert overall.min == int(data.faults.min())
        assert overall.max == int(data.faults.max())
        assert overall.mean == pytest.approx(float(data.faults.mean()))
        assert overall.sd == pytest.approx(float(data.faults.std(ddof=1)))

    def test_single_observation_sd_sentinel(self):
        from faultcast.model import Dataset, Observation

        data = Dataset((Observation(0, 0, 0, 4),), 1)
        low, high, overall = summary_stats(data)
        assert overall.median == overall.mean == overall.min == overall.max == 4
        assert math.isnan(overall.sd)
        assert high.n == 0

    def test_permutation_invariant(self):
        from faultcast.model import Dataset

        data = generate(REFERENCE_TRUTH, balanced_design(), M2_SPEC, seed=22)
        perm = np.random.default_rng(0).permutation(len(data))
        shuffled = Dataset(tuple(data.observations[i] for i in perm), data.n_subjects)
        assert summary_stats(data) == summary_stats(shuffled)
