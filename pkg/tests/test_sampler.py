import math

import numpy as np
import pytest

from faultcast.errors import EvaluationError, InitializationError, InputError
from faultcast.sampler import (
    BlockSpec,
    Draws,
    SamplerConfig,
    ess_bulk,
    run_mcmc,
    split_rhat,
)


def std_normal(x):
    return -0.5 * float(x @ x)


def make_draws(array):
    array = np.asarray(array, dtype=float)
    if array.ndim == 2:
        array = array[:, :, None]
    return Draws(samples=array, names=tuple(f"p{i}" for i in range(array.shape[2])))


class TestRunMcmc:
    def test_standard_normal_moments(self):
        config = SamplerConfig(seed=101, chains=4, warmup=1000, draws=2000)
        draws = run_mcmc(std_normal, 1, config)
        assert draws.samples.shape == (4, 2000, 1)
        pooled = draws.pooled(0)
        assert -0.05 < pooled.mean() < 0.05
        assert 0.95 < pooled.std(ddof=1) < 1.05

    def test_5d_gaussian_means(self):
        def target(x):
            return -0.125 * float((x - 3.0) @ (x - 3.0))  # Normal(3, 2) iid

        config = SamplerConfig(seed=202, chains=4, warmup=1500, draws=4000)
        blocks = [BlockSpec(indices=tuple(range(5)), refreshes=3)]
        draws = run_mcmc(target, 5, config, blocks=blocks)
        means = draws.samples.reshape(-1, 5).mean(axis=0)
        assert np.all(np.abs(means - 3.0) < 0.1)

    def test_deterministic_given_seed(self):
        config = SamplerConfig(seed=7, chains=2, warmup=200, draws=300)
        a = run_mcmc(std_normal, 1, config)
        b = run_mcmc(std_normal, 1, config)
        assert np.array_equal(a.samples, b.samples)
        assert np.array_equal(a.acceptance, b.acceptance)

    def test_different_seeds_differ_but_both_mix(self):
        for seed in (11, 12):
            config = SamplerConfig(seed=seed, chains=4, warmup=800, draws=1000)
            draws = run_mcmc(std_normal, 1, config)
            assert split_rhat(draws, 0) < 1.01

    def test_retained_count_exact_and_finite(self):
        config = SamplerConfig(seed=3, chains=3, warmup=50, draws=77)
        draws = run_mcmc(std_normal, 1, config)
        assert draws.samples.shape == (3, 77, 1)
        assert np.all(np.isfinite(draws.samples))

    def test_initialization_failure(self):
        config = SamplerConfig(seed=1, chains=1, warmup=10, draws=10)
        with pytest.raises(InitializationError):
            run_mcmc(lambda x: -math.inf, 2, config)

    def test_nan_target_reports_point(self):
        def bad(x):
            return math.nan

        config = SamplerConfig(seed=1, chains=1, warmup=10, draws=10)
        with pytest.raises(EvaluationError):
            run_mcmc(bad, 2, config)

    def test_block_validation(self):
        config = SamplerConfig(seed=1)
        with pytest.raises(InputError):
            run_mcmc(std_normal, 2, config, blocks=[BlockSpec(indices=(0,))])
        with pytest.raises(InputError):
            run_mcmc(std_normal, 2, config, blocks=[BlockSpec(indices=(0, 5))])
        with pytest.raises(InputError):
            BlockSpec(indices=(0,), adapt="scale")

    def test_scale_move_preserves_target(self):
        # iid standard normal target; a wrong scaling-move Jacobian would
        # visibly skew the log-scale coordinate's marginal
        dim = 6
        blocks = [
            BlockSpec(indices=tuple(range(dim)), adapt="full"),
            BlockSpec(indices=(0, 1, 2, 3, 4, 5), adapt="scale", refreshes=4),
        ]
        config = SamplerConfig(seed=1234, chains=4, warmup=1000, draws=4000)
        draws = run_mcmc(std_normal, dim, config, blocks=blocks)
        flat = draws.samples.reshape(-1, dim)
        assert np.all(np.abs(flat.mean(axis=0)) < 0.08)
        assert np.all(np.abs(flat.std(axis=0, ddof=1) - 1.0) < 0.05)

    def test_acceptance_near_target(self):
        config = SamplerConfig(seed=404, chains=2, warmup=1500, draws=1500)
        draws = run_mcmc(std_normal, 1, config)
        assert np.all(np.abs(draws.acceptance - 0.30) < 0.1)


class TestSplitRhat:
    def test_iid_chains(self):
        rng = np.random.default_rng(0)
        draws = make_draws(rng.standard_normal((4, 1000)))
        assert 0.99 < split_rhat(draws, 0) < 1.01

    def test_separated_chains(self):
        rng = np.random.default_rng(1)
        base = rng.standard_normal((4, 500))
        base[2:] += 10.0
        assert split_rhat(make_draws(base), 0) > 1.2

    def test_constant_draws_sentinel(self):
        draws = make_draws(np.ones((4, 100)))
        assert math.isnan(split_rhat(draws, 0))

    def test_preconditions(self):
        rng = np.random.default_rng(2)
        with pytest.raises(InputError):
            split_rhat(make_draws(rng.standard_normal((1, 100))), 0)
        with pytest.raises(InputError):
            split_rhat(make_draws(rng.standard_normal((4, 3))), 0)


class TestEssBulk:
    def test_iid_draws(self):
        rng = np.random.default_rng(3)
        draws = make_draws(rng.standard_normal((4, 1000)))
        assert 3200 < ess_bulk(draws, 0) < 4800

    def test_ar1_chain(self):
        # analytic ESS of AR(1): n * (1 - phi) / (1 + phi)
        rng = np.random.default_rng(4)
        phi = 0.9
        chains = np.empty((4, 1000))
        for c in range(4):
            noise = rng.standard_normal(2000) * math.sqrt(1 - phi**2)
            x = np.empty(2000)
            x[0] = rng.standard_normal()
            for t in range(1, 2000):
                x[t] = phi * x[t - 1] + noise[t]
            chains[c] = x[1000:]  # drop transient
        expected = 4000 * (1 - phi) / (1 + phi)
        estimate = ess_bulk(make_draws(chains), 0)
        assert abs(estimate - expected) / expected < 0.30

    def test_constant_chain_sentinel(self):
        draws = make_draws(np.full((4, 100), 2.5))
        assert math.isnan(ess_bulk(draws, 0))


class TestDrawsCsv:
    def test_roundtrip(self, tmp_path):
        config = SamplerConfig(seed=5, chains=2, warmup=20, draws=30)
        draws = run_mcmc(std_normal, 2, config, names=("a", "b"))
        path = tmp_path / "draws.csv"
        draws.save_csv(path)
        loaded = Draws.load_csv(path)
        assert loaded.names == ("a", "b")
        assert np.array_equal(loaded.samples, draws.samples)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("subject,approach,experience,faults\n0,0,0,1\n")
        with pytest.raises(InputError):
            Draws.load_csv(path)
