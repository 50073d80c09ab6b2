import math

import numpy as np
import pytest
import scipy.stats as st

from faultcast.errors import InputError
from faultcast.model import ModelSpec, log_likelihood, unpack
from faultcast.model_compare import (
    LogLikMatrix,
    compare,
    fit_generalized_pareto,
    format_comparison,
    pointwise_loglik,
    psis_loo,
    waic,
)
from faultcast.posterior import fit
from faultcast.sampler import SamplerConfig
from faultcast.synthetic import TRUTH_PRESETS, balanced_design, generate


def toy_ll(rows):
    return LogLikMatrix(values=np.asarray(rows, dtype=float), label="toy")


class TestLogLikMatrix:
    def test_rejects_nonfinite(self):
        with pytest.raises(InputError):
            toy_ll([[0.0, -math.inf]])

    def test_rejects_wrong_shape(self):
        with pytest.raises(InputError):
            LogLikMatrix(values=np.zeros(5))


class TestWaic:
    def test_zero_variance(self):
        ll = toy_ll([[-1.2, -0.7], [-1.2, -0.7]])
        res = waic(ll)
        assert res.p_eff == pytest.approx(0.0, abs=1e-12)
        assert res.elpd == pytest.approx(-1.9, abs=1e-12)

    def test_hand_computed_single_observation(self):
        ll = toy_ll([[math.log(0.2)], [math.log(0.4)]])
        res = waic(ll)
        lppd = math.log(0.3)
        penalty = np.var([math.log(0.2), math.log(0.4)], ddof=1)
        assert res.elpd == pytest.approx(lppd - penalty, abs=1e-12)
        assert res.p_eff == pytest.approx(penalty, abs=1e-12)

    def test_elpd_never_exceeds_lppd(self):
        rng = np.random.default_rng(0)
        ll = toy_ll(rng.normal(-2, 0.5, size=(200, 30)))
        res = waic(ll)
        lppd_total = 0.0
        for i in range(30):
            col = ll.values[:, i]
            lppd_total += np.log(np.mean(np.exp(col)))
        assert res.elpd <= lppd_total + 1e-9

    def test_draw_permutation_invariant(self):
        rng = np.random.default_rng(1)
        values = rng.normal(-2, 0.5, size=(500, 10))
        a = waic(toy_ll(values))
        b = waic(toy_ll(values[rng.permutation(500)]))
        assert a.elpd == pytest.approx(b.elpd, abs=1e-10)

    def test_needs_two_draws(self):
        with pytest.raises(InputError):
            waic(toy_ll([[0.0]]))


class TestGeneralizedPareto:
    def test_recovers_positive_shape(self):
        rng = np.random.default_rng(7)
        x = st.genpareto.rvs(0.3, scale=1.0, size=2000, random_state=rng)
        k, sigma = fit_generalized_pareto(x)
        assert 0.2 < k < 0.4
        assert sigma > 0

    def test_exponential_is_shape_zero(self):
        rng = np.random.default_rng(8)
        x = rng.exponential(scale=2.0, size=2000)
        k, sigma = fit_generalized_pareto(x)
        assert -0.1 < k < 0.1
        assert abs(sigma - 2.0) < 0.3

    def test_degenerate_flag(self):
        k, sigma = fit_generalized_pareto(np.ones(50))
        assert math.isnan(k) and math.isnan(sigma)

    def test_needs_five_points(self):
        with pytest.raises(InputError):
            fit_generalized_pareto([1.0, 2.0, 3.0, 4.0])


class TestPsisLoo:
    def test_constant_ll(self):
        values = np.tile([-1.3, -0.4, -2.2], (150, 1))
        res = psis_loo(LogLikMatrix(values=values, label="const"))
        assert res.elpd == pytest.approx(values[0].sum(), abs=1e-9)
        assert np.all(np.isnan(res.pareto_k))

    def test_needs_draws(self):
        with pytest.raises(InputError):
            psis_loo(toy_ll(np.zeros((50, 3))))

    def test_well_specified_normal_toy(self):
        # conjugate normal toy model: draws from the true posterior, so all
        # k should be small and LOO should agree with WAIC
        rng = np.random.default_rng(9)
        sigma = 1.0
        y = rng.normal(0.7, sigma, size=25)
        post_mean = y.mean()
        post_sd = sigma / math.sqrt(y.size)
        mu_draws = rng.normal(post_mean, post_sd, size=4000)
        values = st.norm.logpdf(y[None, :], mu_draws[:, None], sigma)
        ll = LogLikMatrix(values=values, label="toy-normal")
        loo_res = psis_loo(ll)
        waic_res = waic(ll)
        with np.errstate(invalid="ignore"):
            assert np.all(loo_res.pareto_k[~np.isnan(loo_res.pareto_k)] < 0.5)
        assert abs(loo_res.elpd - waic_res.elpd) < 2 * loo_res.se

    def test_influential_observation_flagged(self):
        # one observation whose likelihood varies wildly across draws makes
        # the importance ratios heavy-tailed
        rng = np.random.default_rng(10)
        values = rng.normal(-1.0, 0.1, size=(2000, 8))
        heavy = -np.abs(st.cauchy.rvs(size=2000, random_state=rng)) * 3.0
        values[:, 4] = heavy
        with pytest.warns(UserWarning, match="Pareto k"):
            res = psis_loo(LogLikMatrix(values=values, label="heavy"))
        assert res.pareto_k[4] > 0.7
        assert res.n_high_k >= 1

    def test_weights_are_probability_vector(self):
        from faultcast.model_compare import _smooth_one

        rng = np.random.default_rng(11)
        log_ratios = rng.normal(size=3000) * 2.0
        log_w, k = _smooth_one(log_ratios)
        w = np.exp(log_w)
        assert w.min() >= 0
        assert w.sum() == pytest.approx(1.0, abs=1e-9)
        # smoothing never increases the largest raw weight
        raw = np.exp(log_ratios - log_ratios.max())
        raw /= raw.sum()
        assert w.max() <= raw.max() + 1e-12

    def test_draw_permutation_invariant(self):
        rng = np.random.default_rng(12)
        values = rng.normal(-2, 1.0, size=(1000, 6))
        a = psis_loo(toy_ll(values))
        b = psis_loo(toy_ll(values[rng.permutation(1000)]))
        assert a.elpd == pytest.approx(b.elpd, abs=1e-9)
        assert np.allclose(a.pareto_k, b.pareto_k, equal_nan=True)


class TestCompare:
    def test_self_comparison(self):
        rng = np.random.default_rng(13)
        values = rng.normal(-2, 0.8, size=(500, 12))
        result = compare([("a", toy_ll(values)), ("b", toy_ll(values.copy()))])
        worse = result.entries[1]
        assert worse.elpd_diff == pytest.approx(0.0, abs=1e-12)
        assert worse.diff_se == pytest.approx(0.0, abs=1e-12)

    def test_mismatched_observations(self):
        rng = np.random.default_rng(14)
        with pytest.raises(InputError):
            compare(
                [
                    ("a", toy_ll(rng.normal(size=(200, 5)))),
                    ("b", toy_ll(rng.normal(size=(200, 6)))),
                ]
            )

    def test_format_runs(self):
        rng = np.random.default_rng(15)
        result = compare(
            [
                ("good", toy_ll(rng.normal(-1, 0.5, size=(300, 9)))),
                ("bad", toy_ll(rng.normal(-3, 0.5, size=(300, 9)))),
            ]
        )
        assert result.best == "good"
        text = format_comparison(result)
        assert "good" in text and "bad" in text


@pytest.fixture(scope="module")
def fitted():
    truth, kind = TRUTH_PRESETS["reference"]
    spec = ModelSpec(kind=kind)
    data = generate(truth, balanced_design(), spec, seed=5)
    config = SamplerConfig(seed=11, chains=2, warmup=300, draws=200)
    return fit(data, spec, config), data, spec


class TestPointwiseLoglik:
    def test_matches_reference_rows(self, fitted):
        post, data, spec = fitted
        ll = pointwise_loglik(post, data)
        flat = post.draws.samples.reshape(-1, post.draws.samples.shape[2])
        for row in (0, 57, 311):
            params = unpack(flat[row], spec, data.n_subjects)
            _, per = log_likelihood(params, data, spec)
            assert np.allclose(ll.values[row], per, atol=1e-10)

    def test_m1_shape(self, fitted):
        _, data, _ = fitted
        truth1, kind1 = TRUTH_PRESETS["reference-poisson"]
        spec1 = ModelSpec(kind=kind1)
        post1 = fit(data, spec1, SamplerConfig(seed=12, chains=2, warmup=300, draws=200))
        ll = pointwise_loglik(post1, data)
        assert ll.values.shape == (400, len(data))


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_zero_inflated_model_ranks_first_on_its_own_data():
    # one replication of the headline direction: data generated by the
    # zero-inflated varying-effects model favors it out of sample
    truth, kind = TRUTH_PRESETS["reference"]
    spec2 = ModelSpec(kind=kind)
    spec1 = ModelSpec(kind="m1")
    data = generate(truth, balanced_design(), spec2, seed=2)
    cfg = dict(chains=2, warmup=500, draws=500)
    post2 = fit(data, spec2, SamplerConfig(seed=31, **cfg))
    post1 = fit(data, spec1, SamplerConfig(seed=32, **cfg))
    ll2 = pointwise_loglik(post2, data, "m2")
    ll1 = pointwise_loglik(post1, data, "m1")
    result = compare([("m1", ll1), ("m2", ll2)])
    assert result.best == "m2"
    assert result.entries[1].elpd_diff > 0
    assert waic(ll2).elpd > waic(ll1).elpd
