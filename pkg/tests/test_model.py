import math

import numpy as np
import pytest

from faultcast.distributions import (
    half_cauchy_logpdf,
    inv_logit,
    normal_logpdf,
    zip_logpmf,
)
from faultcast.errors import InputError
from faultcast.model import (
    M1,
    M2,
    SIGMA_INDEX,
    Dataset,
    ModelSpec,
    Observation,
    ParameterVector,
    build_target,
    constrain,
    initial_point,
    linear_predictors,
    log_likelihood,
    log_posterior,
    log_prior,
    pack,
    unpack,
)

M1_SPEC = ModelSpec(kind=M1)
M2_SPEC = ModelSpec(kind=M2)


def toy_dataset(n_subjects=6, seed=0):
    rng = np.random.default_rng(seed)
    obs = []
    for s in range(n_subjects):
        a = s % 2
        e = (s // 2) % 2
        faults = int(rng.poisson(3.0)) if a == 0 else int(rng.poisson(1.0))
        if a == 1 and rng.random() < 0.3:
            faults = 0
        obs.append(Observation(subject=s, approach=a, experience=e, faults=faults))
    return Dataset(observations=tuple(obs), n_subjects=n_subjects)


def random_m2_params(rng, n_subjects):
    return ParameterVector(
        alpha=rng.normal(),
        beta_a=rng.normal(),
        beta_e=rng.normal(),
        alpha_p=rng.normal(),
        beta_p=rng.normal(),
        mu_s=rng.normal(scale=0.5),
        sigma_s=float(np.exp(rng.normal(scale=0.5))),
        z_subjects=rng.normal(size=n_subjects),
    )


class TestTypes:
    def test_observation_validation(self):
        with pytest.raises(InputError):
            Observation(subject=0, approach=2, experience=0, faults=1)
        with pytest.raises(InputError):
            Observation(subject=0, approach=0, experience=0, faults=-1)

    def test_dataset_validation(self):
        obs = (Observation(0, 0, 0, 3),)
        with pytest.raises(InputError):
            Dataset(observations=(), n_subjects=1)
        with pytest.raises(InputError):
            Dataset(observations=obs, n_subjects=2)  # more subjects than rows
        with pytest.raises(InputError):
            Dataset(
                observations=(Observation(5, 0, 0, 1),), n_subjects=1
            )  # id out of range

    def test_fingerprint_is_content_addressed(self):
        d1 = toy_dataset(seed=1)
        d2 = toy_dataset(seed=1)
        d3 = toy_dataset(seed=2)
        assert d1.fingerprint() == d2.fingerprint()
        assert d1.fingerprint() != d3.fingerprint()

    def test_spec_dimensions(self):
        assert M1_SPEC.dim(35) == 3
        assert M2_SPEC.dim(35) == 42
        assert M2_SPEC.param_names(2) == (
            "alpha", "beta_a", "beta_e", "alpha_p", "beta_p", "mu_s", "sigma_s",
            "z_0", "z_1",
        )

    def test_spec_validation(self):
        with pytest.raises(InputError):
            ModelSpec(kind="m3")
        with pytest.raises(InputError):
            ModelSpec(zi_link="probit")


class TestLinearPredictors:
    def test_m1_constant_rate(self):
        params = ParameterVector(alpha=math.log(2.0))
        obs = Observation(0, 1, 1, 0)
        lam, p = linear_predictors(params, obs, M1_SPEC)
        assert lam == pytest.approx(2.0, abs=1e-12)
        assert p == 0.0

    def test_m2_population_part(self):
        params = ParameterVector(
            alpha=1.95, beta_a=-1.47, beta_e=0.33, sigma_s=0.29,
            z_subjects=np.zeros(1),
        )
        obs = Observation(0, 1, 1, 0)
        lam, _ = linear_predictors(params, obs, M2_SPEC)
        assert lam == pytest.approx(math.exp(0.81), rel=1e-12)

    def test_m2_inflation_probability(self):
        params = ParameterVector(
            alpha=0.0, alpha_p=-4.61, beta_p=3.39, z_subjects=np.zeros(1)
        )
        obs = Observation(0, 1, 0, 0)
        _, p = linear_predictors(params, obs, M2_SPEC)
        assert p == pytest.approx(inv_logit(-1.22), abs=1e-12)

    def test_subject_offset_noncentered(self):
        params = ParameterVector(
            alpha=0.5, mu_s=0.2, sigma_s=0.4, z_subjects=np.array([1.5, -0.5])
        )
        lam0, _ = linear_predictors(params, Observation(0, 0, 0, 0), M2_SPEC)
        lam1, _ = linear_predictors(params, Observation(1, 0, 0, 0), M2_SPEC)
        assert lam0 == pytest.approx(math.exp(0.5 + 0.2 + 0.4 * 1.5), rel=1e-12)
        assert lam1 == pytest.approx(math.exp(0.5 + 0.2 - 0.4 * 0.5), rel=1e-12)


class TestLogLikelihood:
    def test_single_observation_matches_poisson(self):
        data = Dataset((Observation(0, 0, 0, 3),), 1)
        params = ParameterVector(alpha=math.log(2.0))
        total, per = log_likelihood(params, data, M1_SPEC)
        assert total == pytest.approx(3 * math.log(2) - 2 - math.log(6), abs=1e-12)
        assert per.shape == (1,)

    def test_certain_zero_contributes_nothing(self):
        # alpha_p large enough that inv_logit saturates to exactly 1.0
        data = Dataset((Observation(0, 1, 0, 0), Observation(1, 1, 1, 0)), 2)
        params = ParameterVector(
            alpha=1.0, alpha_p=60.0, beta_p=0.0, sigma_s=0.1, z_subjects=np.zeros(2)
        )
        total, per = log_likelihood(params, data, M2_SPEC)
        assert np.all(per == 0.0)
        assert total == 0.0

    def test_total_is_sum(self):
        data = toy_dataset()
        rng = np.random.default_rng(3)
        for _ in range(20):
            params = random_m2_params(rng, data.n_subjects)
            total, per = log_likelihood(params, data, M2_SPEC)
            assert total == pytest.approx(np.sum(per), abs=1e-12)

    def test_permutation_invariance(self):
        data = toy_dataset(seed=5)
        perm = np.random.default_rng(0).permutation(len(data))
        shuffled = Dataset(
            tuple(data.observations[i] for i in perm), data.n_subjects
        )
        params = random_m2_params(np.random.default_rng(4), data.n_subjects)
        t1, _ = log_likelihood(params, data, M2_SPEC)
        t2, _ = log_likelihood(params, shuffled, M2_SPEC)
        assert t1 == t2  # bitwise equal totals

    def test_log_link_invalid_region_rejects(self):
        data = toy_dataset()
        spec = ModelSpec(kind=M2, zi_link="log")
        params = ParameterVector(
            alpha=1.0, alpha_p=0.5, sigma_s=0.5, z_subjects=np.zeros(data.n_subjects)
        )
        total, _ = log_likelihood(params, data, spec)
        assert total == -math.inf

    def test_m2_reduces_to_m1(self):
        data = toy_dataset(seed=7)
        base = np.random.default_rng(11).normal(size=3)
        m1_params = ParameterVector(*base)
        m2_params = ParameterVector(
            *base, alpha_p=-40.0, beta_p=0.0, mu_s=0.0, sigma_s=1e-12,
            z_subjects=np.zeros(data.n_subjects),
        )
        _, per1 = log_likelihood(m1_params, data, M1_SPEC)
        _, per2 = log_likelihood(m2_params, data, M2_SPEC)
        assert np.max(np.abs(per1 - per2)) < 1e-8


class TestLogPrior:
    def test_m1_at_origin(self):
        expected = 3 * normal_logpdf(0.0, 0.0, 1.5)
        assert log_prior(ParameterVector(0.0), M1_SPEC) == pytest.approx(
            expected, abs=1e-12
        )

    def test_m2_componentwise(self):
        params = ParameterVector(
            alpha=0.0, sigma_s=1.0, z_subjects=np.zeros(0)
        )
        expected = 6 * normal_logpdf(0.0, 0.0, 1.5) + half_cauchy_logpdf(1.0, 1.0)
        assert log_prior(params, M2_SPEC) == pytest.approx(expected, abs=1e-12)

    def test_z_terms_are_standard_normal(self):
        z = np.array([0.3, -1.2, 2.0])
        params = ParameterVector(alpha=0.0, sigma_s=1.0, z_subjects=z)
        base = ParameterVector(alpha=0.0, sigma_s=1.0, z_subjects=np.zeros(0))
        diff = log_prior(params, M2_SPEC) - log_prior(base, M2_SPEC)
        assert diff == pytest.approx(np.sum(normal_logpdf(z, 0.0, 1.0)), abs=1e-12)

    def test_sigma_outside_support(self):
        params = ParameterVector(alpha=0.0, sigma_s=-0.1)
        assert log_prior(params, M2_SPEC) == -math.inf


class TestLogPosterior:
    def test_decomposition(self):
        data = toy_dataset(seed=9)
        rng = np.random.default_rng(10)
        for _ in range(100):
            params = random_m2_params(rng, data.n_subjects)
            lp = log_posterior(params, data, M2_SPEC)
            expected = log_prior(params, M2_SPEC) + log_likelihood(
                params, data, M2_SPEC
            )[0]
            assert lp == pytest.approx(expected, abs=1e-12)

    def test_monotone_in_fit_on_alpha_slice(self):
        # grid scan: the alpha slice is unimodal, rising while the implied
        # rate approaches the data and falling beyond the mode
        data = toy_dataset(seed=13)
        alphas = np.linspace(-3.0, 4.0, 200)
        vals = np.array(
            [log_posterior(ParameterVector(alpha=a), data, M1_SPEC) for a in alphas]
        )
        peak = int(np.argmax(vals))
        assert 0 < peak < len(alphas) - 1
        assert np.all(np.diff(vals[: peak + 1]) > 0)
        assert np.all(np.diff(vals[peak:]) < 0)
        # and the mode sits near log of the sample mean
        assert abs(alphas[peak] - math.log(float(np.mean(data.faults)))) < 0.2

    def test_m1_ignores_m2_fields(self):
        data = toy_dataset(seed=2)
        a, b, c = 0.4, -0.8, 0.2
        lean = ParameterVector(a, b, c)
        loaded = ParameterVector(
            a, b, c, alpha_p=3.0, beta_p=-2.0, mu_s=5.0, sigma_s=9.0,
            z_subjects=np.ones(data.n_subjects),
        )
        assert log_posterior(lean, data, M1_SPEC) == log_posterior(
            loaded, data, M1_SPEC
        )

    def test_noncentered_matches_centered_plus_jacobian(self):
        # centered form: intercepts a_i with Normal(mu_s, sigma_s) prior;
        # non-centered form differs by exactly n*log(sigma_s)
        data = toy_dataset(seed=21)
        rng = np.random.default_rng(22)
        for _ in range(20):
            params = random_m2_params(rng, data.n_subjects)
            intercepts = params.mu_s + params.sigma_s * params.z_subjects
            assert np.allclose(
                intercepts, params.mu_s + params.sigma_s * params.z_subjects
            )
            lp_nc = log_posterior(params, data, M2_SPEC)

            # centered evaluation assembled from the same primitives
            lam = np.exp(
                params.alpha
                + params.beta_a * data.approach
                + params.beta_e * data.experience
                + intercepts[data.subject]
            )
            p = inv_logit(params.alpha_p + params.beta_p * data.approach)
            ll = np.sum(zip_logpmf(data.faults, lam, p))
            prior = (
                normal_logpdf(params.alpha, 0, 1.5)
                + normal_logpdf(params.beta_a, 0, 1.5)
                + normal_logpdf(params.beta_e, 0, 1.5)
                + normal_logpdf(params.alpha_p, 0, 1.5)
                + normal_logpdf(params.beta_p, 0, 1.5)
                + normal_logpdf(params.mu_s, 0, 1.5)
                + half_cauchy_logpdf(params.sigma_s, 1.0)
                + np.sum(normal_logpdf(intercepts, params.mu_s, params.sigma_s))
            )
            lp_centered = float(prior + ll)
            shift = data.n_subjects * math.log(params.sigma_s)
            assert lp_nc == pytest.approx(lp_centered + shift, abs=1e-9)


class TestSamplerBridge:
    def test_pack_unpack_roundtrip(self):
        rng = np.random.default_rng(30)
        params = random_m2_params(rng, 4)
        vec = pack(params, M2_SPEC, 4)
        back = unpack(vec, M2_SPEC, 4)
        assert np.array_equal(pack(back, M2_SPEC, 4), vec)

    @pytest.mark.parametrize("spec", [M1_SPEC, M2_SPEC])
    def test_target_matches_reference(self, spec):
        data = toy_dataset(seed=17)
        logp, dim, names = build_target(data, spec)
        assert dim == spec.dim(data.n_subjects)
        assert len(names) == dim
        rng = np.random.default_rng(31)
        for _ in range(50):
            u = rng.normal(size=dim)
            params = unpack(constrain(u, spec), spec, data.n_subjects)
            expected = log_posterior(params, data, spec)
            if spec.kind == M2:
                expected += u[SIGMA_INDEX]  # Jacobian of the log transform
            assert logp(u) == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_target_log_link(self):
        data = toy_dataset(seed=18)
        spec = ModelSpec(kind=M2, zi_link="log")
        logp, dim, _ = build_target(data, spec)
        u = np.zeros(dim)
        u[3] = 0.5  # alpha_p > 0 makes exp-link p exceed 1
        assert logp(u) == -math.inf
        u[3] = -2.0
        assert math.isfinite(logp(u))

    def test_initial_point_in_support(self):
        rng = np.random.default_rng(32)
        data = toy_dataset(seed=19)
        logp, dim, _ = build_target(data, M2_SPEC)
        for _ in range(20):
            u = initial_point(M2_SPEC, data.n_subjects, rng)
            assert u.shape == (dim,)
            assert math.isfinite(logp(u))
            assert -2.0 <= u[SIGMA_INDEX] <= 0.0
