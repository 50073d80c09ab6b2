"""The two fault-count regression models.

M1 is a Poisson regression with a log-linear rate in two binary predictors
(testing approach and tester experience).  M2 extends it with a zero-inflation
probability driven by the approach indicator, and a per-subject intercept
drawn from a shared hyper-distribution.  Subject intercepts use the
non-centered form ``mu_s + sigma_s * z`` with standard-normal z, which keeps
the geometry benign when sigma_s is small.

The module evaluates unnormalized log-posteriors; nothing here samples.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .distributions import (
    half_cauchy_logpdf,
    inv_logit,
    normal_logpdf,
    poisson_logpmf,
    zip_logpmf,
)
from .errors import InputError

M1 = "m1"
M2 = "m2"

LINK_LOGIT = "logit"
LINK_LOG = "log"

# keeps exp(eta) strictly inside the positive finite floats so that extreme
# proposals score astronomically badly instead of crashing
_RATE_FLOOR = 1e-300
_RATE_CEIL = 1e300


@dataclass(frozen=True)
class Observation:
    """One testing trial: who tested, how, and how many faults they found."""

    subject: int
    approach: int
    experience: int
    faults: int

    def __post_init__(self):
        if self.approach not in (0, 1):
            raise InputError(f"approach must be 0 or 1, got {self.approach}")
        if self.experience not in (0, 1):
            raise InputError(f"experience must be 0 or 1, got {self.experience}")
        if self.faults < 0 or int(self.faults) != self.faults:
            raise InputError(f"faults must be a nonnegative integer, got {self.faults}")
        if self.subject < 0:
            raise InputError(f"subject id must be nonnegative, got {self.subject}")


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of observations over ``n_subjects`` distinct testers."""

    observations: tuple
    n_subjects: int
    subject: np.ndarray = field(init=False, repr=False, compare=False)
    approach: np.ndarray = field(init=False, repr=False, compare=False)
    experience: np.ndarray = field(init=False, repr=False, compare=False)
    faults: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        obs = tuple(self.observations)
        if not obs:
            raise InputError("dataset must contain at least one observation")
        if self.n_subjects < 1 or self.n_subjects > len(obs):
            raise InputError(
                "n_subjects must be in [1, number of observations], "
                f"got {self.n_subjects} for {len(obs)} observations"
            )
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "subject", np.array([o.subject for o in obs], dtype=int))
        object.__setattr__(self, "approach", np.array([o.approach for o in obs], dtype=int))
        object.__setattr__(self, "experience", np.array([o.experience for o in obs], dtype=int))
        object.__setattr__(self, "faults", np.array([o.faults for o in obs], dtype=int))
        if self.subject.max() >= self.n_subjects:
            raise InputError(
                f"subject id {self.subject.max()} out of range for "
                f"n_subjects={self.n_subjects}"
            )

    def __len__(self):
        return len(self.observations)

    def fingerprint(self) -> str:
        """Stable content hash used to tie fitted draws back to their data."""
        payload = "\n".join(
            f"{o.subject},{o.approach},{o.experience},{o.faults}"
            for o in self.observations
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def experience_proportions(self) -> tuple[float, float]:
        """(share with experience=0, share with experience=1)."""
        hi = float(np.mean(self.experience))
        return 1.0 - hi, hi

    def approach_proportions(self) -> tuple[float, float]:
        a1 = float(np.mean(self.approach))
        return 1.0 - a1, a1


@dataclass
class ParameterVector:
    """One point in parameter space.

    The M2-only fields are ignored under M1, so a vector built for M2 scores
    identically under M1 regardless of their values.
    """

    alpha: float
    beta_a: float = 0.0
    beta_e: float = 0.0
    alpha_p: float = 0.0
    beta_p: float = 0.0
    mu_s: float = 0.0
    sigma_s: float = 1.0
    z_subjects: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.z_subjects = np.asarray(self.z_subjects, dtype=float)


@dataclass(frozen=True)
class ModelSpec:
    """Which model to evaluate and with what prior scales / links."""

    kind: str = M2
    prior_scale: float = 1.5
    sigma_s_scale: float = 1.0
    zi_link: str = LINK_LOGIT

    def __post_init__(self):
        if self.kind not in (M1, M2):
            raise InputError(f"model kind must be {M1!r} or {M2!r}, got {self.kind!r}")
        if self.prior_scale <= 0 or self.sigma_s_scale <= 0:
            raise InputError("prior scales must be positive")
        if self.zi_link not in (LINK_LOGIT, LINK_LOG):
            raise InputError(f"zi_link must be 'logit' or 'log', got {self.zi_link!r}")

    def dim(self, n_subjects: int) -> int:
        return 3 if self.kind == M1 else 7 + n_subjects

    def param_names(self, n_subjects: int) -> tuple[str, ...]:
        base = ("alpha", "beta_a", "beta_e")
        if self.kind == M1:
            return base
        return base + ("alpha_p", "beta_p", "mu_s", "sigma_s") + tuple(
            f"z_{i}" for i in range(n_subjects)
        )


def _zero_inflation(params: ParameterVector, approach, spec: ModelSpec):
    eta = params.alpha_p + params.beta_p * np.asarray(approach, dtype=float)
    if spec.zi_link == LINK_LOGIT:
        return inv_logit(eta)
    with np.errstate(over="ignore"):
        return np.exp(eta)


def _rates(params: ParameterVector, approach, experience, subject, spec: ModelSpec):
    eta = (
        params.alpha
        + params.beta_a * np.asarray(approach, dtype=float)
        + params.beta_e * np.asarray(experience, dtype=float)
    )
    if spec.kind == M2:
        offsets = params.mu_s + params.sigma_s * params.z_subjects
        eta = eta + offsets[np.asarray(subject, dtype=int)]
    with np.errstate(over="ignore"):
        return np.clip(np.exp(eta), _RATE_FLOOR, _RATE_CEIL)


def linear_predictors(params: ParameterVector, obs: Observation, spec: ModelSpec):
    """(rate, zero-inflation probability) for a single observation.

    Under M1 the zero-inflation probability is identically 0.
    """
    lam = float(_rates(params, obs.approach, obs.experience, obs.subject, spec))
    if spec.kind == M1:
        return lam, 0.0
    return lam, float(_zero_inflation(params, obs.approach, spec))


def log_likelihood(params: ParameterVector, data: Dataset, spec: ModelSpec):
    """(total, per-observation vector) of log-likelihood values.

    The per-observation vector is what model comparison consumes.  Parameter
    values that take the model outside its valid region (a log-link p above 1)
    yield -inf rather than raising, so samplers can propose freely.
    """
    if spec.kind == M2 and len(params.z_subjects) < data.n_subjects:
        raise InputError(
            f"parameter vector has {len(params.z_subjects)} subject offsets, "
            f"dataset needs {data.n_subjects}"
        )
    lam = _rates(params, data.approach, data.experience, data.subject, spec)
    if spec.kind == M1:
        per = poisson_logpmf(data.faults, lam)
    else:
        p = _zero_inflation(params, data.approach, spec)
        if np.any(p > 1.0):
            per = np.full(len(data), -math.inf)
            return -math.inf, per
        per = zip_logpmf(data.faults, lam, p)
    total = float(np.sum(per))
    return total, per


def log_prior(params: ParameterVector, spec: ModelSpec) -> float:
    """Sum of the weakly-informative prior log-densities.

    Returns -inf (not an error) for sigma_s outside its support, so a sampler
    proposal there is simply rejected.
    """
    scale = spec.prior_scale
    total = float(
        normal_logpdf(params.alpha, 0.0, scale)
        + normal_logpdf(params.beta_a, 0.0, scale)
        + normal_logpdf(params.beta_e, 0.0, scale)
    )
    if spec.kind == M1:
        return total
    if not np.isfinite(params.sigma_s) or params.sigma_s <= 0:
        return -math.inf
    total += float(
        normal_logpdf(params.alpha_p, 0.0, scale)
        + normal_logpdf(params.beta_p, 0.0, scale)
        + normal_logpdf(params.mu_s, 0.0, scale)
        + half_cauchy_logpdf(params.sigma_s, spec.sigma_s_scale)
    )
    if len(params.z_subjects):
        total += float(np.sum(normal_logpdf(params.z_subjects, 0.0, 1.0)))
    return total


def log_posterior(params: ParameterVector, data: Dataset, spec: ModelSpec) -> float:
    """Unnormalized log-posterior: log_prior + total log-likelihood."""
    lp = log_prior(params, spec)
    if lp == -math.inf:
        return -math.inf
    ll, _ = log_likelihood(params, data, spec)
    return lp + ll


# ---------------------------------------------------------------------------
# sampler bridge: flat vectors on an unconstrained scale
# ---------------------------------------------------------------------------

SIGMA_INDEX = 6  # position of log(sigma_s) in the unconstrained M2 layout
ALPHA_INDEX = 0
MU_S_INDEX = 5
_ROOT2 = math.sqrt(2.0)

# The likelihood sees alpha and mu_s only through their sum, which makes the
# pair a near-perfect ridge in natural coordinates.  The sampler therefore
# works in the rotated basis ((alpha+mu_s)/sqrt2, (alpha-mu_s)/sqrt2): the iid
# normal prior is rotation-invariant, the rotation has unit Jacobian, and the
# two rotated coordinates are almost independent in the posterior.


def unpack(vec: np.ndarray, spec: ModelSpec, n_subjects: int) -> ParameterVector:
    """Natural-scale vector -> ParameterVector (sigma_s stored as-is)."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (spec.dim(n_subjects),):
        raise InputError(
            f"expected vector of length {spec.dim(n_subjects)}, got {vec.shape}"
        )
    if spec.kind == M1:
        return ParameterVector(alpha=vec[0], beta_a=vec[1], beta_e=vec[2])
    return ParameterVector(
        alpha=vec[0],
        beta_a=vec[1],
        beta_e=vec[2],
        alpha_p=vec[3],
        beta_p=vec[4],
        mu_s=vec[5],
        sigma_s=vec[6],
        z_subjects=vec[7:].copy(),
    )


def pack(params: ParameterVector, spec: ModelSpec, n_subjects: int) -> np.ndarray:
    if spec.kind == M1:
        return np.array([params.alpha, params.beta_a, params.beta_e], dtype=float)
    if len(params.z_subjects) != n_subjects:
        raise InputError("z_subjects length does not match n_subjects")
    head = [
        params.alpha,
        params.beta_a,
        params.beta_e,
        params.alpha_p,
        params.beta_p,
        params.mu_s,
        params.sigma_s,
    ]
    return np.concatenate([np.asarray(head, dtype=float), params.z_subjects])


def constrain(u: np.ndarray, spec: ModelSpec) -> np.ndarray:
    """Sampler coordinates -> natural scale.

    Undoes the (alpha, mu_s) rotation and exponentiates log(sigma_s).
    """
    x = np.array(u, dtype=float, copy=True)
    if spec.kind == M2:
        s, d = u[ALPHA_INDEX], u[MU_S_INDEX]
        x[ALPHA_INDEX] = (s + d) / _ROOT2
        x[MU_S_INDEX] = (s - d) / _ROOT2
        x[SIGMA_INDEX] = math.exp(x[SIGMA_INDEX])
    return x


def build_target(data: Dataset, spec: ModelSpec):
    """Compile the unconstrained log-posterior for a dataset.

    Returns ``(logp, dim, names)`` where ``logp`` maps a flat sampler vector
    (sigma_s on the log scale with its Jacobian term, (alpha, mu_s) rotated)
    to the unnormalized posterior log-density.  The heavy lifting happens in
    a jit-compiled kernel; the test suite checks it against
    :func:`log_posterior` on random points.
    """
    from . import _kernels  # deferred: pulls in the compiler

    approach = data.approach.astype(float)
    experience = data.experience.astype(float)
    subject = data.subject.astype(np.int64)
    faults = data.faults.astype(float)
    lgamma_faults = gammaln(faults + 1.0)
    n_subjects = data.n_subjects
    dim = spec.dim(n_subjects)

    if spec.kind == M1:

        def logp(u):
            return _kernels.m1_logp(
                np.asarray(u, dtype=float),
                approach,
                experience,
                faults,
                lgamma_faults,
                spec.prior_scale,
            )

        return logp, dim, spec.param_names(n_subjects)

    logit_link = spec.zi_link == LINK_LOGIT

    def logp(u):
        return _kernels.m2_logp(
            np.asarray(u, dtype=float),
            approach,
            experience,
            subject,
            faults,
            lgamma_faults,
            spec.prior_scale,
            spec.sigma_s_scale,
            logit_link,
        )

    return logp, dim, spec.param_names(n_subjects)


def initial_point(spec: ModelSpec, n_subjects: int, rng) -> np.ndarray:
    """Overdispersed start inside the prior bulk, on the unconstrained scale."""
    if spec.kind == M1:
        return rng.uniform(-2.0, 2.0, size=3)
    head = rng.uniform(-2.0, 2.0, size=6)
    log_sigma = rng.uniform(-2.0, 0.0)
    z = rng.normal(0.0, 0.1, size=n_subjects)
    return np.concatenate([head, [log_sigma], z])
