"""Log-densities and random draws for the distribution families the count models use.

Every log-density works on scalars or numpy arrays and returns the same shape.
All of them are pure functions; random draws go through an explicitly passed
``numpy.random.Generator`` so that every caller owns its stream.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
LOG_TWO_OVER_PI = math.log(2.0 / math.pi)


def _as_array(x):
    return np.asarray(x, dtype=float)


def _match(value, *templates):
    """Return a python float when every input was scalar, else the array."""
    if all(np.ndim(t) == 0 for t in templates):
        return float(value)
    return value


def poisson_logpmf(k, lam):
    """log P(K = k) for K ~ Poisson(lam).

    Computed as k*log(lam) - lam - lgamma(k+1); stable far beyond the range
    where factorials overflow.
    """
    karr = _as_array(k)
    lam_arr = _as_array(lam)
    if np.any(~np.isfinite(lam_arr)) or np.any(lam_arr <= 0.0):
        raise DomainError("Poisson rate must be finite and positive")
    if np.any(karr < 0) or np.any(karr != np.floor(karr)):
        raise DomainError("Poisson count must be a nonnegative integer")
    out = karr * np.log(lam_arr) - lam_arr - gammaln(karr + 1.0)
    return _match(out, k, lam)


def zip_logpmf(k, lam, p):
    """Zero-inflated Poisson log-pmf.

    A draw is zero with probability p, otherwise Poisson(lam).  The k = 0
    branch is log(p + (1-p)*exp(-lam)), evaluated with log-sum-exp so it does
    not underflow for large lam.  p = 1 with k > 0 yields -inf (log of an
    impossible event), not an error.
    """
    karr = _as_array(k)
    lam_arr = _as_array(lam)
    parr = _as_array(p)
    if np.any(~np.isfinite(lam_arr)) or np.any(lam_arr <= 0.0):
        raise DomainError("Poisson rate must be finite and positive")
    if np.any(parr < 0.0) or np.any(parr > 1.0) or np.any(~np.isfinite(parr)):
        raise DomainError("zero-inflation probability must lie in [0, 1]")
    if np.any(karr < 0) or np.any(karr != np.floor(karr)):
        raise DomainError("count must be a nonnegative integer")
    with np.errstate(divide="ignore"):
        log_p = np.log(parr)
        log_q = np.log1p(-parr)
    zero_branch = np.logaddexp(log_p, log_q - lam_arr)
    pois = karr * np.log(lam_arr) - lam_arr - gammaln(karr + 1.0)
    positive_branch = log_q + pois
    out = np.where(karr == 0, zero_branch, positive_branch)
    return _match(out, k, lam, p)


def normal_logpdf(x, mu, sigma):
    """Gaussian log-density: -log(sigma) - log(2*pi)/2 - ((x-mu)/sigma)^2 / 2."""
    sig = _as_array(sigma)
    if np.any(sig <= 0.0) or np.any(~np.isfinite(sig)):
        raise DomainError("normal sigma must be finite and positive")
    xarr = _as_array(x)
    mu_arr = _as_array(mu)
    zed = (xarr - mu_arr) / sig
    out = -np.log(sig) - HALF_LOG_TWO_PI - 0.5 * zed * zed
    return _match(out, x, mu, sigma)


def half_cauchy_logpdf(x, scale):
    """Half-Cauchy log-density on x >= 0: log(2/(pi*scale)) - log1p((x/scale)^2)."""
    sarr = _as_array(scale)
    if np.any(sarr <= 0.0) or np.any(~np.isfinite(sarr)):
        raise DomainError("half-Cauchy scale must be finite and positive")
    xarr = _as_array(x)
    if np.any(xarr < 0.0):
        raise DomainError("half-Cauchy support is the nonnegative reals")
    ratio = xarr / sarr
    out = LOG_TWO_OVER_PI - np.log(sarr) - np.log1p(ratio * ratio)
    return _match(out, x, scale)


def inv_logit(x):
    """Logistic function 1/(1+exp(-x)), branch-split so neither tail overflows."""
    xarr = _as_array(x)
    out = np.empty_like(xarr)
    pos = xarr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-xarr[pos]))
    ex = np.exp(xarr[~pos])
    out[~pos] = ex / (1.0 + ex)
    return _match(out, x)


def logit(p):
    """Inverse of inv_logit; defined on the open interval (0, 1)."""
    parr = _as_array(p)
    if np.any(parr <= 0.0) or np.any(parr >= 1.0):
        raise DomainError("logit argument must lie strictly inside (0, 1)")
    out = np.log(parr) - np.log1p(-parr)
    return _match(out, p)


def sample_poisson(lam, rng, size=None):
    if not np.all(np.isfinite(lam)) or np.any(_as_array(lam) <= 0):
        raise DomainError("Poisson rate must be finite and positive")
    return rng.poisson(lam, size=size)


def sample_zip(lam, p, rng, size=None):
    """Zero-inflated Poisson draws: a Bernoulli(p) zero-mask over Poisson(lam)."""
    if not np.all(np.isfinite(lam)) or np.any(_as_array(lam) <= 0):
        raise DomainError("Poisson rate must be finite and positive")
    parr = _as_array(p)
    if np.any(parr < 0) or np.any(parr > 1):
        raise DomainError("zero-inflation probability must lie in [0, 1]")
    counts = rng.poisson(lam, size=size)
    inflated = rng.random(size=np.shape(counts)) < p
    return np.where(inflated, 0, counts)


def sample_normal(mu, sigma, rng, size=None):
    if np.any(_as_array(sigma) <= 0):
        raise DomainError("normal sigma must be positive")
    return rng.normal(mu, sigma, size=size)


def sample_half_cauchy(scale, rng, size=None):
    if np.any(_as_array(scale) <= 0):
        raise DomainError("half-Cauchy scale must be positive")
    return np.abs(scale * rng.standard_cauchy(size=size))


def sample_bernoulli(p, rng, size=None):
    parr = _as_array(p)
    if np.any(parr < 0) or np.any(parr > 1):
        raise DomainError("Bernoulli probability must lie in [0, 1]")
    out = (np.asarray(rng.random(size=size)) < p).astype(int)
    return int(out) if out.ndim == 0 else out


def sample_uniform(lo, hi, rng, size=None):
    if np.any(_as_array(hi) <= _as_array(lo)):
        raise DomainError("uniform upper bound must exceed the lower bound")
    return rng.uniform(lo, hi, size=size)


_FAMILIES = {
    "poisson": sample_poisson,
    "zip": sample_zip,
    "normal": sample_normal,
    "half_cauchy": sample_half_cauchy,
    "bernoulli": sample_bernoulli,
    "uniform": sample_uniform,
}


def sample(family, params, rng, size=None):
    """Draw from a named family.

    ``family`` is one of poisson, zip, normal, half_cauchy, bernoulli,
    uniform; ``params`` is the tuple of that family's parameters.
    Deterministic given the generator's state.
    """
    try:
        fn = _FAMILIES[family]
    except KeyError:
        raise DomainError(f"unknown distribution family: {family!r}") from None
    return fn(*params, rng, size=size)
