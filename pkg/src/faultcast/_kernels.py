"""Compiled log-posterior kernels for the sampler's hot loop.

These mirror the reference implementation in :mod:`faultcast.model`
operation for operation; the test suite asserts agreement on random points.
Imported lazily so commands that never fit a model skip the compiler.
"""

import math

from numba import njit

_NEG_INF = float("-inf")
_ETA_CAP = 690.0  # |log rate| cap: keeps exp() finite and k*eta NaN-free


@njit(cache=True)
def _log_inv_logit(x):
    # log(1/(1+exp(-x))), stable on both tails
    if x <= 0.0:
        return x - math.log1p(math.exp(x))
    return -math.log1p(math.exp(-x))


@njit(cache=True)
def m1_logp(u, approach, experience, faults, lgamma_faults, prior_scale):
    alpha = u[0]
    beta_a = u[1]
    beta_e = u[2]
    inv_var = 1.0 / (prior_scale * prior_scale)
    out = -3.0 * (math.log(prior_scale) + 0.5 * math.log(2.0 * math.pi))
    out -= 0.5 * (alpha * alpha + beta_a * beta_a + beta_e * beta_e) * inv_var
    for i in range(faults.shape[0]):
        eta = alpha + beta_a * approach[i] + beta_e * experience[i]
        if eta > _ETA_CAP:
            eta = _ETA_CAP
        elif eta < -_ETA_CAP:
            eta = -_ETA_CAP
        out += faults[i] * eta - math.exp(eta) - lgamma_faults[i]
    return out


@njit(cache=True)
def m2_logp(
    u,
    approach,
    experience,
    subject,
    faults,
    lgamma_faults,
    prior_scale,
    sigma_s_scale,
    logit_link,
):
    # sampler coordinates: (alpha+mu_s)/sqrt2, beta_a, beta_e, alpha_p,
    # beta_p, (alpha-mu_s)/sqrt2, log sigma_s, z...
    root2 = math.sqrt(2.0)
    rot_sum = u[0]
    beta_a = u[1]
    beta_e = u[2]
    alpha_p = u[3]
    beta_p = u[4]
    rot_diff = u[5]
    log_sigma = u[6]
    alpha = (rot_sum + rot_diff) / root2
    mu_s = (rot_sum - rot_diff) / root2
    sigma_s = math.exp(log_sigma)
    if not math.isfinite(sigma_s):
        return _NEG_INF

    inv_var = 1.0 / (prior_scale * prior_scale)
    prior = -6.0 * (math.log(prior_scale) + 0.5 * math.log(2.0 * math.pi))
    prior -= 0.5 * inv_var * (
        alpha * alpha
        + beta_a * beta_a
        + beta_e * beta_e
        + alpha_p * alpha_p
        + beta_p * beta_p
        + mu_s * mu_s
    )
    ratio = sigma_s / sigma_s_scale
    prior += math.log(2.0 / (math.pi * sigma_s_scale)) - math.log1p(ratio * ratio)
    n_subjects = u.shape[0] - 7
    for j in range(n_subjects):
        z = u[7 + j]
        prior += -0.5 * math.log(2.0 * math.pi) - 0.5 * z * z
    prior += log_sigma  # Jacobian of sigma_s = exp(log_sigma)

    # zero-inflation probability per arm
    if logit_link:
        log_p0 = _log_inv_logit(alpha_p)
        log_q0 = _log_inv_logit(-alpha_p)
        log_p1 = _log_inv_logit(alpha_p + beta_p)
        log_q1 = _log_inv_logit(-alpha_p - beta_p)
    else:
        if alpha_p > 0.0 or alpha_p + beta_p > 0.0:
            return _NEG_INF  # log link: p = exp(eta) must stay within [0, 1]
        log_p0 = alpha_p
        log_q0 = math.log1p(-math.exp(alpha_p)) if alpha_p < 0.0 else _NEG_INF
        eta1 = alpha_p + beta_p
        log_p1 = eta1
        log_q1 = math.log1p(-math.exp(eta1)) if eta1 < 0.0 else _NEG_INF

    loglik = 0.0
    for i in range(faults.shape[0]):
        eta = (
            alpha
            + beta_a * approach[i]
            + beta_e * experience[i]
            + mu_s
            + sigma_s * u[7 + subject[i]]
        )
        if eta > _ETA_CAP:
            eta = _ETA_CAP
        elif eta < -_ETA_CAP:
            eta = -_ETA_CAP
        lam = math.exp(eta)
        if approach[i] > 0.5:
            log_p = log_p1
            log_q = log_q1
        else:
            log_p = log_p0
            log_q = log_q0
        if faults[i] == 0.0:
            # logaddexp(log_p, log_q - lam)
            a = log_p
            b = log_q - lam
            if a == _NEG_INF:
                loglik += b
            elif b <= a:
                loglik += a + math.log1p(math.exp(b - a))
            else:
                loglik += b + math.log1p(math.exp(a - b))
        else:
            loglik += log_q + faults[i] * eta - lam - lgamma_faults[i]
    return prior + loglik
