"""Out-of-sample predictive model comparison.

Both WAIC and PSIS-LOO are computed from the draws-by-observations matrix of
pointwise log-likelihood values.  PSIS-LOO is the headline criterion; WAIC is
the cross-check and the fallback when the Pareto tail fit degenerates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .model import Dataset, M2
from .posterior import Posterior
from .distributions import inv_logit, poisson_logpmf, zip_logpmf
from . import model as model_mod

PARETO_K_WARN = 0.7


@dataclass(frozen=True)
class LogLikMatrix:
    """Per-observation log-likelihood, one row per posterior draw."""

    values: np.ndarray  # (draws, observations)
    label: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InputError("log-likelihood matrix must be 2-dimensional")
        if not np.all(np.isfinite(values)):
            raise InputError("log-likelihood matrix contains non-finite entries")
        object.__setattr__(self, "values", values)

    @property
    def n_draws(self):
        return self.values.shape[0]

    @property
    def n_obs(self):
        return self.values.shape[1]


def pointwise_loglik(post: Posterior, data: Dataset, label: str = "") -> LogLikMatrix:
    """Evaluate the fitted model's pointwise log-likelihood on a dataset.

    Vectorized over pooled draws; agrees with
    :func:`faultcast.model.log_likelihood` row by row.
    """
    if data.n_subjects != post.n_subjects and post.spec.kind == M2:
        raise InputError(
            f"posterior was fitted for {post.n_subjects} subjects, "
            f"dataset has {data.n_subjects}"
        )
    draws = post.draws
    spec = post.spec
    alpha = draws.pooled("alpha")[:, None]
    beta_a = draws.pooled("beta_a")[:, None]
    beta_e = draws.pooled("beta_e")[:, None]
    approach = data.approach[None, :]
    experience = data.experience[None, :]
    eta = alpha + beta_a * approach + beta_e * experience
    if spec.kind == M2:
        z = np.column_stack([draws.pooled(f"z_{i}") for i in range(post.n_subjects)])
        offsets = draws.pooled("mu_s")[:, None] + draws.pooled("sigma_s")[:, None] * z
        eta = eta + offsets[:, data.subject]
        lam = np.exp(eta)
        eta_p = draws.pooled("alpha_p")[:, None] + draws.pooled("beta_p")[:, None] * approach
        if spec.zi_link == model_mod.LINK_LOGIT:
            p = inv_logit(eta_p)
        else:
            p = np.minimum(np.exp(eta_p), 1.0)
        values = zip_logpmf(np.broadcast_to(data.faults, lam.shape), lam, p)
    else:
        lam = np.exp(eta)
        values = poisson_logpmf(np.broadcast_to(data.faults, lam.shape), lam)
    return LogLikMatrix(values=values, label=label or spec.kind)


def _log_mean_exp(values: np.ndarray, axis=0):
    peak = np.max(values, axis=axis, keepdims=True)
    out = peak.squeeze(axis) + np.log(
        np.mean(np.exp(values - peak), axis=axis)
    )
    return out


@dataclass(frozen=True)
class WaicResult:
    label: str
    elpd: float
    se: float
    p_eff: float
    pointwise: np.ndarray


def waic(ll: LogLikMatrix) -> WaicResult:
    """Widely applicable information criterion on the elpd scale."""
    if ll.n_draws < 2:
        raise InputError("WAIC needs at least 2 draws")
    lppd = _log_mean_exp(ll.values, axis=0)
    penalty = ll.values.var(axis=0, ddof=1)
    pointwise = lppd - penalty
    se = math.sqrt(ll.n_obs * pointwise.var(ddof=1)) if ll.n_obs > 1 else 0.0
    return WaicResult(
        label=ll.label,
        elpd=float(pointwise.sum()),
        se=se,
        p_eff=float(penalty.sum()),
        pointwise=pointwise,
    )


def fit_generalized_pareto(exceedances) -> tuple[float, float]:
    """Shape and scale of a generalized Pareto fitted to positive exceedances.

    Profile-likelihood estimate over a fixed grid in the transformed
    parameter, with the usual weak prior pulling the shape towards 0.5.
    Degenerate input (zero spread) yields (nan, nan).
    """
    x = np.sort(np.asarray(exceedances, dtype=float))
    n = x.size
    if n < 5:
        raise InputError("generalized Pareto fit needs at least 5 exceedances")
    if x[0] == x[-1]:
        return math.nan, math.nan
    prior_b, prior_k_count, prior_k_value = 3.0, 10.0, 0.5
    m_grid = 30 + int(math.sqrt(n))
    quartile = x[(n - 2) // 4]
    if quartile <= 0:
        positive = x[x > 0]
        quartile = positive[0] if positive.size else x[-1]
    b = 1.0 - np.sqrt(m_grid / (np.arange(1, m_grid + 1) - 0.5))
    b = b / (prior_b * quartile) + 1.0 / x[-1]
    k = np.mean(np.log1p(-b[:, None] * x), axis=1)
    profile = n * (np.log(-b / k) - k - 1.0)
    with np.errstate(over="ignore"):
        weights = 1.0 / np.exp(profile - profile[:, None]).sum(axis=1)
    b_post = float(np.sum(b * weights) / weights.sum())
    k_post = float(np.mean(np.log1p(-b_post * x)))
    sigma = -k_post / b_post
    k_hat = (n * k_post + prior_k_count * prior_k_value) / (n + prior_k_count)
    return float(k_hat), float(sigma)


def _gpd_quantile(u, mu, sigma, k):
    if abs(k) < 1e-12:
        return mu - sigma * math.log1p(-u)
    return mu + sigma / k * ((1.0 - u) ** (-k) - 1.0)


def _smooth_one(log_ratios: np.ndarray):
    """Pareto-smoothed, normalized log-weights for one observation.

    Returns (normalized log-weights, k).  Fits a generalized Pareto to the
    tail of the importance ratios, replaces the tail by the fitted quantiles
    at expected plotting positions, and truncates at the largest raw ratio.
    A degenerate tail leaves the ratios unsmoothed (k = nan).
    """
    s = log_ratios.size
    shifted = log_ratios - log_ratios.max()
    ratios = np.exp(shifted)
    tail_size = int(min(0.2 * s, 3.0 * math.sqrt(s)))
    k_hat = math.nan
    if tail_size >= 5:
        order = np.argsort(ratios)
        tail_idx = order[-tail_size:]
        threshold = ratios[order[-tail_size - 1]]
        exceedances = ratios[tail_idx] - threshold
        if np.ptp(exceedances) > 0:
            k_hat, sigma_hat = fit_generalized_pareto(exceedances)
            if math.isfinite(k_hat) and sigma_hat > 0:
                positions = (np.arange(1, tail_size + 1) - 0.5) / tail_size
                smoothed = np.array(
                    [_gpd_quantile(u, threshold, sigma_hat, k_hat) for u in positions]
                )
                cap = ratios.max()
                # tail entries in ascending order get ascending quantiles
                ratios[tail_idx[np.argsort(ratios[tail_idx])]] = np.minimum(
                    smoothed, cap
                )
    with np.errstate(divide="ignore"):  # ratio underflow to 0 means weight 0
        log_weights = np.log(ratios)
    log_weights -= _log_mean_exp(log_weights) + math.log(s)
    return log_weights, k_hat


@dataclass(frozen=True)
class LooResult:
    label: str
    elpd: float
    se: float
    p_eff: float
    pointwise: np.ndarray
    pareto_k: np.ndarray

    @property
    def n_high_k(self):
        with np.errstate(invalid="ignore"):
            return int(np.sum(self.pareto_k > PARETO_K_WARN))


def psis_loo(ll: LogLikMatrix) -> LooResult:
    """Pareto-smoothed importance-sampling leave-one-out cross-validation.

    Pointwise elpd is the log of the smoothed-weight average of the
    likelihood.  Observations whose tail fit is degenerate fall back to plain
    importance sampling and report k = nan; k > 0.7 flags an unreliable
    estimate.
    """
    if ll.n_draws < 100:
        raise InputError("PSIS-LOO needs at least 100 draws for the tail fit")
    n = ll.n_obs
    pointwise = np.empty(n)
    pareto_k = np.empty(n)
    for i in range(n):
        column = ll.values[:, i]
        log_weights, k_hat = _smooth_one(-column)
        pointwise[i] = _log_mean_exp(column + log_weights) + math.log(ll.n_draws)
        pareto_k[i] = k_hat
    with np.errstate(invalid="ignore"):
        flagged = int(np.sum(pareto_k > PARETO_K_WARN))
    if flagged:
        warnings.warn(
            f"{flagged} observation(s) with Pareto k above {PARETO_K_WARN}; "
            "their leave-one-out estimates may be unreliable",
            stacklevel=2,
        )
    lppd = _log_mean_exp(ll.values, axis=0)
    se = math.sqrt(n * pointwise.var(ddof=1)) if n > 1 else 0.0
    return LooResult(
        label=ll.label,
        elpd=float(pointwise.sum()),
        se=se,
        p_eff=float((lppd - pointwise).sum()),
        pointwise=pointwise,
        pareto_k=pareto_k,
    )


@dataclass(frozen=True)
class ComparisonEntry:
    rank: int
    label: str
    elpd: float
    se: float
    p_eff: float
    elpd_diff: float  # best minus this model
    diff_se: float
    pareto_k: np.ndarray


@dataclass(frozen=True)
class ComparisonResult:
    entries: tuple

    @property
    def best(self) -> str:
        return self.entries[0].label


def compare(models: list[tuple[str, LogLikMatrix]]) -> ComparisonResult:
    """Rank models by PSIS-LOO elpd.

    Differences are against the top-ranked model, with standard errors from
    the pointwise elpd differences (paired, so usually far smaller than the
    per-model standard errors).
    """
    if len(models) < 2:
        raise InputError("comparison needs at least two models")
    n_obs = {ll.n_obs for _, ll in models}
    if len(n_obs) != 1:
        raise InputError("all models must score the same observations")
    results = [
        psis_loo(LogLikMatrix(values=ll.values, label=label)) for label, ll in models
    ]
    order = sorted(range(len(results)), key=lambda i: -results[i].elpd)
    best = results[order[0]]
    entries = []
    for rank, i in enumerate(order):
        res = results[i]
        delta = best.pointwise - res.pointwise
        diff = float(delta.sum())
        diff_se = (
            math.sqrt(res.pointwise.size * delta.var(ddof=1))
            if res.pointwise.size > 1
            else 0.0
        )
        entries.append(
            ComparisonEntry(
                rank=rank,
                label=res.label,
                elpd=res.elpd,
                se=res.se,
                p_eff=res.p_eff,
                elpd_diff=diff,
                diff_se=diff_se,
                pareto_k=res.pareto_k,
            )
        )
    return ComparisonResult(entries=tuple(entries))


def format_comparison(result: ComparisonResult) -> str:
    header = f"{'rank':>4}  {'model':<12} {'elpd':>9} {'se':>7} {'p_eff':>7} {'d_elpd':>8} {'d_se':>6} {'k>0.7':>6}"
    lines = [header, "-" * len(header)]
    for e in result.entries:
        with np.errstate(invalid="ignore"):
            high = int(np.sum(e.pareto_k > PARETO_K_WARN))
        lines.append(
            f"{e.rank:>4}  {e.label:<12} {e.elpd:>9.2f} {e.se:>7.2f} {e.p_eff:>7.2f} "
            f"{e.elpd_diff:>8.2f} {e.diff_se:>6.2f} {high:>6}"
        )
    return "\n".join(lines)
