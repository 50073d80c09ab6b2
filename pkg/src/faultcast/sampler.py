"""Adaptive random-walk Metropolis over an arbitrary log-density.

The kernel updates the state in blocks.  During warmup each block adapts a
proposal shape (full covariance for small blocks, per-coordinate scales
otherwise) from the chain history, and a global step scale by Robbins-Monro
towards a target acceptance rate.  Adaptation freezes at the end of warmup,
so the retained draws come from a fixed Markov kernel.

Chains are mutually independent: chain ``c`` owns the generator seeded with
``seed + c`` (hashed through numpy's SeedSequence).  Everything is
deterministic given the configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InitializationError, InputError

_MAX_INIT_TRIES = 50
_COV_WARM_START = 100  # iterations of history before the shape adapts
_COV_REFRESH = 25


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    chains: int = 4
    warmup: int = 1000
    draws: int = 1000
    target_accept: float = 0.30

    def __post_init__(self):
        if self.chains < 1 or self.warmup < 1 or self.draws < 1:
            raise InputError("chains, warmup and draws must all be positive")
        if not 0.0 < self.target_accept < 1.0:
            raise InputError("target acceptance must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class BlockSpec:
    """A group of coordinates updated together.

    ``adapt`` selects the move: "full" is a random walk with a learned
    covariance, "diag" one with per-coordinate scales only.  "scale" is a
    joint scaling move for hierarchical scale/latent pairs: the first index
    must hold a log-scale coordinate and the rest its scaled latents; the
    move shifts the log-scale by delta and multiplies the latents by
    exp(-delta), which travels along the funnel direction that ordinary
    random-walk updates cross only slowly.  ``refreshes`` is how many updates
    the block receives per sweep.
    """

    indices: tuple
    adapt: str = "full"
    refreshes: int = 1

    def __post_init__(self):
        if not self.indices:
            raise InputError("a block needs at least one coordinate")
        if self.adapt not in ("full", "diag", "scale"):
            raise InputError("block adapt mode must be 'full', 'diag' or 'scale'")
        if self.adapt == "scale" and len(self.indices) < 2:
            raise InputError("a scale block needs the log-scale plus at least one latent")
        if self.refreshes < 1:
            raise InputError("refreshes must be positive")


@dataclass
class Draws:
    """Retained posterior draws: (chains, draws_per_chain, dim)."""

    samples: np.ndarray
    names: tuple
    acceptance: np.ndarray | None = None  # (chains, n_blocks), retained phase

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 3:
            raise InputError("draws array must have shape (chains, draws, dim)")
        if len(self.names) != self.samples.shape[2]:
            raise InputError("one name per parameter column is required")
        self.names = tuple(self.names)

    @property
    def n_chains(self):
        return self.samples.shape[0]

    @property
    def n_draws(self):
        return self.samples.shape[1]

    def index_of(self, param) -> int:
        if isinstance(param, str):
            try:
                return self.names.index(param)
            except ValueError:
                raise InputError(f"unknown parameter {param!r}") from None
        return int(param)

    def column(self, param) -> np.ndarray:
        """Per-chain values of one parameter, shape (chains, draws)."""
        return self.samples[:, :, self.index_of(param)]

    def pooled(self, param) -> np.ndarray:
        return self.column(param).reshape(-1)

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("chain,iteration," + ",".join(self.names) + "\n")
            for c in range(self.n_chains):
                for i in range(self.n_draws):
                    row = ",".join(f"{v:.17g}" for v in self.samples[c, i])
                    fh.write(f"{c},{i},{row}\n")

    @classmethod
    def load_csv(cls, path) -> "Draws":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if header[:2] != ["chain", "iteration"]:
                raise InputError(f"{path}: not a draws file (bad header)")
            names = tuple(header[2:])
            chains: dict[int, list] = {}
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != len(names) + 2:
                    raise InputError(f"{path}:{lineno}: wrong number of columns")
                try:
                    chain = int(parts[0])
                    values = [float(v) for v in parts[2:]]
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: {exc}") from None
                chains.setdefault(chain, []).append(values)
        if not chains:
            raise InputError(f"{path}: no draws found")
        counts = {len(rows) for rows in chains.values()}
        if len(counts) != 1:
            raise InputError(f"{path}: chains have unequal draw counts")
        ordered = [chains[c] for c in sorted(chains)]
        return cls(samples=np.array(ordered, dtype=float), names=names)


class _BlockState:
    """Per-block adaptation state for one chain.

    Proposal shape comes from running moments of the warmup history.  The
    moments restart halfway through warmup so the frozen shape reflects the
    located chain rather than the initial transient, and the shape is
    refreshed once more right before freezing.
    """

    def __init__(self, block: BlockSpec, target_accept: float):
        self.idx = np.asarray(block.indices, dtype=int)
        self.d = len(self.idx)
        self.mode = block.adapt
        self.full = self.mode == "full"
        self.refreshes = block.refreshes
        self.target = target_accept
        if self.mode == "scale":
            self.log_scale = math.log(0.5)
        else:
            self.log_scale = math.log(2.38 / math.sqrt(self.d))
        self.shape = np.eye(self.d) if self.full else np.ones(self.d)
        self._reset_moments()

    def _reset_moments(self):
        self.mean = np.zeros(self.d)
        self.moment = np.zeros((self.d, self.d)) if self.full else np.zeros(self.d)
        self.count = 0

    def make_proposal(self, position: np.ndarray, rng):
        """(proposal, log proposal-Jacobian); the Jacobian is 0 for random walks."""
        proposal = position.copy()
        scale = math.exp(self.log_scale)
        if self.mode == "scale":
            delta = scale * rng.standard_normal()
            latents = self.idx[1:]
            proposal[self.idx[0]] += delta
            proposal[latents] = position[latents] * math.exp(-delta)
            return proposal, -len(latents) * delta
        noise = rng.standard_normal(self.d)
        if self.full:
            proposal[self.idx] += scale * (self.shape @ noise)
        else:
            proposal[self.idx] += scale * (self.shape * noise)
        return proposal, 0.0

    def adapt_scale(self, accept_prob: float, iteration: int):
        gain = (iteration + 10.0) ** -0.6
        self.log_scale += gain * (accept_prob - self.target)
        self.log_scale = min(max(self.log_scale, -15.0), 4.0)

    def record(self, values: np.ndarray):
        if self.mode == "scale":
            return  # the scalar step needs no shape estimate
        self.count += 1
        delta = values - self.mean
        self.mean += delta / self.count
        if self.full:
            self.moment += np.outer(delta, values - self.mean)
        else:
            self.moment += delta * (values - self.mean)
        if self.count >= _COV_WARM_START and self.count % _COV_REFRESH == 0:
            self._refresh_shape()

    def restart_window(self):
        if self.count >= _COV_WARM_START:
            self._refresh_shape()
        self._reset_moments()

    def finalize(self):
        if self.count >= max(_COV_WARM_START // 2, self.d + 2):
            self._refresh_shape()

    def _refresh_shape(self):
        if self.count < 2 or self.mode == "scale":
            return
        if self.full:
            cov = self.moment / (self.count - 1)
            jitter = 1e-6 * float(np.trace(cov)) / self.d + 1e-12
            try:
                self.shape = np.linalg.cholesky(cov + jitter * np.eye(self.d))
            except np.linalg.LinAlgError:
                pass  # keep the previous factor
        else:
            var = self.moment / (self.count - 1)
            self.shape = np.sqrt(var + 1e-12)


def _evaluate(target, point: np.ndarray) -> float:
    value = float(target(point))
    if math.isnan(value) or value == math.inf:
        raise EvaluationError(
            f"target returned {value} at point {np.array2string(point, precision=6)}"
        )
    return value


def _default_init(dim):
    def init(rng):
        return rng.uniform(-2.0, 2.0, size=dim)

    return init


def _run_chain(target, dim, config, blocks, init, chain_index):
    rng = np.random.default_rng(config.seed + chain_index)
    position = None
    for _ in range(_MAX_INIT_TRIES):
        candidate = np.asarray(init(rng), dtype=float)
        logp = _evaluate(target, candidate)
        if logp > -math.inf:
            position = candidate
            break
    if position is None:
        raise InitializationError(
            f"no finite-density start found in {_MAX_INIT_TRIES} attempts "
            f"(chain {chain_index})"
        )

    states = [_BlockState(block, config.target_accept) for block in blocks]
    retained = np.empty((config.draws, dim))
    accepted = np.zeros(len(blocks))
    window_restart = config.warmup // 2
    for iteration in range(1, config.warmup + config.draws + 1):
        warming = iteration <= config.warmup
        for bi, state in enumerate(states):
            for _ in range(state.refreshes):
                proposal, log_jacobian = state.make_proposal(position, rng)
                logp_prop = _evaluate(target, proposal)
                accept_prob = math.exp(min(0.0, logp_prop - logp + log_jacobian))
                if rng.random() < accept_prob:
                    position = proposal
                    logp = logp_prop
                    if not warming:
                        accepted[bi] += 1
                if warming:
                    state.adapt_scale(accept_prob, iteration)
            if warming:
                state.record(position[state.idx])
        if iteration == window_restart:
            for state in states:
                state.restart_window()
        elif iteration == config.warmup:
            for state in states:
                state.finalize()
        if not warming:
            retained[iteration - config.warmup - 1] = position
    rates = accepted / (config.draws * np.array([s.refreshes for s in states]))
    return retained, rates


def run_mcmc(target, dim, config: SamplerConfig, blocks=None, names=None, init=None):
    """Sample ``config.chains`` x ``config.draws`` points from ``target``.

    ``target`` maps a length-``dim`` vector to an unnormalized log-density;
    it may return -inf for out-of-support points but never NaN or +inf.
    ``blocks`` partitions the coordinates for blocked updates (default: one
    full-covariance block over everything).  ``init`` draws starting points;
    the default is Uniform(-2, 2) per coordinate.
    """
    if dim < 1:
        raise InputError("dimension must be at least 1")
    if blocks is None:
        blocks = [BlockSpec(indices=tuple(range(dim)))]
    seen = set()
    for block in blocks:
        for index in block.indices:
            if not 0 <= index < dim:
                raise InputError(f"block index {index} outside [0, {dim})")
            seen.add(index)
    if len(seen) != dim:
        raise InputError("blocks must cover every coordinate")
    if names is None:
        names = tuple(f"p{i}" for i in range(dim))
    if len(names) != dim:
        raise InputError("need exactly one name per coordinate")
    if init is None:
        init = _default_init(dim)

    all_draws = np.empty((config.chains, config.draws, dim))
    acceptance = np.empty((config.chains, len(blocks)))
    for chain in range(config.chains):
        retained, rates = _run_chain(target, dim, config, blocks, init, chain)
        all_draws[chain] = retained
        acceptance[chain] = rates
    return Draws(samples=all_draws, names=tuple(names), acceptance=acceptance)


# ---------------------------------------------------------------------------
# convergence diagnostics
# ---------------------------------------------------------------------------


def _check_diagnostic_shape(x):
    chains, n = x.shape
    if chains < 2:
        raise InputError("diagnostics need at least 2 chains")
    if n < 4:
        raise InputError("diagnostics need at least 4 draws per chain")


def split_rhat(draws: Draws, param) -> float:
    """Split-chain Gelman-Rubin statistic; NaN when within-chain variance is 0."""
    x = draws.column(param)
    _check_diagnostic_shape(x)
    half = x.shape[1] // 2
    halves = np.vstack([x[:, :half], x[:, x.shape[1] - half:]])
    within = halves.var(axis=1, ddof=1).mean()
    if within == 0.0:
        return math.nan
    between_over_n = np.var(halves.mean(axis=1), ddof=1)
    var_plus = (half - 1) / half * within + between_over_n
    return float(math.sqrt(var_plus / within))


def _autocovariance(row: np.ndarray) -> np.ndarray:
    n = row.size
    centered = row - row.mean()
    nfft = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(centered, nfft)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), nfft)[:n]
    return acov / n


def ess_bulk(draws: Draws, param) -> float:
    """Effective sample size via Geyer's initial positive/monotone sequence.

    Autocorrelations are estimated per chain and pooled with the multi-chain
    variance decomposition, so chains stuck in different places correctly
    report a small ESS.  Returns NaN for constant draws.
    """
    x = draws.column(param)
    _check_diagnostic_shape(x)
    chains, n = x.shape
    within = x.var(axis=1, ddof=1).mean()
    if within == 0.0:
        return math.nan
    acov = np.array([_autocovariance(row) for row in x])
    mean_acov = acov.mean(axis=0)
    between_over_n = np.var(x.mean(axis=1), ddof=1)
    var_plus = (n - 1) / n * within + between_over_n
    rho = 1.0 - (within - mean_acov) / var_plus

    # Geyer: sum rho in adjacent pairs while the pair sums stay positive,
    # then enforce monotone non-increase.
    max_pairs = (n - 1) // 2
    pair_sums = []
    for k in range(max_pairs):
        pair = rho[2 * k + 1] + rho[2 * k + 2] if 2 * k + 2 < n else -1.0
        if pair <= 0.0:
            break
        if pair_sums and pair > pair_sums[-1]:
            pair = pair_sums[-1]
        pair_sums.append(pair)
    tau = rho[0] + 2.0 * sum(pair_sums)
    tau = max(tau, 1.0 / math.log10(chains * n + 10))
    return float(chains * n / tau)
