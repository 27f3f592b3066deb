"""Seeded Monte-Carlo estimators for IRS-NOMA, IRS-OMA and relaying baselines.

Trials are split into fixed-size chunks.  Chunk ``i`` draws from
``spawn_rng(seed, i)``, so a run is reproducible regardless of how many
workers execute the chunks.  Tallies are merged in chunk order with exact
integer sums (outage counts) or correctly rounded float sums (rates).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from .system import (
    ChannelStats,
    Codebook,
    NetworkConfig,
    oma_gain,
    rank_gains,
    sample_draw,
    sinr_noma,
    spawn_rng,
    threshold,
)

DEFAULT_CHUNK = 1 << 16
Z95 = 1.959963984540054
WILSON_BELOW = 1e-3

Metric = Literal["outage", "ergodic"]
BaselineScheme = Literal["af-variable-gain", "df-fd", "df-hd"]
BASELINE_SCHEMES = ("af-variable-gain", "df-fd", "df-hd")


@dataclass(frozen=True)
class McEstimate:
    """Point estimate with a 95 % confidence interval."""

    value: float
    std_error: float
    ci_lo: float
    ci_hi: float
    trials: int
    seed: int
    scheme: str = ""
    user: int = 0
    metric: str = ""


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return lo, hi


def proportion_estimate(count: int, n: int, seed: int, **labels) -> McEstimate:
    p = count / n
    se = math.sqrt(p * (1.0 - p) / n)
    if min(p, 1.0 - p) < WILSON_BELOW:
        lo, hi = wilson_interval(count, n)
    else:
        lo, hi = max(0.0, p - Z95 * se), min(1.0, p + Z95 * se)
    return McEstimate(p, se, min(lo, p), max(hi, p), n, seed, **labels)


def mean_estimate(total: float, total_sq: float, n: int, seed: int, **labels) -> McEstimate:
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    se = math.sqrt(var / n)
    return McEstimate(mean, se, mean - Z95 * se, mean + Z95 * se, n, seed, **labels)


def required_trials(p: float, rel_precision: float = 0.1) -> int:
    """Trials needed to estimate a probability ``p`` to the given relative precision."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return math.ceil((1.0 - p) / (p * rel_precision**2))


def _check_trials(trials):
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")


def run_chunked(kernel: Callable[[np.random.Generator, int], list[np.ndarray]],
                trials: int, seed: int, chunk_size: int = DEFAULT_CHUNK,
                workers: int | None = None) -> list[np.ndarray]:
    """Run ``kernel(rng, n)`` over chunks and add its tallies element-wise.

    Integer tallies are summed exactly; float tallies with ``math.fsum``, so
    the merge is independent of scheduling.
    """
    _check_trials(trials)
    sizes = [min(chunk_size, trials - i) for i in range(0, trials, chunk_size)]

    def job(i):
        return kernel(spawn_rng(seed, i), sizes[i])

    if workers and workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]

    merged = []
    for k in range(len(parts[0])):
        stack = np.stack([np.asarray(p[k]) for p in parts])
        if np.issubdtype(stack.dtype, np.integer):
            merged.append(stack.sum(axis=0))
        else:
            flat = stack.reshape(len(parts), -1)
            sums = np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])])
            merged.append(sums.reshape(stack.shape[1:]))
    return merged


def _noma_kernel(config: NetworkConfig, stats: ChannelStats, rhos: np.ndarray, metric: Metric):
    M = config.num_users
    gammas = [threshold(r) for r in config.target_rates]

    def kernel(rng, n):
        draw = sample_draw(config, stats, rng, n)
        g = rank_gains(config, stats, draw)
        res = draw.residual
        if metric == "outage":
            counts = np.zeros((len(rhos), M), dtype=np.int64)
            for i, rho in enumerate(rhos):
                for m in range(1, M + 1):
                    out = np.zeros(n, dtype=bool)
                    for q in range(1, m + 1):
                        s = sinr_noma(g[:, m - 1], q, m, rho, res[:, m - 1], config)
                        out |= s < gammas[q - 1]
                    counts[i, m - 1] = np.count_nonzero(out)
            return [counts]
        sums = np.zeros((len(rhos), M))
        sq = np.zeros((len(rhos), M))
        for i, rho in enumerate(rhos):
            for m in range(1, M + 1):
                r = np.log2(1.0 + sinr_noma(g[:, m - 1], m, m, rho, res[:, m - 1], config))
                sums[i, m - 1] = math.fsum(r)
                sq[i, m - 1] = math.fsum(r * r)
        return [sums, sq]

    return kernel


def _as_rhos(rho) -> np.ndarray:
    r = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(~(r >= 0)):
        raise ValueError("transmit SNR must be non-negative")
    return r


def mc_noma_sweep(config: NetworkConfig, stats: ChannelStats, rhos: Sequence[float],
                  trials: int, seed: int, metric: Metric = "outage", *,
                  chunk_size: int = DEFAULT_CHUNK, workers: int | None = None,
                  scheme: str | None = None) -> list[list[McEstimate]]:
    """Per-SNR, per-user NOMA estimates over shared channel draws.

    Every SNR point reuses the same draws (common random numbers), so an
    outage curve from one call is non-increasing in the SNR.
    """
    rhos = _as_rhos(rhos)
    scheme = scheme or f"irs-noma-{config.sic_mode}"
    tallies = run_chunked(_noma_kernel(config, stats, rhos, metric), trials, seed,
                          chunk_size, workers)
    out = []
    for i in range(len(rhos)):
        row = []
        for m in range(1, config.num_users + 1):
            labels = dict(scheme=scheme, user=m, metric=metric)
            if metric == "outage":
                row.append(proportion_estimate(int(tallies[0][i, m - 1]), trials, seed, **labels))
            else:
                row.append(mean_estimate(tallies[0][i, m - 1], tallies[1][i, m - 1],
                                         trials, seed, **labels))
        out.append(row)
    return out


def mc_outage_noma(config, stats, rho, trials, seed, **kw) -> list[McEstimate]:
    """Outage estimate of every NOMA user at one SNR."""
    return mc_noma_sweep(config, stats, [rho], trials, seed, "outage", **kw)[0]


def mc_ergodic_noma(config, stats, rho, trials, seed, **kw) -> list[McEstimate]:
    """Ergodic-rate estimate of every NOMA user at one SNR."""
    return mc_noma_sweep(config, stats, [rho], trials, seed, "ergodic", **kw)[0]


def mc_oma_sweep(config: NetworkConfig, stats: ChannelStats, rhos: Sequence[float],
                 trials: int, seed: int, metric: Metric = "outage", *,
                 chunk_size: int = DEFAULT_CHUNK, workers: int | None = None) -> list[McEstimate]:
    rhos = _as_rhos(rhos)
    gam = threshold(config.oma_target_rate)
    codebook = Codebook.for_config(config)

    def kernel(rng, n):
        gd = oma_gain(sample_draw(config, stats, rng, n), codebook)
        if metric == "outage":
            return [np.array([np.count_nonzero(rho * gd <= gam) for rho in rhos], dtype=np.int64)]
        r = [np.log2(1.0 + rho * gd) for rho in rhos]
        return [np.array([math.fsum(x) for x in r]), np.array([math.fsum(x * x) for x in r])]

    t = run_chunked(kernel, trials, seed, chunk_size, workers)
    labels = dict(scheme="irs-oma", user=1, metric=metric)
    if metric == "outage":
        return [proportion_estimate(int(c), trials, seed, **labels) for c in t[0]]
    return [mean_estimate(s, q, trials, seed, **labels) for s, q in zip(t[0], t[1])]


def mc_oma(config, stats, rho, trials, seed, metric: Metric = "outage", **kw) -> McEstimate:
    """Outage or ergodic-rate estimate of the orthogonal user."""
    return mc_oma_sweep(config, stats, [rho], trials, seed, metric, **kw)[0]


@dataclass(frozen=True)
class BaselineConfig:
    """Two-hop relaying link with Rayleigh hops of mean gains ``omega1``, ``omega2``.

    ``loop_interference`` is the mean loop self-interference gain of the
    full-duplex relay and must be set for ``df-fd``.
    """

    scheme: BaselineScheme
    omega1: float
    omega2: float
    target_rate: float
    loop_interference: float | None = None

    def __post_init__(self):
        if self.scheme not in BASELINE_SCHEMES:
            raise ValueError(f"unknown baseline scheme {self.scheme!r}")
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError("hop variances must be positive")
        if self.scheme == "df-fd" and self.loop_interference is None:
            raise ValueError("df-fd needs loop_interference")
        if self.loop_interference is not None and self.loop_interference < 0:
            raise ValueError("loop_interference must be non-negative")
        if self.target_rate < 0:
            raise ValueError("target rate must be non-negative")

    @classmethod
    def for_network(cls, scheme: BaselineScheme, config: NetworkConfig, stats: ChannelStats,
                    loop_interference: float = 0.1) -> "BaselineConfig":
        """Relay at the surface position serving the orthogonal user's location."""
        li = loop_interference if scheme == "df-fd" else None
        return cls(scheme, stats.omega_sr, stats.omega_rd, config.oma_target_rate, li)


def baseline_rate(baseline: BaselineConfig, g1, g2, g_li, rho: float):
    """Instantaneous achievable rate (BPCU) of the baseline for given hop gains."""
    c1, c2 = rho * g1, rho * g2
    if baseline.scheme == "af-variable-gain":
        return 0.5 * np.log2(1.0 + c1 * c2 / (c1 + c2 + 1.0))
    if baseline.scheme == "df-hd":
        return 0.5 * np.log2(1.0 + np.minimum(c1, c2))
    return np.log2(1.0 + np.minimum(c1 / (rho * g_li + 1.0), c2))


def mc_baseline_sweep(baseline: BaselineConfig, rhos: Sequence[float], trials: int, seed: int,
                      metric: Metric = "outage", *, chunk_size: int = DEFAULT_CHUNK,
                      workers: int | None = None) -> list[McEstimate]:
    rhos = _as_rhos(rhos)
    li = baseline.loop_interference or 0.0

    def kernel(rng, n):
        g1 = rng.exponential(baseline.omega1, n)
        g2 = rng.exponential(baseline.omega2, n)
        g_li = rng.exponential(li, n) if li > 0 else np.zeros(n)
        rates = [baseline_rate(baseline, g1, g2, g_li, rho) for rho in rhos]
        if metric == "outage":
            return [np.array([np.count_nonzero(r < baseline.target_rate) for r in rates],
                             dtype=np.int64)]
        return [np.array([math.fsum(r) for r in rates]), np.array([math.fsum(r * r) for r in rates])]

    t = run_chunked(kernel, trials, seed, chunk_size, workers)
    labels = dict(scheme=baseline.scheme, user=1, metric=metric)
    if metric == "outage":
        return [proportion_estimate(int(c), trials, seed, **labels) for c in t[0]]
    return [mean_estimate(s, q, trials, seed, **labels) for s, q in zip(t[0], t[1])]


def mc_baseline(baseline: BaselineConfig, rho: float, trials: int, seed: int,
                metric: Metric = "outage", **kw) -> McEstimate:
    """Outage or ergodic-rate estimate of a conventional relaying baseline."""
    return mc_baseline_sweep(baseline, [rho], trials, seed, metric, **kw)[0]
