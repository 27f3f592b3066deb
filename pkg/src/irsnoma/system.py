"""Network configuration, channel statistics and link-level primitives.

Powers and SNRs enter in dB at the configuration boundary and are linear
everywhere else.  Random generation always goes through an explicit
``numpy.random.Generator`` owned by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

SicMode = Literal["ipsic", "psic"]
OrderingMode = Literal["per-column", "effective-gain"]
ChannelModel = Literal["ordered-iid", "shared-bs-link"]

SIC_MODES = ("ipsic", "psic")
ORDERING_MODES = ("per-column", "effective-gain")
CHANNEL_MODELS = ("ordered-iid", "shared-bs-link")


class ConfigError(ValueError):
    """A scenario violates one of its invariants."""


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def dbm_to_watt(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def threshold(rate):
    """SNR threshold ``2**rate - 1`` for a target rate in bits per channel use."""
    r = np.asarray(rate, dtype=float)
    if np.any(r < 0):
        raise ValueError("target rate must be non-negative")
    out = np.expm1(r * math.log(2.0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class NetworkConfig:
    """Scenario parameters of an IRS-assisted downlink.

    Attributes
    ----------
    num_users : int
        Number of NOMA users ``M``.
    reflecting_elements, partition, group_size : int
        ``K`` elements split into ``P`` groups of ``Q`` (``K = P * Q``).
    power_alloc : tuple of float
        Power fractions ``a_1 >= ... >= a_M > 0`` summing to one.
    target_rates : tuple of float
        Per-user target rates (BPCU).
    oma_target_rate : float
        Target rate of the orthogonal user; defaults to the sum of the NOMA
        target rates.
    residual_interference : float
        Linear mean power of the residual SIC interference.
    channel_model : {"ordered-iid", "shared-bs-link"}
        ``ordered-iid`` gives every user an independent BS-IRS link and ranks
        ``M`` i.i.d. copies with the statistics of the user of interest; this
        is the model under which the closed forms are exact.
        ``shared-bs-link`` uses one BS-IRS vector for all users with their own
        IRS-user variances (the physical deployment).
    strict_power_order : bool
        Enforce descending, strictly positive power fractions.  Power sweeps
        that cross the ordering boundary switch this off; zero fractions then
        make the affected users infeasible instead of invalid.
    """

    num_users: int = 3
    reflecting_elements: int = 1
    partition: int = 1
    group_size: int = 1
    power_alloc: tuple = (0.5, 0.4, 0.1)
    target_rates: tuple = (0.6, 1.6, 2.0)
    oma_target_rate: float | None = None
    pathloss_exponent: float = 2.0
    d_sr: float = 0.5
    d_rm: tuple = (0.5, 0.4, 0.3)
    d_rd: float = 0.5
    residual_interference: float = 0.1
    sic_mode: SicMode = "psic"
    ordering_mode: OrderingMode = "per-column"
    channel_model: ChannelModel = "ordered-iid"
    strict_power_order: bool = True

    def __post_init__(self):
        for name in ("power_alloc", "target_rates", "d_rm"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if self.oma_target_rate is None:
            object.__setattr__(self, "oma_target_rate", float(sum(self.target_rates)))
        self.validate()

    def validate(self) -> None:
        M, K, P, Q = self.num_users, self.reflecting_elements, self.partition, self.group_size
        for name, v in (("num_users", M), ("reflecting_elements", K),
                        ("partition", P), ("group_size", Q)):
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if K != P * Q:
            raise ConfigError(f"K must equal P·Q (K={K}, P={P}, Q={Q})")
        if Q > 64:
            raise ConfigError("group_size Q above 64 is not supported")
        for name in ("power_alloc", "target_rates", "d_rm"):
            if len(getattr(self, name)) != M:
                raise ConfigError(f"{name} must have one entry per user ({M})")
        a = np.array(self.power_alloc)
        if abs(math.fsum(self.power_alloc) - 1.0) > 1e-12:
            raise ConfigError(f"power_alloc must sum to 1, got {math.fsum(self.power_alloc)!r}")
        if self.strict_power_order:
            if np.any(np.diff(a) > 0):
                raise ConfigError("power_alloc must satisfy a_1 >= a_2 >= ... >= a_M")
            if np.any(a <= 0):
                raise ConfigError("power_alloc entries must be positive")
        elif np.any(a < 0):
            raise ConfigError("power_alloc entries must be non-negative")
        if any(r < 0 for r in self.target_rates) or self.oma_target_rate < 0:
            raise ConfigError("target rates must be non-negative")
        if not self.pathloss_exponent > 0:
            raise ConfigError("pathloss_exponent must be positive")
        if not (self.d_sr > 0 and self.d_rd > 0 and all(d > 0 for d in self.d_rm)):
            raise ConfigError("all distances must be positive")
        if not self.residual_interference >= 0:
            raise ConfigError("residual_interference must be non-negative")
        if self.sic_mode not in SIC_MODES:
            raise ConfigError(f"sic_mode must be one of {SIC_MODES}")
        if self.ordering_mode not in ORDERING_MODES:
            raise ConfigError(f"ordering_mode must be one of {ORDERING_MODES}")
        if self.channel_model not in CHANNEL_MODELS:
            raise ConfigError(f"channel_model must be one of {CHANNEL_MODELS}")

    @property
    def varpi(self) -> int:
        """SIC imperfection switch: 1 for ipSIC, 0 for pSIC."""
        return 1 if self.sic_mode == "ipsic" else 0

    def interference_share(self, m: int) -> float:
        """Sum of the power fractions of users ranked above ``m`` (1-based)."""
        return math.fsum(self.power_alloc[m:])

    def with_(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)


def default_config(**overrides) -> NetworkConfig:
    """Default three-user scenario used throughout the numerical study."""
    return NetworkConfig(**overrides)


@dataclass(frozen=True)
class ChannelStats:
    """Linear variances of the complex channel coefficients."""

    omega_sr: float
    omega_rm: tuple
    omega_rd: float

    def __post_init__(self):
        object.__setattr__(self, "omega_rm", tuple(float(v) for v in self.omega_rm))
        if not (self.omega_sr > 0 and self.omega_rd > 0 and all(v > 0 for v in self.omega_rm)):
            raise ConfigError("channel variances must be positive")

    def cascade(self, m: int) -> float:
        """Product ``omega_sr * omega_rm`` for user ``m`` (1-based)."""
        return self.omega_sr * self.omega_rm[m - 1]

    @property
    def cascade_oma(self) -> float:
        return self.omega_sr * self.omega_rd


def derive_stats(config: NetworkConfig) -> ChannelStats:
    """Variances from distances via ``omega = d**-alpha``."""
    alpha = config.pathloss_exponent
    return ChannelStats(
        omega_sr=config.d_sr ** -alpha,
        omega_rm=tuple(d ** -alpha for d in config.d_rm),
        omega_rd=config.d_rd ** -alpha,
    )


@dataclass(frozen=True)
class Codebook:
    """1-bit codebook ``V = I_P kron 1_Q``: column ``p`` switches on group ``p``."""

    partition: int
    group_size: int

    @property
    def reflecting_elements(self) -> int:
        return self.partition * self.group_size

    @property
    def matrix(self) -> np.ndarray:
        """``K x P`` binary matrix whose columns are the selectors."""
        return np.kron(np.eye(self.partition, dtype=int), np.ones((self.group_size, 1), dtype=int))

    def elements(self, p: int) -> range:
        """0-based element indices switched on by column ``p`` (0-based)."""
        return range(p * self.group_size, (p + 1) * self.group_size)

    @classmethod
    def for_config(cls, config: NetworkConfig) -> "Codebook":
        return cls(config.partition, config.group_size)


@dataclass(frozen=True)
class ChannelDraw:
    """Channel realisation(s); leading axes index independent trials.

    ``h_sr`` has shape ``(..., K)`` under the shared-link model and
    ``(..., M, K)`` under the ordered-iid model.  In the ordered-iid model the
    IRS-user coefficients are drawn with unit variance because path loss is
    applied per rank after ordering (see :func:`rank_gains`).
    """

    h_sr: np.ndarray
    h_rm: np.ndarray
    h_rd: np.ndarray
    residual: np.ndarray
    channel_model: ChannelModel = "shared-bs-link"


def spawn_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, stream)``; the stream-split function."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def _cn(rng: np.random.Generator, shape, var):
    z = rng.standard_normal(shape + (2,))
    return np.sqrt(np.asarray(var) / 2.0) * (z[..., 0] + 1j * z[..., 1])


def sample_draw(config: NetworkConfig, stats: ChannelStats, rng: np.random.Generator,
                size: int | tuple | None = None) -> ChannelDraw:
    """Draw Rayleigh channels and residual-interference powers.

    ``size`` adds leading trial axes; ``None`` returns a single realisation.
    """
    lead = () if size is None else ((size,) if np.ndim(size) == 0 else tuple(size))
    M, K = config.num_users, config.reflecting_elements
    omega_rm = np.asarray(stats.omega_rm)[:, None]
    if config.channel_model == "ordered-iid":
        h_sr = _cn(rng, lead + (M, K), stats.omega_sr)
        h_rm = _cn(rng, lead + (M, K), 1.0)
    else:
        h_sr = _cn(rng, lead + (K,), stats.omega_sr)
        h_rm = _cn(rng, lead + (M, K), omega_rm)
    h_rd = _cn(rng, lead + (K,), stats.omega_rd)
    if config.residual_interference > 0:
        residual = rng.exponential(config.residual_interference, lead + (M,))
    else:
        residual = np.zeros(lead + (M,))
    return ChannelDraw(h_sr, h_rm, h_rd, residual, config.channel_model)


def cascade_gains(draw: ChannelDraw, codebook: Codebook) -> np.ndarray:
    """Per-user, per-column cascade gains ``|sum_{k in group p} h_sr,k h_rm,k|^2``.

    Returns an array of shape ``(..., M, P)``.
    """
    h_sr = draw.h_sr
    if h_sr.ndim == draw.h_rm.ndim - 1:
        h_sr = h_sr[..., None, :]
    prod = h_sr * draw.h_rm
    if prod.shape[-1] != codebook.reflecting_elements:
        raise ValueError("channel length does not match the codebook")
    grouped = prod.reshape(prod.shape[:-1] + (codebook.partition, codebook.group_size)).sum(-1)
    return grouped.real**2 + grouped.imag**2


def oma_gain(draw: ChannelDraw, codebook: Codebook) -> np.ndarray:
    """Column-maximised cascade gain of the orthogonal user, shape ``(...)``."""
    h_sr = draw.h_sr[..., 0, :] if draw.channel_model == "ordered-iid" else draw.h_sr
    prod = h_sr * draw.h_rd
    grouped = prod.reshape(prod.shape[:-1] + (codebook.partition, codebook.group_size)).sum(-1)
    return (grouped.real**2 + grouped.imag**2).max(-1)


def order_users(X: np.ndarray, mode: OrderingMode = "per-column") -> np.ndarray:
    """Ascending per-rank effective gains from a ``(..., M, P)`` gain array.

    ``per-column`` ranks users inside each column and then takes the best
    column for every rank; ``effective-gain`` lets each user pick its best
    column first and then ranks those gains.
    """
    if mode == "per-column":
        return np.sort(X, axis=-2).max(axis=-1)
    if mode == "effective-gain":
        return np.sort(X.max(axis=-1), axis=-1)
    raise ValueError(f"unknown ordering mode {mode!r}")


def rank_gains(config: NetworkConfig, stats: ChannelStats, draw: ChannelDraw) -> np.ndarray:
    """Effective gain of every rank, shape ``(..., M)``, path loss included."""
    g = order_users(cascade_gains(draw, Codebook.for_config(config)), config.ordering_mode)
    if draw.channel_model == "ordered-iid":
        g = g * np.asarray(stats.omega_rm)
    return g


def sinr_noma(g, q: int, m: int, rho: float, residual, config: NetworkConfig):
    """SINR at the rank-``m`` user when decoding user ``q``'s message.

    The residual term is weighted by the SIC switch and is absent for the
    first user, which performs no SIC.
    """
    M = config.num_users
    if not (1 <= q <= m <= M):
        raise IndexError(f"need 1 <= q <= m <= M, got q={q}, m={m}, M={M}")
    if not rho > 0:
        raise ValueError("transmit SNR must be positive")
    g = np.asarray(g, dtype=float)
    a_q = config.power_alloc[q - 1]
    above = config.interference_share(q)
    w = 0.0 if m == 1 else config.varpi
    noise = w * rho * np.asarray(residual, dtype=float) + 1.0
    return rho * g * a_q / (rho * g * above + noise)


def snr_oma(g_d, rho: float):
    if not rho > 0:
        raise ValueError("transmit SNR must be positive")
    return rho * np.asarray(g_d, dtype=float)


def feasible(config: NetworkConfig, m: int) -> bool:
    """Whether user ``m`` can decode messages ``1..m`` at all (finite thresholds)."""
    return all(_threshold_gap(config, q) > 0 for q in range(1, m + 1))


def _threshold_gap(config: NetworkConfig, q: int) -> float:
    gam = threshold(config.target_rates[q - 1])
    return config.power_alloc[q - 1] - gam * config.interference_share(q)


def threshold_ratio(config: NetworkConfig, m: int) -> float:
    """SNR-free outage threshold ``max_q gamma_q / (a_q - gamma_q * abar_q)`` over q <= m.

    Divide by the transmit SNR to get the gain threshold; ``inf`` if the
    allocation is infeasible for some ``q``.
    """
    worst = 0.0
    for q in range(1, m + 1):
        gap = _threshold_gap(config, q)
        if gap <= 0:
            return math.inf
        worst = max(worst, threshold(config.target_rates[q - 1]) / gap)
    return worst
