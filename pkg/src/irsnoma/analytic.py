"""Closed-form and asymptotic performance evaluators.

All channel-gain arguments below are normalised, ``z = x / (omega_sr * omega_r)``,
so the cascade gain of a group of ``Q`` elements has CDF

    F(z) = 1 - (2 / Gamma(Q)) z^(Q/2) K_Q(2 sqrt(z)).

Outage probabilities and rates are clamped into their valid ranges; the
unclamped value is kept alongside for diagnosis.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .special import (
    ConvergenceError,
    QuadratureRule,
    bessel_k_int,
    gauss_chebyshev,
    gauss_laguerre,
    integrate_semi_infinite,
    EULER_GAMMA,
)
from .system import (
    ChannelStats,
    NetworkConfig,
    dbm_to_watt,
    db_to_linear,
    threshold,
    threshold_ratio,
)

DEFAULT_U = 30
DEFAULT_N = 20
DEFAULT_TOL = 1e-8

# below this normalised argument the CDF is summed from its power series,
# which avoids the cancellation in 1 - ccdf
_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 40

AsymptoticVariant = Literal["ipsic-floor", "psic-q1", "psic-q2", "oma-q1", "oma-q2"]


# ---------------------------------------------------------------------------
# Cascade-gain distribution
# ---------------------------------------------------------------------------

def _digamma_int(n: int) -> float:
    """psi(n) for a positive integer n."""
    return -EULER_GAMMA + math.fsum(1.0 / k for k in range(1, n))


def _cdf_series(z: np.ndarray, Q: int) -> np.ndarray:
    # A&S 9.6.11 written for z^(Q/2) K_Q(2 sqrt z); the k = 0 term cancels the 1
    lg = math.lgamma(Q)
    finite = np.zeros_like(z)
    for k in range(1, Q):
        c = math.exp(math.lgamma(Q - k) - math.lgamma(k + 1) - lg)
        finite += c * (-z) ** k
    logz = np.log(z)
    logpart = np.zeros_like(z)
    for j in range(_SERIES_TERMS):
        c = math.exp(-math.lgamma(j + 1) - math.lgamma(Q + j + 1) - lg)
        logpart += c * z ** (Q + j) * (logz - _digamma_int(j + 1) - _digamma_int(Q + j + 1))
    sign = 1.0 if Q % 2 else -1.0
    return -(finite + sign * logpart)


def _log_ccdf_bessel(z: np.ndarray, Q: int) -> np.ndarray:
    s = 2.0 * np.sqrt(z)
    ks = bessel_k_int(Q, s, scaled=True)
    return math.log(2.0) - math.lgamma(Q) + 0.5 * Q * np.log(z) + np.log(ks) - s


def cascade_cdf(z, Q: int):
    """CDF of the normalised cascade gain of ``Q`` summed element products."""
    za = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(za < 0) or np.any(np.isnan(za)):
        raise ValueError("cascade_cdf needs z >= 0")
    out = np.ones_like(za)
    small = (za > 0) & (za < _SERIES_CUTOFF)
    mid = (za >= _SERIES_CUTOFF) & np.isfinite(za)
    out[za == 0] = 0.0
    if small.any():
        out[small] = _cdf_series(za[small], Q)
    if mid.any():
        out[mid] = -np.expm1(_log_ccdf_bessel(za[mid], Q))
    return float(out[0]) if np.ndim(z) == 0 else out


def cascade_ccdf(z, Q: int):
    """Complementary CDF ``(2/Gamma(Q)) z^(Q/2) K_Q(2 sqrt z)``; 1 at z = 0."""
    za = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(za < 0) or np.any(np.isnan(za)):
        raise ValueError("cascade_ccdf needs z >= 0")
    out = np.zeros_like(za)
    small = za < _SERIES_CUTOFF
    mid = (za >= _SERIES_CUTOFF) & np.isfinite(za)
    out[za == 0] = 1.0
    pos = small & (za > 0)
    if pos.any():
        out[pos] = 1.0 - _cdf_series(za[pos], Q)
    if mid.any():
        out[mid] = np.exp(_log_ccdf_bessel(za[mid], Q))
    return float(out[0]) if np.ndim(z) == 0 else out


def cascade_tail(z, order: int):
    """``z^(order/2) K_order(2 sqrt z)`` for ``z > 0``, overflow-free near zero."""
    za = np.asarray(z, dtype=float)
    if order == 0:
        return bessel_k_int(0, 2.0 * np.sqrt(za))
    return 0.5 * math.gamma(order) * cascade_ccdf(za, order)


def ordered_cdf(F, m: int, M: int):
    """CDF of the ``m``-th smallest of ``M`` i.i.d. variables with CDF value ``F``.

    Evaluated as the alternating finite sum
    ``phi_m sum_l C(M-m, l) (-1)^l F^(m+l) / (m+l)``.
    """
    if not 1 <= m <= M:
        raise IndexError(f"rank {m} outside 1..{M}")
    F = np.asarray(F, dtype=float)
    phi = math.factorial(M) / (math.factorial(M - m) * math.factorial(m - 1))
    acc = np.zeros_like(F)
    for l in range(M - m + 1):
        acc = acc + math.comb(M - m, l) * (-1) ** l / (m + l) * F ** (m + l)
    return phi * acc


# ---------------------------------------------------------------------------
# Result containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OutageResult:
    """Per-user outage probabilities.

    ``probability`` is clamped into [0, 1]; ``raw`` keeps the evaluated value.
    ``feasible[i]`` is False where the power allocation cannot support the
    target rates, in which case the probability is 1.
    """

    probability: np.ndarray
    feasible: np.ndarray
    method: str
    raw: np.ndarray

    @classmethod
    def build(cls, raw, feasible, method):
        raw = np.asarray(raw, dtype=float)
        feasible = np.asarray(feasible, dtype=bool)
        p = np.where(feasible, np.clip(raw, 0.0, 1.0), 1.0)
        for a in (p, raw, feasible):
            a.setflags(write=False)
        return cls(p, feasible, method, raw)

    def __getitem__(self, m: int) -> float:
        """Outage of user ``m`` (1-based)."""
        return float(self.probability[m - 1])

    def __len__(self):
        return len(self.probability)


@dataclass(frozen=True)
class ErgodicResult:
    """Ergodic rate of one user in bits per channel use."""

    user: int
    rate: float
    method: str
    raw: float = math.nan
    std_error: float | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(cls, user, raw, method, ceiling=math.inf, **kw):
        return cls(user, min(max(float(raw), 0.0), ceiling), method, float(raw), **kw)


@dataclass(frozen=True)
class EnergyModel:
    """Power-consumption terms in watts; ``kappa`` is the inverse amplifier efficiency."""

    kappa: float
    p_s: float
    p_bs: float
    p_k: float
    p_ue: tuple

    def __post_init__(self):
        object.__setattr__(self, "p_ue", tuple(float(v) for v in self.p_ue))
        if min((self.kappa, self.p_s, self.p_bs, self.p_k) + self.p_ue, default=0.0) < 0:
            raise ValueError("energy model terms must be non-negative")

    @classmethod
    def from_db(cls, kappa: float, p_s_dbw: float, p_bs_dbw: float,
                p_k_dbm: float, p_ue_dbm: float | Sequence[float], num_users: int = 3):
        ue = np.broadcast_to(np.asarray(p_ue_dbm, dtype=float), (num_users,))
        return cls(kappa, float(db_to_linear(p_s_dbw)), float(db_to_linear(p_bs_dbw)),
                   float(dbm_to_watt(p_k_dbm)), tuple(float(v) for v in dbm_to_watt(ue)))

    def total_power(self, reflecting_elements: int) -> float:
        return (self.kappa * self.p_s + self.p_bs + reflecting_elements * self.p_k
                + math.fsum(self.p_ue))

    def with_(self, **changes) -> "EnergyModel":
        from dataclasses import replace
        return replace(self, **changes)


# ---------------------------------------------------------------------------
# Outage
# ---------------------------------------------------------------------------

def _check_rho(rho):
    if not rho > 0:
        raise ValueError("transmit SNR must be positive")


def _psic_user(config: NetworkConfig, stats: ChannelStats, rho: float, m: int):
    ratio = threshold_ratio(config, m)
    if math.isinf(ratio):
        return 1.0, False
    F = cascade_cdf(ratio / rho / stats.cascade(m), config.group_size)
    return float(ordered_cdf(F, m, config.num_users)) ** config.partition, True


def outage_psic(config: NetworkConfig, stats: ChannelStats, rho: float) -> OutageResult:
    """Outage of every NOMA user under perfect SIC."""
    _check_rho(rho)
    vals = [_psic_user(config, stats, rho, m) for m in range(1, config.num_users + 1)]
    return OutageResult.build([v for v, _ in vals], [f for _, f in vals], "exact-psic")


def outage_ipsic(config: NetworkConfig, stats: ChannelStats, rho: float,
                 rule: QuadratureRule | None = None) -> OutageResult:
    """Outage of every NOMA user with residual SIC interference.

    The exponentially distributed residual power is averaged with the
    Gauss-Laguerre ``rule`` inside the power ``P``.  Users without a
    residual term (``m = 1``, or ``varpi * Omega_I = 0``) get the perfect-SIC
    value unchanged.
    """
    _check_rho(rho)
    rule = rule or gauss_laguerre(DEFAULT_U)
    if rule.kind != "laguerre":
        raise ValueError("outage_ipsic needs a Gauss-Laguerre rule")
    M, Q, P = config.num_users, config.group_size, config.partition
    w_res = config.varpi * config.residual_interference
    raws, flags = [], []
    for m in range(1, M + 1):
        if m == 1 or w_res == 0:
            v, ok = _psic_user(config, stats, rho, m)
        else:
            ratio = threshold_ratio(config, m)
            ok = not math.isinf(ratio)
            if ok:
                lam = w_res * rho * rule.nodes + 1.0
                F = cascade_cdf(ratio / rho * lam / stats.cascade(m), Q)
                v = float(np.sum(rule.weights * ordered_cdf(F, m, M))) ** P
            else:
                v = 1.0
        raws.append(v)
        flags.append(ok)
    return OutageResult.build(raws, flags, "exact-ipsic")


def outage_noma(config, stats, rho, rule=None) -> OutageResult:
    """Dispatch on the configured SIC mode."""
    if config.sic_mode == "ipsic":
        return outage_ipsic(config, stats, rho, rule)
    return outage_psic(config, stats, rho)


def oma_threshold_arg(config: NetworkConfig, stats: ChannelStats, rho: float) -> float:
    return threshold(config.oma_target_rate) / (rho * stats.cascade_oma)


def outage_oma(config: NetworkConfig, stats: ChannelStats, rho: float) -> OutageResult:
    """Outage of the orthogonal user with column selection over ``P`` groups."""
    _check_rho(rho)
    F = cascade_cdf(oma_threshold_arg(config, stats, rho), config.group_size)
    return OutageResult.build([F ** config.partition], [True], "oma")


def outage_asymptotic(config: NetworkConfig, stats: ChannelStats, rho: float,
                      variant: AsymptoticVariant,
                      rule: QuadratureRule | None = None) -> OutageResult:
    """High-SNR outage approximations.

    ``ipsic-floor`` is the SNR-independent error floor under imperfect SIC;
    ``psic-q1``/``psic-q2`` and ``oma-q1``/``oma-q2`` are the leading-order
    forms for single-element groups and for ``Q >= 2``.
    """
    _check_rho(rho)
    M, K, P, Q = (config.num_users, config.reflecting_elements,
                  config.partition, config.group_size)
    if variant.endswith("q1") and Q != 1:
        raise ValueError(f"variant {variant} requires Q = 1 (got Q = {Q})")
    if variant.endswith("q2") and Q < 2:
        raise ValueError(f"variant {variant} requires Q >= 2 (got Q = {Q})")

    if variant.startswith("oma"):
        z = oma_threshold_arg(config, stats, rho)
        raw = (-2.0 * z * math.log(math.sqrt(z))) ** K if Q == 1 else (z / (Q - 1)) ** P
        return OutageResult.build([raw], [True], f"asymptotic-{variant}")

    raws, flags = [], []
    for m in range(1, M + 1):
        ratio = threshold_ratio(config, m)
        if math.isinf(ratio):
            raws.append(1.0)
            flags.append(False)
            continue
        coef = math.comb(M, m)
        if variant == "ipsic-floor":
            w_res = config.varpi * config.residual_interference
            if m == 1 or w_res == 0:
                raw = 0.0
            else:
                rule = rule or gauss_laguerre(DEFAULT_U)
                F = cascade_cdf(w_res * ratio * rule.nodes / stats.cascade(m), Q)
                raw = (coef * float(np.sum(rule.weights * F ** m))) ** P
        else:
            z = ratio / rho / stats.cascade(m)
            if variant == "psic-q1":
                raw = (coef * (-2.0 * z * math.log(math.sqrt(z))) ** m) ** K
            elif variant == "psic-q2":
                raw = (coef * (z / (Q - 1)) ** m) ** P
            else:
                raise ValueError(f"unknown asymptotic variant {variant!r}")
        raws.append(raw)
        flags.append(True)
    return OutageResult.build(raws, flags, f"asymptotic-{variant}")


def diversity_fit(outage_fn: Callable[[float], float], rho_lo_db: float, rho_hi_db: float,
                  points: int = 13) -> float:
    """Least-squares slope of ``-log10 P`` against ``log10 rho``.

    ``outage_fn`` takes a linear SNR.  Zero or non-finite probabilities are
    dropped before fitting.
    """
    if not rho_hi_db > rho_lo_db:
        raise ValueError("need rho_hi_db > rho_lo_db")
    db = np.linspace(rho_lo_db, rho_hi_db, points)
    p = np.array([outage_fn(float(db_to_linear(v))) for v in db])
    ok = np.isfinite(p) & (p > 0)
    if ok.sum() < 3:
        raise ValueError("fewer than 3 usable outage values for the slope fit")
    slope = np.polyfit(db[ok] / 10.0, -np.log10(p[ok]), 1)[0]
    return float(slope)


# ---------------------------------------------------------------------------
# Ergodic rates
# ---------------------------------------------------------------------------

def ergodic_psic_m(config: NetworkConfig, stats: ChannelStats, rho: float, m: int,
                   rule: QuadratureRule | None = None) -> ErgodicResult:
    """Ergodic rate of user ``m < M`` under perfect SIC, Gauss-Chebyshev form."""
    _check_rho(rho)
    M = config.num_users
    if not 1 <= m < M:
        raise ValueError(f"ergodic_psic_m needs 1 <= m < M, got m = {m}")
    rule = rule or gauss_chebyshev(DEFAULT_N)
    if rule.kind != "chebyshev":
        raise ValueError("ergodic_psic_m needs a Gauss-Chebyshev rule")
    a = config.power_alloc[m - 1]
    abar = config.interference_share(m)
    if abar <= 0:
        raise ValueError("interference share of user m must be positive")
    if a <= 0:
        return ErgodicResult.build(m, 0.0, "psic-closed")
    x = rule.nodes
    varphi = 1.0 / (rho * stats.cascade(m))
    z = varphi * (1.0 + x) / (abar * (1.0 - x))
    Fm = ordered_cdf(cascade_cdf(z, config.group_size), m, M) ** config.partition
    terms = np.sqrt(1.0 - x * x) / (2.0 * abar + (1.0 + x) * a) * (1.0 - Fm)
    raw = math.pi * a / (rule.order * math.log(2.0)) * math.fsum(terms)
    # quadrature error can push the sum just past log2(1 + a/abar)
    return ErgodicResult.build(m, raw, "psic-closed", ceiling=math.log2(1.0 + a / abar))


def _binomial_tail_integral(n_terms: int, Q: int, c: float, tol: float, label: str) -> float:
    """``c * sum_r C(n, r) (-1)^(r+1) int_0^inf ccdf(z)^r / (1 + c z) dz``."""
    total = []
    for r in range(1, n_terms + 1):
        def f(z, r=r):
            return c * cascade_ccdf(z, Q) ** r / (1.0 + c * z)
        try:
            val = integrate_semi_infinite(f, tol, scale=float(Q))
        except ConvergenceError as exc:
            raise ConvergenceError(f"{label}: integral term r = {r} failed: {exc}") from exc
        total.append(math.comb(n_terms, r) * (-1) ** (r + 1) * val)
    return math.fsum(total)


def ergodic_psic_M(config: NetworkConfig, stats: ChannelStats, rho: float,
                   tol: float = DEFAULT_TOL) -> ErgodicResult:
    """Ergodic rate of the strongest user, as a binomial sum of integrals."""
    _check_rho(rho)
    M, P, Q = config.num_users, config.partition, config.group_size
    a_M = config.power_alloc[M - 1]
    if a_M <= 0:
        return ErgodicResult.build(M, 0.0, "psic-closed")
    c = rho * a_M * stats.cascade(M)
    raw = _binomial_tail_integral(M * P, Q, c, tol, f"user {M}") / math.log(2.0)
    return ErgodicResult.build(M, raw, "psic-closed")


@functools.lru_cache(maxsize=256)
def _phi_normalised(n_max: int, Q: int, tol: float) -> float:
    # int_0^inf F(z)^(n-1) z^((Q+1)/2) K_(Q-1)(2 sqrt z) dz
    def f(z):
        return cascade_cdf(z, Q) ** (n_max - 1) * z * cascade_tail(z, Q - 1)
    return integrate_semi_infinite(f, tol, scale=float(Q))


def ergodic_upper_bound_M(config: NetworkConfig, stats: ChannelStats, rho: float,
                          tol: float = DEFAULT_TOL) -> ErgodicResult:
    """Jensen upper bound ``log2(1 + rho a_M E[g_M])`` on the strongest user's rate.

    The SNR-free integral ``Phi`` is cached per ``(M P, Q, tol)``.
    """
    _check_rho(rho)
    M, P, Q = config.num_users, config.partition, config.group_size
    omega = stats.cascade(M)
    phi = _phi_normalised(M * P, Q, float(tol)) * omega ** ((Q + 3) / 2.0)
    mean_gain = 2.0 * M * P * phi / (math.gamma(Q) * math.sqrt(omega) ** (Q + 1))
    raw = math.log2(1.0 + config.power_alloc[M - 1] * rho * mean_gain)
    return ErgodicResult.build(M, raw, "upper-bound", diagnostics={"phi": phi,
                                                                    "mean_gain": mean_gain})


def ergodic_ceiling(config: NetworkConfig, m: int) -> ErgodicResult:
    """High-SNR limit ``log2(1 + a_m / abar_m)`` of user ``m < M``."""
    abar = config.interference_share(m)
    if abar <= 0:
        raise ValueError("the ceiling is defined only for users with interference")
    return ErgodicResult.build(m, math.log2(1.0 + config.power_alloc[m - 1] / abar), "ceiling")


def ergodic_oma(config: NetworkConfig, stats: ChannelStats, rho: float,
                tol: float = DEFAULT_TOL) -> ErgodicResult:
    """Ergodic rate of the orthogonal user."""
    _check_rho(rho)
    c = rho * stats.cascade_oma
    raw = _binomial_tail_integral(config.partition, config.group_size, c, tol, "oma") / math.log(2.0)
    return ErgodicResult.build(1, raw, "oma")


def ergodic_psic_all(config: NetworkConfig, stats: ChannelStats, rho: float,
                     rule: QuadratureRule | None = None,
                     tol: float = DEFAULT_TOL) -> list[ErgodicResult]:
    out = [ergodic_psic_m(config, stats, rho, m, rule) for m in range(1, config.num_users)]
    out.append(ergodic_psic_M(config, stats, rho, tol))
    return out


def ergodic_ipsic_numeric(config: NetworkConfig, stats: ChannelStats, rho: float,
                          trials: int, seed: int) -> list[ErgodicResult]:
    """Ergodic rates under imperfect SIC, estimated by simulation (no closed form)."""
    from .montecarlo import mc_ergodic_noma

    if trials < 1:
        raise ValueError("trials must be at least 1")
    est = mc_ergodic_noma(config, stats, rho, trials, seed)
    return [ErgodicResult(e.user, e.value, "ipsic-numeric", e.value, e.std_error,
                          {"ci95": (e.ci_lo, e.ci_hi)}) for e in est]


# ---------------------------------------------------------------------------
# Throughput and energy efficiency
# ---------------------------------------------------------------------------

def throughput_delay_limited(outage: OutageResult, config: NetworkConfig) -> float:
    """Fixed-rate throughput ``sum_m (1 - p_m) R_m``."""
    if len(outage) != config.num_users:
        raise ValueError("need one outage value per user")
    return math.fsum((1.0 - p) * r for p, r in zip(outage.probability, config.target_rates))


def throughput_delay_tolerant(rates: Sequence[ErgodicResult]) -> float:
    """Sum of per-user ergodic rates."""
    return math.fsum(r.rate for r in rates)


def energy_efficiency(throughput: float, energy: EnergyModel, reflecting_elements: int) -> float:
    total = energy.total_power(reflecting_elements)
    if total <= 0:
        raise ZeroDivisionError("total power consumption is zero")
    return throughput / total
