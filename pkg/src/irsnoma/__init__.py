"""Performance analysis of IRS-assisted NOMA downlinks with 1-bit coding.

Modules
-------
special
    Bessel K, Gauss-Laguerre / Gauss-Chebyshev rules, semi-infinite integrator.
system
    Scenario configuration, channel statistics and link-level SINRs.
analytic
    Closed-form and asymptotic outage, ergodic rate, throughput and energy efficiency.
montecarlo
    Seeded simulation of the same metrics plus relaying baselines.
sweep, cli
    Experiment orchestration and the ``irsnoma`` command.
"""

from .system import NetworkConfig, ChannelStats, derive_stats, default_config, threshold
from .analytic import (
    EnergyModel,
    ErgodicResult,
    OutageResult,
    outage_ipsic,
    outage_psic,
    outage_oma,
    outage_asymptotic,
    ergodic_psic_m,
    ergodic_psic_M,
    ergodic_upper_bound_M,
    ergodic_oma,
    energy_efficiency,
)

__all__ = [
    "NetworkConfig", "ChannelStats", "derive_stats", "default_config", "threshold",
    "EnergyModel", "ErgodicResult", "OutageResult", "outage_ipsic", "outage_psic",
    "outage_oma", "outage_asymptotic", "ergodic_psic_m", "ergodic_psic_M",
    "ergodic_upper_bound_M", "ergodic_oma", "energy_efficiency",
]
__version__ = "0.1.0"
