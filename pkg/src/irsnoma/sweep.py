"""Experiment orchestration: YAML scenarios, sweeps and tabular output.

A scenario file has up to three top-level sections::

    network:   # NetworkConfig fields; residual interference given in dB
    sweep:     # grids, schemes, Monte-Carlo budget, quadrature settings
    energy:    # power-consumption terms in dBW / dBm

Every key is optional; omitted keys take the default three-user scenario.
Unknown keys are rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, fields

import numpy as np
import yaml

from . import analytic as an
from .montecarlo import (
    BaselineConfig,
    McEstimate,
    mc_baseline_sweep,
    mc_noma_sweep,
    mc_oma_sweep,
)
from .special import ConvergenceError, gauss_chebyshev, gauss_laguerre
from .system import ConfigError, NetworkConfig, db_to_linear, derive_stats

EXPERIMENTS = ("outage-sweep", "ergodic-sweep", "distance-sweep", "power-grid",
               "energy-sweep", "validate")
SCHEMES = ("irs-noma-ipsic", "irs-noma-psic", "irs-oma", "af-variable-gain", "df-fd", "df-hd")
SCHEME_ALIASES = {"af": "af-variable-gain"}
BASELINES = ("af-variable-gain", "df-fd", "df-hd")
COLUMNS = ("scheme", "user", "metric", "method", "snr_db", "sweep_var", "value",
           "ci_lo", "ci_hi", "trials", "seed", "error")
INFEASIBLE = "infeasible-allocation"
APPROXIMATE = "approximate-closed-form"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """What to run and how.

    Grids are end-inclusive.  ``trials = 0`` disables simulation.
    """

    experiment: str = "outage-sweep"
    snr_db: tuple = tuple(float(v) for v in range(0, 41, 5))
    schemes: tuple = SCHEMES
    d_sr: tuple = tuple(round(0.1 + 0.05 * i, 10) for i in range(17))
    a_theta: tuple = tuple(round(0.05 * i, 10) for i in range(21))
    trials: int = 1_000_000
    seed: int = 0
    quad_u: int = an.DEFAULT_U
    quad_n: int = an.DEFAULT_N
    tol: float = an.DEFAULT_TOL
    loop_interference_db: float = -10.0
    mode: str = "delay-limited"
    tie_transmit_power: bool = False
    noise_dbw: float | None = None
    workers: int | None = None
    output_path: str | None = None

    def __post_init__(self):
        for name in ("snr_db", "schemes", "d_sr", "a_theta"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "schemes", tuple(SCHEME_ALIASES.get(s, s) for s in self.schemes))
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        for name in ("snr_db", "d_sr", "a_theta"):
            grid = getattr(self, name)
            if not grid:
                raise ConfigError(f"{name} grid must be non-empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{name} grid must be strictly increasing")
        if not self.schemes:
            raise ConfigError("schemes must be non-empty")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad:
            raise ConfigError(f"unknown schemes {bad}; choose from {SCHEMES}")
        if not all(0.0 <= a <= 1.0 for a in self.a_theta):
            raise ConfigError("a_theta values must lie in [0, 1]")
        if not all(0.0 < d < 1.0 for d in self.d_sr):
            raise ConfigError("d_sr values must lie strictly between 0 and 1")
        if int(self.trials) != self.trials or self.trials < 0:
            raise ConfigError("trials must be a non-negative integer")
        if not 1 <= self.quad_u <= 200:
            raise ConfigError("quad_u must lie in 1..200")
        if not 1 <= self.quad_n <= 1000:
            raise ConfigError("quad_n must lie in 1..1000")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.mode not in ("delay-limited", "delay-tolerant"):
            raise ConfigError("mode must be delay-limited or delay-tolerant")
        if self.tie_transmit_power and self.noise_dbw is None:
            raise ConfigError("tie_transmit_power needs noise_dbw")

    @property
    def rhos(self) -> np.ndarray:
        return db_to_linear(np.array(self.snr_db))


_ENERGY_DEFAULTS = dict(kappa=1.2, p_s_dbw=5.0, p_bs_dbw=2.0, p_k_dbm=10.0, p_ue_dbm=10.0)
_NETWORK_KEYS = {f.name for f in fields(NetworkConfig)} - {"residual_interference"}
_NETWORK_KEYS |= {"residual_interference_db"}
_SWEEP_KEYS = {f.name for f in fields(SweepSpec)}


def _grid(value, name):
    """A list of numbers, or ``{start, stop, step}`` expanded end-inclusively."""
    if isinstance(value, dict):
        extra = set(value) - {"start", "stop", "step"}
        if extra or len(value) != 3:
            raise ConfigError(f"{name}: a range needs exactly start, stop and step")
        start, stop, step = (float(value[k]) for k in ("start", "stop", "step"))
        if not step > 0 or stop < start:
            raise ConfigError(f"{name}: need step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(n))
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, list):
        return tuple(float(v) for v in value)
    raise ConfigError(f"{name}: expected a number, a list or a range")


def _section(doc, name, allowed):
    sec = doc.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    unknown = sorted(set(sec) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {', '.join(map(str, unknown))}")
    return dict(sec)


def parse_config(text: str, experiment: str | None = None):
    """Parse a YAML scenario into ``(NetworkConfig, SweepSpec, EnergyModel)``."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from exc
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = sorted(set(doc) - {"network", "sweep", "energy"})
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(map(str, unknown))}")

    net = _section(doc, "network", _NETWORK_KEYS)
    if "residual_interference_db" in net:
        net["residual_interference"] = float(db_to_linear(net.pop("residual_interference_db")))
    try:
        config = NetworkConfig(**net)
    except TypeError as exc:
        raise ConfigError(f"network: {exc}") from exc

    sw = _section(doc, "sweep", _SWEEP_KEYS)
    for name in ("snr_db", "d_sr", "a_theta"):
        if name in sw:
            sw[name] = _grid(sw[name], name)
    if experiment is not None:
        sw["experiment"] = experiment
    try:
        spec = SweepSpec(**sw)
    except TypeError as exc:
        raise ConfigError(f"sweep: {exc}") from exc

    en = {**_ENERGY_DEFAULTS, **_section(doc, "energy", set(_ENERGY_DEFAULTS))}
    try:
        energy = an.EnergyModel.from_db(en["kappa"], en["p_s_dbw"], en["p_bs_dbw"],
                                        en["p_k_dbm"], en["p_ue_dbm"], config.num_users)
    except ValueError as exc:
        raise ConfigError(f"energy: {exc}") from exc
    return config, spec, energy


def load_config(path: str, experiment: str | None = None):
    """Read and validate a scenario file; see :func:`parse_config`."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text, experiment)


# ---------------------------------------------------------------------------
# Rows
# ---------------------------------------------------------------------------

def _row(scheme, user, metric, method, snr_db, value, *, sweep_var=None, mc: McEstimate | None = None,
         error=None):
    row = dict(scheme=scheme, user=int(user), metric=metric, method=method,
               snr_db=None if snr_db is None else float(snr_db),
               sweep_var=None if sweep_var is None else float(sweep_var),
               value=None if value is None else float(value),
               ci_lo=None, ci_hi=None, trials=None, seed=None, error=error)
    if mc is not None:
        row.update(ci_lo=mc.ci_lo, ci_hi=mc.ci_hi, trials=mc.trials, seed=mc.seed)
    return row


def _sort_key(row):
    def num(v):
        return (0, -math.inf) if v is None else (1, v)
    return (row["scheme"], row["user"], row["metric"], row["method"],
            num(row["sweep_var"]), num(row["snr_db"]))


class _Runner:
    def __init__(self, config: NetworkConfig, spec: SweepSpec, energy: an.EnergyModel):
        self.config = config
        self.spec = spec
        self.energy = energy
        self.rows: list[dict] = []
        self.failed = False
        self.laguerre = gauss_laguerre(spec.quad_u)
        self.chebyshev = gauss_chebyshev(spec.quad_n)

    def add(self, *args, **kw):
        self.rows.append(_row(*args, **kw))

    def guarded(self, fn, on_error):
        """Evaluate ``fn``; on a numerical error record it and carry on."""
        try:
            return fn()
        except (ConvergenceError, OverflowError, FloatingPointError, ArithmeticError) as exc:
            self.failed = True
            on_error(f"{type(exc).__name__}: {exc}")
            return None

    def noma_config(self, scheme, base=None):
        base = base or self.config
        return base.with_(sic_mode="ipsic" if scheme == "irs-noma-ipsic" else "psic")

    def mc_kw(self):
        return dict(workers=self.spec.workers)

    # -- outage ------------------------------------------------------------

    def outage_block(self, config, snr_db, *, sweep_var=None, asymptotic=True):
        """Outage rows for every requested scheme at the given SNR points."""
        spec = self.spec
        stats = derive_stats(config)
        rhos = db_to_linear(np.array(snr_db, dtype=float))
        for scheme in spec.schemes:
            if scheme.startswith("irs-noma"):
                cfg = self.noma_config(scheme, config)
                for db, rho in zip(snr_db, rhos):
                    def err(msg, db=db):
                        for m in range(1, cfg.num_users + 1):
                            self.add(scheme, m, "outage", "analytic", db, None,
                                     sweep_var=sweep_var, error=msg)
                    res = self.guarded(lambda: an.outage_noma(cfg, stats, rho, self.laguerre), err)
                    if res is not None:
                        for m in range(1, cfg.num_users + 1):
                            self.add(scheme, m, "outage", "analytic", db, res[m],
                                     sweep_var=sweep_var,
                                     error=None if res.feasible[m - 1] else INFEASIBLE)
                    if asymptotic:
                        self._noma_asymptotic(scheme, cfg, stats, db, rho, sweep_var)
                if spec.trials:
                    mc = mc_noma_sweep(cfg, stats, rhos, spec.trials, spec.seed, "outage",
                                       scheme=scheme, **self.mc_kw())
                    for db, row in zip(snr_db, mc):
                        for e in row:
                            self.add(scheme, e.user, "outage", "mc", db, e.value,
                                     sweep_var=sweep_var, mc=e)
            elif scheme == "irs-oma":
                for db, rho in zip(snr_db, rhos):
                    self.add(scheme, 1, "outage", "analytic", db,
                             an.outage_oma(config, stats, rho)[1], sweep_var=sweep_var)
                    if asymptotic:
                        v = "oma-q1" if config.group_size == 1 else "oma-q2"
                        self.add(scheme, 1, "outage", "asymptotic", db,
                                 an.outage_asymptotic(config, stats, rho, v)[1], sweep_var=sweep_var)
                if spec.trials:
                    for db, e in zip(snr_db, mc_oma_sweep(config, stats, rhos, spec.trials,
                                                          spec.seed, "outage", **self.mc_kw())):
                        self.add(scheme, 1, "outage", "mc", db, e.value, sweep_var=sweep_var, mc=e)
            elif spec.trials:
                base = self.baseline(scheme, config, stats)
                for db, e in zip(snr_db, mc_baseline_sweep(base, rhos, spec.trials, spec.seed,
                                                           "outage", **self.mc_kw())):
                    self.add(scheme, 1, "outage", "mc", db, e.value, sweep_var=sweep_var, mc=e)

    def _noma_asymptotic(self, scheme, cfg, stats, db, rho, sweep_var):
        if scheme == "irs-noma-ipsic":
            variant = "ipsic-floor"
        else:
            variant = "psic-q1" if cfg.group_size == 1 else "psic-q2"
        res = an.outage_asymptotic(cfg, stats, rho, variant, self.laguerre)
        for m in range(1, cfg.num_users + 1):
            if scheme == "irs-noma-ipsic" and m == 1:
                continue  # no residual term, hence no floor
            self.add(scheme, m, "outage", "asymptotic", db, res[m], sweep_var=sweep_var,
                     error=None if res.feasible[m - 1] else INFEASIBLE)

    def baseline(self, scheme, config, stats):
        return BaselineConfig.for_network(scheme, config, stats,
                                          float(db_to_linear(self.spec.loop_interference_db)))

    # -- ergodic -----------------------------------------------------------

    def ergodic_rates(self, scheme, config, stats, rhos):
        """``{(user, method): [(value, McEstimate|None), ...]}`` per SNR point."""
        spec = self.spec
        out: dict = {}
        if scheme == "irs-noma-psic":
            cfg = self.noma_config(scheme, config)
            for rho in rhos:
                vals = self.guarded(
                    lambda: an.ergodic_psic_all(cfg, stats, rho, self.chebyshev, spec.tol),
                    lambda msg: None)
                for m in range(1, cfg.num_users + 1):
                    v = None if vals is None else vals[m - 1].rate
                    out.setdefault((m, "analytic"), []).append((v, None))
        elif scheme == "irs-oma":
            for rho in rhos:
                v = self.guarded(lambda: an.ergodic_oma(config, stats, rho, spec.tol).rate,
                                 lambda msg: None)
                out.setdefault((1, "analytic"), []).append((v, None))
        if spec.trials:
            if scheme.startswith("irs-noma"):
                cfg = self.noma_config(scheme, config)
                mc = mc_noma_sweep(cfg, stats, rhos, spec.trials, spec.seed, "ergodic",
                                   scheme=scheme, **self.mc_kw())
                for row in mc:
                    for e in row:
                        out.setdefault((e.user, "mc"), []).append((e.value, e))
            elif scheme == "irs-oma":
                for e in mc_oma_sweep(config, stats, rhos, spec.trials, spec.seed, "ergodic",
                                      **self.mc_kw()):
                    out.setdefault((1, "mc"), []).append((e.value, e))
            else:
                for e in mc_baseline_sweep(self.baseline(scheme, config, stats), rhos,
                                           spec.trials, spec.seed, "ergodic", **self.mc_kw()):
                    out.setdefault((1, "mc"), []).append((e.value, e))
        return out

    def ergodic_sweep(self):
        spec, config = self.spec, self.config
        stats = derive_stats(config)
        rhos = spec.rhos
        for scheme in spec.schemes:
            rates = self.ergodic_rates(scheme, config, stats, rhos)
            for (user, method), vals in sorted(rates.items()):
                for db, (v, e) in zip(spec.snr_db, vals):
                    err = "numerical failure" if v is None and method == "analytic" else None
                    self.add(scheme, user, "ergodic-rate", method, db, v, mc=e, error=err)
            if scheme == "irs-noma-psic":
                M = config.num_users
                for db, rho in zip(spec.snr_db, rhos):
                    for m in range(1, M):
                        self.add(scheme, m, "rate-ceiling", "asymptotic", db,
                                 an.ergodic_ceiling(config, m).rate)
                    ub = self.guarded(lambda: an.ergodic_upper_bound_M(config, stats, rho,
                                                                       spec.tol).rate,
                                      lambda msg, db=db: self.add(scheme, M, "rate-upper-bound",
                                                                  "analytic", db, None, error=msg))
                    if ub is not None:
                        self.add(scheme, M, "rate-upper-bound", "analytic", db, ub)

    # -- experiments -------------------------------------------------------

    def outage_sweep(self):
        self.outage_block(self.config, self.spec.snr_db)

    def distance_sweep(self):
        spec = self.spec
        if len(spec.snr_db) != 1:
            raise ConfigError("distance-sweep needs a single snr_db value")
        for d in spec.d_sr:
            rest = round(1.0 - d, 12)
            cfg = self.config.with_(d_sr=d, d_rm=(rest,) * self.config.num_users, d_rd=rest)
            self.outage_block(cfg, spec.snr_db, sweep_var=d, asymptotic=False)

    def power_grid(self):
        spec = self.spec
        if self.config.num_users != 2:
            raise ConfigError("power-grid needs a two-user network (num_users: 2)")
        schemes = [s for s in spec.schemes if s.startswith("irs-noma")]
        if not schemes:
            raise ConfigError("power-grid needs at least one irs-noma scheme")
        sub = SweepSpec(**{**{f.name: getattr(spec, f.name) for f in fields(SweepSpec)},
                           "schemes": tuple(schemes)})
        runner_spec, self.spec = self.spec, sub
        try:
            for a in spec.a_theta:
                cfg = self.config.with_(power_alloc=(round(1.0 - a, 12), a),
                                        strict_power_order=False)
                self.outage_block(cfg, spec.snr_db, sweep_var=a, asymptotic=False)
        finally:
            self.spec = runner_spec

    def energy_sweep(self):
        spec, config, energy = self.spec, self.config, self.energy
        stats = derive_stats(config)
        rhos = spec.rhos
        K = config.reflecting_elements
        noise = None if spec.noise_dbw is None else float(db_to_linear(spec.noise_dbw))

        def power_model(scheme, rho):
            """Energy model and surface size charged to ``scheme``."""
            e = energy
            if spec.tie_transmit_power:
                e = e.with_(p_s=rho * noise)
            if scheme.startswith("irs-noma"):
                return e, K
            single = e.with_(p_ue=e.p_ue[:1])
            if scheme == "irs-oma":
                return single, K
            # a relay amplifies at the source power and has its own static budget
            return single.with_(p_s=2.0 * e.p_s, p_bs=2.0 * e.p_bs), 0

        for scheme in spec.schemes:
            if spec.mode == "delay-limited":
                thr = self._delay_limited_throughput(scheme, config, stats, rhos)
            else:
                thr = self._delay_tolerant_throughput(scheme, config, stats, rhos)
            for method, vals in sorted(thr.items()):
                for db, rho, v in zip(spec.snr_db, rhos, vals):
                    err = None if v is not None else "numerical failure"
                    self.add(scheme, 0, "throughput", method, db, v, error=err)
                    ee = None if v is None else an.energy_efficiency(v, *power_model(scheme, rho))
                    self.add(scheme, 0, "energy-efficiency", method, db, ee, error=err)

    def _delay_limited_throughput(self, scheme, config, stats, rhos):
        spec = self.spec
        out = {}
        if scheme.startswith("irs-noma"):
            cfg = self.noma_config(scheme, config)
            out["analytic"] = [an.throughput_delay_limited(an.outage_noma(cfg, stats, r, self.laguerre), cfg)
                               for r in rhos]
            if spec.trials:
                mc = mc_noma_sweep(cfg, stats, rhos, spec.trials, spec.seed, "outage",
                                   scheme=scheme, **self.mc_kw())
                out["mc"] = [math.fsum((1 - e.value) * R for e, R in zip(row, cfg.target_rates))
                             for row in mc]
        elif scheme == "irs-oma":
            R = config.oma_target_rate
            out["analytic"] = [(1 - an.outage_oma(config, stats, r)[1]) * R for r in rhos]
            if spec.trials:
                out["mc"] = [(1 - e.value) * R for e in mc_oma_sweep(
                    config, stats, rhos, spec.trials, spec.seed, "outage", **self.mc_kw())]
        elif spec.trials:
            base = self.baseline(scheme, config, stats)
            out["mc"] = [(1 - e.value) * base.target_rate for e in mc_baseline_sweep(
                base, rhos, spec.trials, spec.seed, "outage", **self.mc_kw())]
        return out

    def _delay_tolerant_throughput(self, scheme, config, stats, rhos):
        rates = self.ergodic_rates(scheme, config, stats, rhos)
        out = {}
        for method in ("analytic", "mc"):
            users = sorted(u for (u, meth) in rates if meth == method)
            if not users:
                continue
            vals = []
            for i in range(len(rhos)):
                parts = [rates[(u, method)][i][0] for u in users]
                vals.append(None if any(p is None for p in parts) else math.fsum(parts))
            out[method] = vals
        return out

    def validate(self):
        """z-scores ``(analytic - mc) / se`` for every outage point with enough events."""
        spec, config = self.spec, self.config
        if not spec.trials:
            raise ConfigError("validate needs trials > 0")
        stats = derive_stats(config)
        rhos = spec.rhos
        n = spec.trials
        pairs = []
        for scheme in spec.schemes:
            if scheme.startswith("irs-noma"):
                cfg = self.noma_config(scheme, config)
                mc = mc_noma_sweep(cfg, stats, rhos, n, spec.seed, "outage", scheme=scheme,
                                   **self.mc_kw())
                for i, rho in enumerate(rhos):
                    res = an.outage_noma(cfg, stats, rho, self.laguerre)
                    for e in mc[i]:
                        pairs.append((scheme, e.user, spec.snr_db[i], res[e.user], e))
            elif scheme == "irs-oma":
                mc = mc_oma_sweep(config, stats, rhos, n, spec.seed, "outage", **self.mc_kw())
                for i, rho in enumerate(rhos):
                    pairs.append((scheme, 1, spec.snr_db[i], an.outage_oma(config, stats, rho)[1], mc[i]))
        self.breaches = 0
        self.checked = 0
        # with several columns the residual average sits inside the column power,
        # which is exact only for P = 1; those points are reported but not scored
        approx = config.partition > 1 and config.residual_interference > 0
        for scheme, user, db, p, e in pairs:
            if min(p, 1 - p) * n < 100:
                continue
            z = (p - e.value) / math.sqrt(p * (1 - p) / n)
            if approx and scheme == "irs-noma-ipsic" and user > 1:
                self.add(scheme, user, "outage", "z", db, z, mc=e, error=APPROXIMATE)
                continue
            self.checked += 1
            self.breaches += abs(z) > 3
            self.add(scheme, user, "outage", "z", db, z, mc=e)


@dataclass
class SweepResult:
    rows: list
    failed: bool = False
    checked: int = 0
    breaches: int = 0

    @property
    def breach_fraction(self) -> float:
        return self.breaches / self.checked if self.checked else 0.0


def run_sweep(config: NetworkConfig, spec: SweepSpec, energy: an.EnergyModel | None = None) -> SweepResult:
    """Run ``spec.experiment`` and return deterministically sorted rows."""
    energy = energy or an.EnergyModel.from_db(**{**_ENERGY_DEFAULTS, "num_users": config.num_users})
    runner = _Runner(config, spec, energy)
    getattr(runner, spec.experiment.replace("-", "_"))()
    rows = sorted(runner.rows, key=_sort_key)
    return SweepResult(rows, runner.failed, getattr(runner, "checked", 0),
                       getattr(runner, "breaches", 0))


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.8e}"
    return str(v)


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([format_value(r[c]) for c in COLUMNS])
    return buf.getvalue()


def to_json(rows: list[dict]) -> str:
    def conv(r):
        out = {}
        for c in COLUMNS:
            v = r[c]
            out[c] = float(format_value(v)) if isinstance(v, float) else v
        return out
    return json.dumps([conv(r) for r in rows], indent=1) + "\n"


def emit(rows: list[dict], fmt: str = "csv", path: str | None = None) -> str:
    """Serialise ``rows``; write to ``path`` when given and return the text."""
    if not rows:
        raise ValueError("refusing to emit an empty table")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    text = to_csv(rows) if fmt == "csv" else to_json(rows)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_csv(text: str) -> list[dict]:
    """Parse emitted CSV back into typed rows."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for c in COLUMNS:
            v = rec[c]
            if v == "":
                row[c] = None
            elif c in ("user", "trials", "seed"):
                row[c] = int(v)
            elif c in ("snr_db", "sweep_var", "value", "ci_lo", "ci_hi"):
                row[c] = float(v)
            else:
                row[c] = v
        rows.append(row)
    return rows
