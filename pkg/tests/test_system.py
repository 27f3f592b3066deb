import math

import numpy as np
import pytest

from conftest import ks_distance
from irsnoma.analytic import cascade_cdf, ordered_cdf
from irsnoma.system import (
    ChannelDraw,
    ChannelStats,
    Codebook,
    ConfigError,
    NetworkConfig,
    cascade_gains,
    db_to_linear,
    derive_stats,
    feasible,
    oma_gain,
    order_users,
    rank_gains,
    sample_draw,
    sinr_noma,
    snr_oma,
    spawn_rng,
    default_config,
    threshold,
    threshold_ratio,
)


# --- configuration ------------------------------------------------------------

def test_default_scenario():
    c = default_config()
    assert c.num_users == 3 and c.power_alloc == (0.5, 0.4, 0.1)
    assert c.target_rates == (0.6, 1.6, 2.0)
    assert c.oma_target_rate == pytest.approx(4.2)
    assert c.residual_interference == pytest.approx(0.1)
    assert c.varpi == 0
    assert c.with_(sic_mode="ipsic").varpi == 1


@pytest.mark.parametrize("kw, msg", [
    (dict(reflecting_elements=3, partition=2, group_size=2), "K must equal P·Q"),
    (dict(num_users=2, power_alloc=(0.3, 0.7), target_rates=(0.1, 0.2), d_rm=(0.5, 0.4)),
     "a_1 >= a_2"),
    (dict(power_alloc=(0.5, 0.4, 0.2)), "sum to 1"),
    (dict(power_alloc=(0.6, 0.4, 0.0)), "positive"),
    (dict(d_sr=0.0), "distances"),
    (dict(pathloss_exponent=0.0), "pathloss"),
    (dict(residual_interference=-1.0), "residual"),
    (dict(target_rates=(0.6, 1.6)), "one entry per user"),
    (dict(sic_mode="maybe"), "sic_mode"),
    (dict(ordering_mode="random"), "ordering_mode"),
    (dict(num_users=0), "num_users"),
])
def test_config_validation(kw, msg):
    with pytest.raises(ConfigError, match=msg):
        default_config(**kw)


def test_relaxed_power_order_allows_zero_and_inversion():
    c = default_config(num_users=2, power_alloc=(0.0, 1.0), target_rates=(0.1, 0.4),
                      d_rm=(0.5, 0.4), strict_power_order=False)
    assert not feasible(c, 1)
    assert math.isinf(threshold_ratio(c, 1))


def test_single_user_supported():
    c = NetworkConfig(num_users=1, power_alloc=(1.0,), target_rates=(1.0,), d_rm=(0.5,))
    assert threshold_ratio(c, 1) == pytest.approx(1.0)


# --- statistics and thresholds -------------------------------------------------

def test_derive_stats_examples():
    assert derive_stats(default_config(d_sr=0.5)).omega_sr == pytest.approx(4.0)
    s = derive_stats(default_config(d_sr=1.0, d_rm=(1.0, 1.0, 1.0), pathloss_exponent=3.7))
    assert s.omega_sr == 1.0 and s.omega_rm == (1.0, 1.0, 1.0)
    s = derive_stats(default_config())
    assert s.omega_sr == pytest.approx(4.0)
    assert s.omega_rm == pytest.approx((4.0, 6.25, 11.1111), rel=1e-5)


def test_stats_positive():
    with pytest.raises(ConfigError):
        ChannelStats(0.0, (1.0,), 1.0)


def test_threshold_examples():
    assert threshold(0.6) == pytest.approx(0.5157166, abs=1e-7)
    assert threshold(2) == 3.0
    assert threshold(0) == 0.0
    with pytest.raises(ValueError):
        threshold(-0.1)


def test_feasibility_of_default_scenario():
    c = default_config()
    assert 0.4 - threshold(1.6) * 0.1 == pytest.approx(0.19686, abs=1e-5)
    assert all(feasible(c, m) for m in (1, 2, 3))


def test_db_helpers():
    assert db_to_linear(-10) == pytest.approx(0.1)
    assert db_to_linear(30) == pytest.approx(1000)


# --- codebook -------------------------------------------------------------------

def test_codebook_structure():
    cb = Codebook(3, 2)
    V = cb.matrix
    assert V.shape == (6, 3)
    assert np.all(V.sum(axis=0) == 2)
    assert np.all(V.T @ V == 2 * np.eye(3))
    assert list(cb.elements(1)) == [2, 3]
    assert sorted(i for p in range(3) for i in cb.elements(p)) == list(range(6))


# --- draws ----------------------------------------------------------------------

def test_sample_draw_reproducible():
    c, s = default_config(), derive_stats(default_config())
    a = sample_draw(c, s, spawn_rng(7, 0), 100)
    b = sample_draw(c, s, spawn_rng(7, 0), 100)
    for f in ("h_sr", "h_rm", "h_rd", "residual"):
        assert np.array_equal(getattr(a, f), getattr(b, f))
    other = sample_draw(c, s, spawn_rng(7, 1), 100)
    assert not np.array_equal(a.h_sr, other.h_sr)


def test_sample_draw_shapes():
    c = default_config(reflecting_elements=4, partition=2, group_size=2)
    s = derive_stats(c)
    d = sample_draw(c, s, spawn_rng(1), None)
    assert d.h_sr.shape == (3, 4) and d.h_rm.shape == (3, 4) and d.h_rd.shape == (4,)
    d = sample_draw(c.with_(channel_model="shared-bs-link"), s, spawn_rng(1), (5, 2))
    assert d.h_sr.shape == (5, 2, 4) and d.h_rm.shape == (5, 2, 3, 4)
    assert d.residual.shape == (5, 2, 3)


@pytest.mark.parametrize("model", ["ordered-iid", "shared-bs-link"])
def test_channel_second_moments(model):
    c = default_config(channel_model=model, reflecting_elements=2, partition=2)
    s = derive_stats(c)
    n = 100_000
    d = sample_draw(c, s, spawn_rng(3), n)
    g = np.abs(d.h_sr[..., 0]) ** 2
    g = g.reshape(n, -1)[:, 0]
    se = s.omega_sr / math.sqrt(n)
    assert abs(g.mean() - s.omega_sr) < 3 * se
    gd = np.abs(d.h_rd[:, 0]) ** 2
    assert abs(gd.mean() - s.omega_rd) < 3 * s.omega_rd / math.sqrt(n)
    r = d.residual[:, 1]
    assert abs(r.mean() - 0.1) < 3 * 0.1 / math.sqrt(n)


def test_zero_residual_is_exact_zero():
    c = default_config(residual_interference=0.0)
    d = sample_draw(c, derive_stats(c), spawn_rng(0), 1000)
    assert np.all(d.residual == 0.0)


# --- cascade gains and ordering --------------------------------------------------

def test_cascade_single_product():
    d = ChannelDraw(np.array([1 + 2j]), np.array([[0.5 - 1j]]), np.array([1j]), np.zeros(1))
    X = cascade_gains(d, Codebook(1, 1))
    assert X.shape == (1, 1)
    assert X[0, 0] == pytest.approx(abs((1 + 2j) * (0.5 - 1j)) ** 2)


def test_cascade_zero_channels():
    d = ChannelDraw(np.zeros(4, complex), np.zeros((3, 4), complex), np.zeros(4, complex),
                    np.zeros(3))
    assert np.all(cascade_gains(d, Codebook(2, 2)) == 0)


def test_cascade_gain_mean():
    c = default_config(reflecting_elements=3, partition=1, group_size=3,
                      channel_model="shared-bs-link")
    s = derive_stats(c)
    n = 100_000
    X = cascade_gains(sample_draw(c, s, spawn_rng(11), n), Codebook.for_config(c))[:, 0, 0]
    mean = 3 * s.omega_sr * s.omega_rm[0]
    # X = omega * Gamma(Q) * Exp(1): variance = omega^2 * Q (Q + 2)
    sd = s.omega_sr * s.omega_rm[0] * math.sqrt(3 * 5)
    assert abs(X.mean() - mean) < 3 * sd / math.sqrt(n)


def test_cascade_cdf_against_closed_form_q2():
    c = default_config(reflecting_elements=2, partition=1, group_size=2,
                      channel_model="shared-bs-link")
    s = derive_stats(c)
    X = cascade_gains(sample_draw(c, s, spawn_rng(5), 100_000), Codebook.for_config(c))
    om = s.omega_sr * s.omega_rm[1]
    assert ks_distance(X[:, 1, 0], lambda x: cascade_cdf(x / om, 2)) < 0.01


def test_order_users_modes():
    X = np.array([[3.0, 1.0], [2.0, 5.0], [4.0, 0.5]])
    assert order_users(X, "per-column").tolist() == [2.0, 3.0, 5.0]
    assert order_users(X, "effective-gain").tolist() == [3.0, 4.0, 5.0]
    col = np.array([[3.0], [1.0], [2.0]])
    assert order_users(col, "per-column").tolist() == order_users(col, "effective-gain").tolist()
    one = np.array([[1.0, 7.0, 2.0]])
    assert order_users(one, "per-column").tolist() == [7.0] == order_users(one, "effective-gain").tolist()
    with pytest.raises(ValueError):
        order_users(X, "bogus")


def test_order_users_non_decreasing():
    X = spawn_rng(2).exponential(size=(1000, 4, 3))
    for mode in ("per-column", "effective-gain"):
        assert np.all(np.diff(order_users(X, mode), axis=-1) >= 0)


def test_ordered_gain_distribution_per_column():
    c = default_config(reflecting_elements=2, partition=2, group_size=1)
    s = derive_stats(c)
    g = rank_gains(c, s, sample_draw(c, s, spawn_rng(21), 1_000_000))
    for m in (1, 2, 3):
        om = s.cascade(m)
        d = ks_distance(g[:, m - 1], lambda x: ordered_cdf(cascade_cdf(x / om, 1), m, 3) ** 2)
        assert d < 0.005, (m, d)


def test_oma_gain_distribution():
    c = default_config(reflecting_elements=2, partition=2, group_size=1)
    s = derive_stats(c)
    gd = oma_gain(sample_draw(c, s, spawn_rng(9), 1_000_000), Codebook.for_config(c))
    assert ks_distance(gd, lambda x: cascade_cdf(x / s.cascade_oma, 1) ** 2) < 0.005


# --- SINR --------------------------------------------------------------------------

def test_sinr_examples():
    c = default_config()
    assert sinr_noma(1.0, 3, 3, 10.0, 0.0, c) == pytest.approx(1.0)
    assert sinr_noma(0.0, 1, 2, 10.0, 0.3, c) == 0.0
    # q = 1 sees a_2 + a_3 = 0.5 as interference
    assert sinr_noma(2.0, 1, 3, 10.0, 0.0, c) == pytest.approx(20 * 0.5 / (20 * 0.5 + 1))


def test_sinr_residual_only_beyond_first_user():
    c = default_config(sic_mode="ipsic")
    assert sinr_noma(1.0, 1, 1, 10.0, 5.0, c) == sinr_noma(1.0, 1, 1, 10.0, 0.0, c)
    assert sinr_noma(1.0, 1, 2, 10.0, 5.0, c) < sinr_noma(1.0, 1, 2, 10.0, 0.0, c)


def test_sinr_monotone():
    c = default_config(sic_mode="ipsic")
    g = np.linspace(0, 10, 50)
    s = sinr_noma(g, 2, 3, 100.0, 0.5, c)
    assert np.all(np.diff(s) >= 0)
    r = np.linspace(0, 10, 50)
    assert np.all(np.diff(sinr_noma(1.0, 2, 3, 100.0, r, c)) <= 0)


def test_sinr_index_errors():
    c = default_config()
    with pytest.raises(IndexError):
        sinr_noma(1.0, 3, 2, 10.0, 0.0, c)
    with pytest.raises(IndexError):
        sinr_noma(1.0, 0, 1, 10.0, 0.0, c)
    with pytest.raises(ValueError):
        sinr_noma(1.0, 1, 1, 0.0, 0.0, c)


def test_snr_oma():
    assert snr_oma(0.0, 10.0) == 0.0
    assert snr_oma(2.5, 10.0) == 25.0


def test_spawn_rng_streams_differ():
    a = spawn_rng(1, 0).random(5)
    b = spawn_rng(1, 1).random(5)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, spawn_rng(1, 0).random(5))
