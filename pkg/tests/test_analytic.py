import math

import numpy as np
import pytest
from scipy.special import gammainc

from memrouter.analytic import (ErrorModelParams, effective_onoff_ratio,
                                i_sl_single_on, i_sl_two_active, margin_sweep,
                                min_tolerance_for_perr, perr_analytic,
                                poisson_tail, required_device_ratio)
from memrouter.types import ChannelConfig, DeviceParams, TransistorParams


def make_cfg(n_rows=1024, r_line=2.5, r_on=10e3, r_off=200e3, r_t=0.0,
             v_read=0.2):
    return ChannelConfig(
        n_rows=n_rows, r_line=r_line, v_read=v_read, i_ref=6e-6,
        device=DeviceParams(r_on=r_on, r_off=r_off),
        transistor=TransistorParams(r_t=r_t))


# --- single-spike current ---------------------------------------------------

def test_single_on_reference_value():
    assert i_sl_single_on(make_cfg()) == pytest.approx(0.2 / 12560, rel=1e-12)


def test_single_on_zero_parasitics():
    cfg = make_cfg(r_line=0.0)
    assert i_sl_single_on(cfg) == pytest.approx(20e-6, rel=1e-12)


def test_single_on_with_transistor():
    cfg = make_cfg(r_t=1.7e3)
    assert i_sl_single_on(cfg) == pytest.approx(0.2 / 14260, rel=1e-12)


# --- effective on/off ratio and its inversion --------------------------------

@pytest.mark.parametrize("k", [2.0, 10.0, 20.0, 100.0])
def test_halved_window_when_line_matches_r_on(k):
    # n*r = r_on, no transistor: sensed ratio collapses to k/2 + 1/2
    cfg = make_cfg(n_rows=100, r_line=100.0, r_off=k * 10e3)
    rep = effective_onoff_ratio(cfg)
    assert rep.k_eff == pytest.approx(k / 2 + 0.5, rel=1e-12)


def test_no_parasitics_keeps_device_ratio():
    rep = effective_onoff_ratio(make_cfg(r_line=0.0))
    assert rep.k_eff == pytest.approx(rep.k, rel=1e-15)
    assert rep.margin_fraction == pytest.approx(1.0)


def test_effective_ratio_reference_value():
    rep = effective_onoff_ratio(make_cfg(r_t=1.7e3))
    assert rep.k_eff == pytest.approx(19 / 1.426 + 1, rel=1e-12)


def test_sensed_ratio_strictly_below_device_ratio():
    rng = np.random.default_rng(3)
    for _ in range(50):
        cfg = make_cfg(n_rows=int(rng.integers(1, 4096)),
                       r_line=float(rng.uniform(0.01, 10)),
                       r_t=float(rng.uniform(0, 3e3)))
        rep = effective_onoff_ratio(cfg)
        assert 1 < rep.k_eff < rep.k
        assert 0 < rep.margin_fraction < 1


def test_required_ratio_reference_value():
    cfg = make_cfg(r_t=1.7e3)
    k, r_off_min = required_device_ratio(10.0, cfg)
    assert k == pytest.approx(9 * 1.426 + 1, rel=1e-12)
    assert r_off_min == pytest.approx(138.34e3, rel=1e-12)


def test_required_ratio_identity_without_parasitics():
    cfg = make_cfg(r_line=0.0)
    k, _ = required_device_ratio(10.0, cfg)
    assert k == pytest.approx(10.0, rel=1e-12)


def test_required_ratio_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(100):
        cfg = make_cfg(n_rows=int(rng.integers(1, 4096)),
                       r_line=float(rng.uniform(0, 10)),
                       r_on=float(rng.uniform(1e3, 1e5)),
                       r_off=float(rng.uniform(1.1e5, 1e7)),
                       r_t=float(rng.uniform(0, 3e3)))
        rep = effective_onoff_ratio(cfg)
        k, _ = required_device_ratio(rep.k_eff, cfg)
        assert k == pytest.approx(cfg.device.k, rel=1e-12)


# --- two coincident spikes ---------------------------------------------------

def test_two_active_decouples_at_zero_line_resistance():
    cfg = make_cfg(r_line=0.0, r_t=1.7e3)
    got = i_sl_two_active(cfg, 1, cfg.n_rows, "off")
    want = 0.2 / (10e3 + 1.7e3) + 0.2 / (200e3 + 1.7e3)
    assert got == pytest.approx(want, rel=1e-12)


def test_two_active_frozen_oracle_value():
    # frozen from a dense nodal solve of the two-branch network
    got = i_sl_two_active(make_cfg(), 256, 768, "off")
    assert got == pytest.approx(1.672045067813164e-05, rel=1e-12)


def test_two_active_always_exceeds_single_spike():
    rng = np.random.default_rng(5)
    cfg = make_cfg(n_rows=64, r_t=1.7e3)
    base = i_sl_single_on(cfg)
    for _ in range(200):
        i = int(rng.integers(1, 64))
        j = int(rng.integers(i + 1, 65))
        for state in ("on", "off"):
            assert i_sl_two_active(cfg, i, j, state) > base


def test_two_active_index_bounds():
    cfg = make_cfg(n_rows=8)
    with pytest.raises(IndexError):
        i_sl_two_active(cfg, 5, 5, "off")
    with pytest.raises(IndexError):
        i_sl_two_active(cfg, 1, 9, "off")


# --- Poisson coincidence error model ------------------------------------------

def test_perr_zero_traffic():
    assert perr_analytic(ErrorModelParams(n_r=4096, f=0.0, t_pw=1e-6,
                                          m_tol=1)) == 0.0


def test_perr_matches_incomplete_gamma_oracle():
    # independent oracle: P(N >= m) = regularized lower incomplete gamma
    for lam in (0.03, 0.75, 2.998272, 4.096):
        for m in (1, 5, 10, 20):
            want = float(gammainc(m, lam))
            assert poisson_tail(m, lam) == pytest.approx(want, rel=1e-12)


def test_perr_reference_point_below_1e10():
    p = perr_analytic(ErrorModelParams(n_r=4096, f=732.0, t_pw=1e-6, m_tol=20))
    assert p == pytest.approx(8.232601725231759e-11, rel=1e-12)
    assert p < 1e-10


def test_perr_representable_far_below_underflow_scale():
    p = poisson_tail(40, 0.5)
    assert 0 < p < 1e-30


def test_perr_monotone_in_tolerance_and_traffic():
    base = ErrorModelParams(n_r=1024, f=500.0, t_pw=1e-6, m_tol=5)
    p0 = perr_analytic(base)
    assert perr_analytic(ErrorModelParams(1024, 500.0, 1e-6, 6)) <= p0
    assert perr_analytic(ErrorModelParams(2048, 500.0, 1e-6, 5)) >= p0
    assert perr_analytic(ErrorModelParams(1024, 900.0, 1e-6, 5)) >= p0
    assert perr_analytic(ErrorModelParams(1024, 500.0, 2e-6, 5)) >= p0


def test_min_tolerance_no_traffic():
    assert min_tolerance_for_perr(4096, 0.0, 1e-6, 1e-10) == 1


def test_min_tolerance_reference_points():
    assert min_tolerance_for_perr(4096, 732.0, 1e-6, 1e-10) == 20
    assert min_tolerance_for_perr(4096, 732.0, 1e-8, 1e-10) <= 10


def test_min_tolerance_is_minimal():
    m = min_tolerance_for_perr(4096, 732.0, 1e-6, 1e-10)
    lam = 4096 * 732.0 * 1e-6
    assert poisson_tail(m, lam) < 1e-10
    assert poisson_tail(m - 1, lam) >= 1e-10


# --- margin sweeps -------------------------------------------------------------

def test_margin_monotone_in_rows_and_line_resistance():
    cfg = make_cfg(r_t=1.7e3)
    rows = margin_sweep(cfg, n_rows_list=[64, 256, 1024, 4096],
                        r_line_list=[0.1, 2.5, 10.0])
    by_r = {}
    for row in rows:
        by_r.setdefault(row["r_line"], []).append(row["margin_fraction"])
    for fracs in by_r.values():
        assert all(a > b for a, b in zip(fracs, fracs[1:]))
    by_n = {}
    for row in rows:
        by_n.setdefault(row["n_rows"], []).append(row["margin_fraction"])
    for fracs in by_n.values():
        assert all(a > b for a, b in zip(fracs, fracs[1:]))


def test_r_on_dominates_k_for_margin():
    def frac(r_on, k):
        cfg = make_cfg(n_rows=512, r_on=r_on, r_off=k * r_on, r_t=1.7e3)
        return effective_onoff_ratio(cfg).margin_fraction

    gain_from_r_on = frac(100e3, 10) - frac(10e3, 10)
    gain_from_k = frac(10e3, 100) - frac(10e3, 10)
    assert gain_from_r_on > gain_from_k


def test_margin_sweep_zero_line_column():
    cfg = make_cfg(r_t=1.7e3)
    rows = margin_sweep(cfg, n_rows_list=[128], r_line_list=[0.0])
    k = cfg.device.k
    want = ((k - 1) / (1 + 1.7e3 / 10e3) + 1) / k
    assert rows[0]["margin_fraction"] == pytest.approx(want, rel=1e-12)


def test_margin_sweep_rejects_empty_axes():
    with pytest.raises(ValueError):
        margin_sweep(make_cfg(), n_rows_list=[], r_line_list=[1.0])
