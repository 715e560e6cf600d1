import numpy as np
import pytest
from scipy.special import gammainc

from memrouter.analytic import ErrorModelParams, perr_analytic
from memrouter.simulate import (concurrency_dwell_histogram, emulate,
                                gen_poisson_trains, max_concurrency,
                                perr_monte_carlo, route_event)
from memrouter.sweep import demo_fig2_setup, error_fig3_setup
from memrouter.types import (ChannelConfig, DeviceParams, SpikeTrainSet,
                             SwitchMatrix, TransistorParams)


def make_cfg(**kw):
    base = dict(n_rows=8, r_line=0.0, v_read=0.2, i_ref=6e-6,
                device=DeviceParams(r_on=10e3, r_off=250e3),
                transistor=TransistorParams())
    base.update(kw)
    return ChannelConfig(**base)


# --- Poisson train generation ---------------------------------------------------

def test_zero_rate_gives_empty_trains():
    trains = gen_poisson_trains(16, 0.0, 1e-6, 1.0, seed=1)
    assert all(p.size == 0 for p in trains.pulses)


def test_same_seed_same_trains():
    a = gen_poisson_trains(64, 500.0, 1e-6, 0.1, seed=9)
    b = gen_poisson_trains(64, 500.0, 1e-6, 0.1, seed=9)
    for pa, pb in zip(a.pulses, b.pulses):
        np.testing.assert_array_equal(pa, pb)


def test_total_pulse_count_within_four_sigma():
    trains = gen_poisson_trains(4096, 732.0, 1e-6, 1.0, seed=3)
    total = sum(p.size for p in trains.pulses)
    mean = 4096 * 732.0
    assert abs(total - mean) < 4 * np.sqrt(mean)


# --- concurrency accounting -------------------------------------------------------

def overlapping_pair(dt):
    pulses = (np.array([1.0]), np.array([1.0 + dt]))
    return SpikeTrainSet(n_inputs=2, pulses=pulses, t_pw=1e-3, duration=3.0)


def test_overlapping_pulses_reach_level_two():
    assert max_concurrency(overlapping_pair(5e-4)) == 2


def test_disjoint_pulses_stay_at_level_one():
    assert max_concurrency(overlapping_pair(5e-3)) == 1


def test_touching_pulses_do_not_overlap():
    # end time == start time is measure-zero, not a coincidence
    assert max_concurrency(overlapping_pair(1e-3)) == 1


def test_dwell_histogram_accounts_for_full_duration():
    trains = gen_poisson_trains(32, 50.0, 1e-3, 2.0, seed=4)
    dwell = concurrency_dwell_histogram(trains)
    assert dwell.sum() == pytest.approx(2.0, abs=1e-9)


def test_dwell_tail_converges_to_poisson_occupancy():
    # pooled over seeds against the infinite-server stationary tail
    n, f, t_pw, m = 4096, 0.73, 1e-3, 5
    lam = n * f * t_pw
    want = float(gammainc(m, lam))
    duration = 2.0
    fracs = []
    for seed in range(20):
        trains = gen_poisson_trains(n, f, t_pw, duration, seed=seed)
        dwell = concurrency_dwell_histogram(trains)
        fracs.append(dwell[m:].sum() / duration)
    pooled = np.mean(fracs)
    n_eff = 20 * duration / t_pw
    sigma = np.sqrt(want * (1 - want) / n_eff)
    assert abs(pooled - want) < 3 * sigma


def test_concurrency_invariant_under_input_relabeling():
    trains = gen_poisson_trains(16, 200.0, 1e-3, 1.0, seed=8)
    rng = np.random.default_rng(0)
    perm = rng.permutation(16)
    shuffled = SpikeTrainSet(n_inputs=16,
                             pulses=tuple(trains.pulses[i] for i in perm),
                             t_pw=trains.t_pw, duration=trains.duration)
    np.testing.assert_allclose(concurrency_dwell_histogram(shuffled),
                               concurrency_dwell_histogram(trains))


# --- Monte Carlo estimator ----------------------------------------------------------

def test_mc_zero_traffic():
    est = perr_monte_carlo(ErrorModelParams(64, 0.0, 1e-3, 2), 10.0, seed=0)
    assert est.p_hat == 0.0 and est.ci_halfwidth == 0.0


def test_mc_level_one_matches_busy_probability():
    params = ErrorModelParams(n_r=32, f=31.25, t_pw=1e-3, m_tol=1)
    want = 1.0 - np.exp(-params.lam)
    est = perr_monte_carlo(params, duration=50.0, seed=2)
    assert abs(est.p_hat - want) < 3 * est.ci_halfwidth


def test_mc_deterministic_for_fixed_seed():
    params = ErrorModelParams(n_r=16, f=100.0, t_pw=1e-3, m_tol=3)
    a = perr_monte_carlo(params, duration=5.0, seed=77)
    b = perr_monte_carlo(params, duration=5.0, seed=77)
    assert a == b


def test_mc_agrees_with_analytic_model():
    params = ErrorModelParams(n_r=64, f=31.25, t_pw=1e-3, m_tol=5)
    want = perr_analytic(params)
    assert 1e-3 <= want <= 1e-1
    est = perr_monte_carlo(params, duration=40.0, seed=5)
    assert abs(est.p_hat - want) <= est.ci_halfwidth


# --- comparator routing ---------------------------------------------------------------

def test_single_on_cell_fires():
    matrix = SwitchMatrix(8, 4, np.zeros((8, 4), dtype=bool))
    state = matrix.state.copy()
    state.setflags(write=True)
    state[3, 1] = True
    matrix = SwitchMatrix(8, 4, state)
    i_sl, fired, expected = route_event(matrix, [3], make_cfg(), mode="ideal")
    assert i_sl[1] == pytest.approx(20e-6, rel=1e-12)
    assert fired[1] and expected[1]
    assert not fired[[0, 2, 3]].any()


def test_nine_coincident_off_cells_false_fire():
    cfg = make_cfg(n_rows=16, transistor=TransistorParams(r_t=1.7e3))
    matrix = SwitchMatrix(16, 2, np.zeros((16, 2), dtype=bool))
    i_sl, fired, expected = route_event(matrix, list(range(9)), cfg, "ideal")
    assert i_sl[0] == pytest.approx(9 * 0.2 / 251.7e3, rel=1e-12)
    assert fired.all() and not expected.any()


def test_no_active_rows_no_output():
    matrix = SwitchMatrix(8, 4, np.ones((8, 4), dtype=bool))
    i_sl, fired, expected = route_event(matrix, [], make_cfg(), "ideal")
    assert not fired.any() and not expected.any()
    assert np.all(i_sl == 0)


def test_route_event_dimension_mismatch():
    matrix = SwitchMatrix(4, 4, np.zeros((4, 4), dtype=bool))
    with pytest.raises(ValueError):
        route_event(matrix, [0], make_cfg(n_rows=8), "ideal")


def test_ideal_and_solver_modes_agree_without_parasitics():
    rng = np.random.default_rng(6)
    cfg = make_cfg(n_rows=12, r_line=0.0)
    matrix = SwitchMatrix(12, 6, rng.random((12, 6)) < 0.4)
    active = list(np.flatnonzero(rng.random(12) < 0.5))
    ii, fi, _ = route_event(matrix, active, cfg, "ideal")
    isv, fs, _ = route_event(matrix, active, cfg, "solver")
    np.testing.assert_allclose(ii, isv, rtol=1e-12)
    np.testing.assert_array_equal(fi, fs)


# --- end-to-end emulation ----------------------------------------------------------

def test_multicast_demo_fires_three_channels():
    cfg, matrix, trains = demo_fig2_setup()
    trace = emulate(matrix, trains, cfg, mode="ideal")
    fired = {ev.channel for ev in trace.events if ev.output_fired}
    assert fired == {20, 64, 100}
    assert trace.error_count == {"false_output": 0, "missed_output": 0}


def test_all_off_coincidence_reproduces_false_output():
    cfg, matrix, trains = error_fig3_setup()
    trace = emulate(matrix, trains, cfg, mode="ideal")
    assert trace.error_count["false_output"] >= 1
    assert trace.error_count["missed_output"] == 0
    assert all(ev.error_class == "false_output" for ev in trace.events)


def test_empty_trains_empty_trace():
    cfg, matrix, _ = demo_fig2_setup()
    empty = SpikeTrainSet(n_inputs=matrix.n_wl,
                          pulses=tuple(np.empty(0) for _ in range(matrix.n_wl)),
                          t_pw=1e-6, duration=1e-4)
    trace = emulate(matrix, empty, cfg, mode="ideal")
    assert trace.events == ()
    assert sum(trace.error_count.values()) == 0


def test_error_counts_match_event_classification():
    cfg, matrix, trains = error_fig3_setup()
    trace = emulate(matrix, trains, cfg, mode="ideal")
    mismatch = sum(1 for ev in trace.events
                   if ev.output_fired != ev.expected_fired)
    assert mismatch == sum(trace.error_count.values())


def test_lower_r_off_never_reduces_false_outputs():
    def count(r_off):
        cfg, matrix, trains = error_fig3_setup(r_off=r_off)
        return emulate(matrix, trains, cfg, "ideal").error_count["false_output"]

    counts = [count(r) for r in (1e6, 500e3, 250e3, 100e3)]
    assert all(a <= b for a, b in zip(counts, counts[1:]))


def test_emulate_deterministic_trace():
    cfg, matrix, _ = demo_fig2_setup()
    trains = gen_poisson_trains(matrix.n_wl, 2e4, 1e-6, 1e-3, seed=12)
    a = emulate(matrix, trains, cfg, "ideal")
    b = emulate(matrix, trains, cfg, "ideal")
    assert a.events == b.events


def test_emulate_dimension_mismatch():
    cfg, matrix, _ = demo_fig2_setup()
    bad = gen_poisson_trains(matrix.n_wl + 1, 100.0, 1e-6, 1e-3, seed=0)
    with pytest.raises(ValueError):
        emulate(matrix, bad, cfg, "ideal")
