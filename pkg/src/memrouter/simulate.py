"""Stochastic and functional simulation: Poisson pulse trains, concurrency
accounting, Monte Carlo error-probability estimation, and full switch-matrix
routing emulation with comparator thresholding.

All randomness flows through numpy Generators seeded explicitly; identical
seeds give bit-identical trains, traces and estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as beta_dist

from .analytic import ErrorModelParams
from .solver import ChannelInstance, solve_channel
from .types import ChannelConfig, SpikeTrainSet, SwitchMatrix

__all__ = [
    "TraceEvent",
    "RoutingTrace",
    "McEstimate",
    "gen_poisson_trains",
    "max_concurrency",
    "concurrency_dwell_histogram",
    "perr_monte_carlo",
    "route_event",
    "emulate",
    "TRACE_HEADER",
]

TRACE_HEADER = ["time_s", "channel", "i_sl_a", "fired", "expected", "error_class"]


@dataclass(frozen=True)
class TraceEvent:
    time: float
    channel: int
    i_sl: float
    output_fired: bool
    expected_fired: bool

    @property
    def error_class(self) -> str:
        if self.output_fired and not self.expected_fired:
            return "false_output"
        if self.expected_fired and not self.output_fired:
            return "missed_output"
        return ""


@dataclass(frozen=True)
class RoutingTrace:
    """Chronological routing decisions plus per-class error totals."""

    events: tuple
    error_count: dict

    @staticmethod
    def from_events(events) -> "RoutingTrace":
        counts = {"false_output": 0, "missed_output": 0}
        for ev in events:
            if ev.error_class:
                counts[ev.error_class] += 1
        return RoutingTrace(events=tuple(events), error_count=counts)


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo probability estimate with a 95% confidence halfwidth.

    n_trials is the effective count of independent observations: occupancy
    samples further than one pulse width apart are independent, and a factor
    of two is kept as a correlation-time safety margin.
    """

    p_hat: float
    ci_halfwidth: float
    n_trials: int
    seed: int


def gen_poisson_trains(n_inputs: int, f: float, t_pw: float, duration: float,
                       seed: int) -> SpikeTrainSet:
    """Independent homogeneous Poisson pulse trains of rate f per input."""
    if f < 0:
        raise ValueError(f"f must be >= 0 (got {f})")
    if not duration > 0:
        raise ValueError(f"duration must be > 0 (got {duration})")
    rng = np.random.default_rng(seed)
    pulses = []
    for _ in range(n_inputs):
        count = rng.poisson(f * duration)
        starts = np.unique(rng.uniform(0.0, duration, size=count))
        pulses.append(starts)
    return SpikeTrainSet(n_inputs=n_inputs, pulses=tuple(pulses),
                         t_pw=t_pw, duration=duration)


def _level_dwell(trains: SpikeTrainSet) -> tuple[np.ndarray, int]:
    """Sweep-line over pulse edges; returns (dwell time per level, max level).

    Pulse ends are clipped at the observation window; pulses touching at a
    single instant do not overlap (ends sort before coincident starts).
    """
    starts = np.concatenate([p for p in trains.pulses]) if trains.n_inputs else np.empty(0)
    ends = np.minimum(starts + trains.t_pw, trains.duration)
    keep = ends > starts  # drop pulses fully clipped at the window edge
    starts, ends = starts[keep], ends[keep]
    if starts.size == 0:
        dwell = np.array([trains.duration])
        return dwell, 0
    times = np.concatenate([starts, ends])
    deltas = np.concatenate([np.ones(starts.size, dtype=np.int64),
                             -np.ones(ends.size, dtype=np.int64)])
    order = np.lexsort((deltas, times))  # -1 before +1 at equal times
    times = times[order]
    levels = np.cumsum(deltas[order])
    # piecewise-constant level between consecutive event times
    seg_start = np.concatenate([[0.0], times])
    seg_end = np.concatenate([times, [trains.duration]])
    seg_level = np.concatenate([[0], levels])
    seg_dt = seg_end - seg_start
    max_level = int(seg_level.max())
    dwell = np.bincount(seg_level, weights=seg_dt, minlength=max_level + 1)
    return dwell, max_level


def max_concurrency(trains: SpikeTrainSet) -> int:
    """Largest number of simultaneously active pulses over the window."""
    _, peak = _level_dwell(trains)
    return peak


def concurrency_dwell_histogram(trains: SpikeTrainSet) -> np.ndarray:
    """Time spent at each concurrency level; index = level, sums to duration."""
    dwell, _ = _level_dwell(trains)
    return dwell


def perr_monte_carlo(params: ErrorModelParams, duration: float,
                     seed: int) -> McEstimate:
    """Time-weighted fraction of the window with >= m_tol concurrent pulses.

    This is the stationary occupancy probability the analytic Poisson model
    predicts. The binomial CI uses an effective sample count of
    duration / (2 * t_pw) independent occupancy observations; the exact
    Clopper-Pearson interval replaces the normal approximation in the
    rare-event regime.
    """
    trains = gen_poisson_trains(params.n_r, params.f, params.t_pw, duration, seed)
    dwell = concurrency_dwell_histogram(trains)
    time_ge = float(dwell[params.m_tol:].sum()) if dwell.size > params.m_tol else 0.0
    p_hat = time_ge / duration
    n_eff = max(1, int(duration / (2.0 * params.t_pw)))
    if params.f == 0 or params.lam == 0:
        return McEstimate(p_hat=0.0, ci_halfwidth=0.0, n_trials=n_eff, seed=seed)
    successes = p_hat * n_eff
    if successes < 10:
        # exact Clopper-Pearson on the rounded effective success count
        k = int(round(successes))
        lo = 0.0 if k == 0 else beta_dist.ppf(0.025, k, n_eff - k + 1)
        hi = 1.0 if k == n_eff else beta_dist.ppf(0.975, k + 1, n_eff - k)
        half = (hi - lo) / 2.0
    else:
        half = 1.96 * np.sqrt(p_hat * (1.0 - p_hat) / n_eff)
    return McEstimate(p_hat=p_hat, ci_halfwidth=float(half),
                      n_trials=n_eff, seed=seed)


def route_event(matrix: SwitchMatrix, active_rows, cfg: ChannelConfig,
                mode: str = "ideal"):
    """Evaluate one coincident read of the crossbar.

    Returns (i_sl, fired, expected) arrays over channels. A channel fires
    when its sensed current exceeds i_ref; it is expected to fire when any
    active row's cell in that channel is LRS.
    """
    if matrix.n_wl != cfg.n_rows:
        raise ValueError(
            f"matrix has {matrix.n_wl} word lines but config expects {cfg.n_rows}")
    active = np.zeros(matrix.n_wl, dtype=bool)
    active[list(active_rows)] = True
    expected = matrix.state[active].any(axis=0) if active.any() else np.zeros(
        matrix.n_ch, dtype=bool)

    if mode == "ideal":
        # parallel sum, no line resistance, no FET leakage
        r_cell = np.where(matrix.state[active], cfg.device.r_on, cfg.device.r_off)
        i_sl = (cfg.v_read / (r_cell + cfg.transistor.r_t)).sum(axis=0) \
            if active.any() else np.zeros(matrix.n_ch)
    elif mode == "solver":
        i_sl = np.empty(matrix.n_ch)
        for c in range(matrix.n_ch):
            inst = ChannelInstance(cfg=cfg, cell_state=matrix.state[:, c],
                                   row_active=active)
            i_sl[c] = solve_channel(inst).i_sl
    else:
        raise ValueError(f"mode must be 'ideal' or 'solver' (got {mode!r})")

    fired = i_sl > cfg.i_ref
    return i_sl, fired, expected


def emulate(matrix: SwitchMatrix, trains: SpikeTrainSet, cfg: ChannelConfig,
            mode: str = "ideal") -> RoutingTrace:
    """Event-driven routing emulation of a pulse-train set through the
    crossbar; one comparator evaluation per maximal constant-activity
    interval, errors classified against the ideal switch-matrix output.

    Only channels that fired or were expected to fire are recorded.
    """
    if trains.n_inputs != matrix.n_wl:
        raise ValueError(
            f"trains drive {trains.n_inputs} inputs but matrix has "
            f"{matrix.n_wl} word lines")
    starts = np.concatenate(trains.pulses) if trains.n_inputs else np.empty(0)
    if starts.size == 0:
        return RoutingTrace.from_events([])
    inputs = np.concatenate([
        np.full(p.size, i, dtype=np.int64) for i, p in enumerate(trains.pulses)])
    ends = np.minimum(starts + trains.t_pw, trains.duration)
    times = np.concatenate([starts, ends])
    deltas = np.concatenate([np.ones(starts.size, dtype=np.int64),
                             -np.ones(ends.size, dtype=np.int64)])
    which = np.concatenate([inputs, inputs])
    order = np.lexsort((deltas, times))
    counts = np.zeros(matrix.n_wl, dtype=np.int64)
    events: list[TraceEvent] = []
    pos = 0
    n_ev = times.size
    while pos < n_ev:
        t = times[order[pos]]
        while pos < n_ev and times[order[pos]] == t:
            o = order[pos]
            counts[which[o]] += deltas[o]
            pos += 1
        if pos >= n_ev:
            break  # trailing level is zero by construction
        active = np.flatnonzero(counts > 0)
        if active.size == 0:
            continue
        i_sl, fired, expected = route_event(matrix, active, cfg, mode)
        for c in np.flatnonzero(fired | expected):
            events.append(TraceEvent(time=float(t), channel=int(c),
                                     i_sl=float(i_sl[c]),
                                     output_fired=bool(fired[c]),
                                     expected_fired=bool(expected[c])))
    return RoutingTrace.from_events(events)
