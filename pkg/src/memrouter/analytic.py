"""Closed-form channel models: sensed currents, effective on/off ratio,
design-rule inversions, and the Poisson coincidence error-probability model.

All functions are pure; sweep grids can be evaluated in parallel freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from scipy.special import logsumexp

from .types import ChannelConfig, validate_config

__all__ = [
    "MarginReport",
    "ErrorModelParams",
    "i_sl_single_on",
    "effective_onoff_ratio",
    "required_device_ratio",
    "i_sl_two_active",
    "perr_analytic",
    "poisson_tail",
    "min_tolerance_for_perr",
    "margin_sweep",
    "MARGIN_SWEEP_HEADER",
    "ERROR_SWEEP_HEADER",
]

MARGIN_SWEEP_HEADER = [
    "n_rows", "r_line", "r_on", "r_off", "r_t", "k", "k_eff", "margin_fraction",
]
ERROR_SWEEP_HEADER = ["n_r", "f_hz", "t_pw_s", "m_tol", "p_err"]


@dataclass(frozen=True)
class MarginReport:
    """Device on/off ratio k, the sensed (effective) ratio k_eff after line
    and transistor parasitics, and their quotient."""

    k: float
    k_eff: float
    margin_fraction: float


@dataclass(frozen=True)
class ErrorModelParams:
    """Traffic model of one channel: n_r independent Poisson inputs of rate f,
    rectangular pulses of width t_pw, tolerating up to m_tol - 1 coincident
    off-cell pulses before the comparator misfires."""

    n_r: int
    f: float
    t_pw: float
    m_tol: int

    def __post_init__(self):
        if self.n_r < 1:
            raise ValueError(f"n_r must be >= 1 (got {self.n_r})")
        if self.f < 0:
            raise ValueError(f"f must be >= 0 (got {self.f})")
        if not self.t_pw > 0:
            raise ValueError(f"t_pw must be > 0 (got {self.t_pw})")
        if self.m_tol < 1:
            raise ValueError(f"m_tol must be >= 1 (got {self.m_tol})")

    @property
    def lam(self) -> float:
        """Stationary mean number of concurrently active pulses."""
        return self.n_r * self.f * self.t_pw


def _require_valid(cfg: ChannelConfig) -> None:
    violations = validate_config(cfg)
    if violations:
        raise ValueError("invalid config: " + "; ".join(violations))


def _parasitic(cfg: ChannelConfig) -> float:
    """Series parasitic resistance of one routing path: R_T + n * r."""
    return cfg.transistor.r_t + cfg.n_rows * cfg.r_line


def i_sl_single_on(cfg: ChannelConfig) -> float:
    """Sensed current when a single spike reads one LRS cell.

    The full path is the word-line run, the cell, the access FET and the
    source-line run, which always total R_on + R_T + n*r regardless of the
    row position.
    """
    _require_valid(cfg)
    return cfg.v_read / (cfg.device.r_on + _parasitic(cfg))


def effective_onoff_ratio(cfg: ChannelConfig) -> MarginReport:
    """On/off ratio as seen by the sense circuit after parasitics.

    k_eff = (k - 1) / (1 + (R_T + n*r) / R_on) + 1, which collapses to the
    device ratio k when R_T = r = 0.
    """
    _require_valid(cfg)
    k = cfg.device.k
    k_eff = (k - 1.0) / (1.0 + _parasitic(cfg) / cfg.device.r_on) + 1.0
    return MarginReport(k=k, k_eff=k_eff, margin_fraction=k_eff / k)


def required_device_ratio(k_eff_target: float, cfg: ChannelConfig) -> tuple[float, float]:
    """Invert the effective-ratio formula: device k (and r_off) needed so the
    sense circuit sees k_eff_target with this channel's parasitics.

    Returns (k, r_off_min). Exact inverse of effective_onoff_ratio.
    """
    _require_valid(cfg)
    if not k_eff_target > 1.0:
        raise ValueError(f"k_eff_target must exceed 1 (got {k_eff_target})")
    k = (k_eff_target - 1.0) * (1.0 + _parasitic(cfg) / cfg.device.r_on) + 1.0
    return k, k * cfg.device.r_on


def i_sl_two_active(cfg: ChannelConfig, i: int, j: int, state_j: str = "off") -> float:
    """Sensed current with two coincident spikes: an LRS cell at row i and a
    second cell (LRS or HRS per state_j) at row j, i < j.

    Series-parallel reduction of the shared read rail: the common run to row
    i, the two branches merging at row j's source-line node, then the common
    run to the sense terminal. Always exceeds the single-spike current.
    """
    _require_valid(cfg)
    n = cfg.n_rows
    if not (1 <= i < j <= n):
        raise IndexError(f"need 1 <= i < j <= n_rows, got i={i}, j={j}, n={n}")
    if state_j not in ("on", "off"):
        raise ValueError(f"state_j must be 'on' or 'off' (got {state_j!r})")
    r = cfg.r_line
    r_t = cfg.transistor.r_t
    r_j = cfg.device.r_on if state_j == "on" else cfg.device.r_off
    branch_i = cfg.device.r_on + r_t + (j - i) * r
    branch_j = r_j + r_t + (j - i) * r
    merged = branch_i * branch_j / (branch_i + branch_j)
    return cfg.v_read / (i * r + merged + (n - j) * r)


def poisson_tail(m: int, lam: float) -> float:
    """Upper tail P(N >= m) of a Poisson(lam) count, via log-domain summation.

    Summed with log-gamma terms and logsumexp so probabilities far below
    naive double underflow (1e-30 and smaller) remain representable.
    """
    if lam <= 0.0:
        return 0.0 if m >= 1 else 1.0
    if m <= 0:
        return 1.0
    log_lam = math.log(lam)
    log_terms = []
    k = m
    log_term = k * log_lam - lam - math.lgamma(k + 1)
    peak = log_term
    while True:
        log_terms.append(log_term)
        k += 1
        log_term += log_lam - math.log(k)
        peak = max(peak, log_term)
        if k > lam and log_term < peak - 80.0:
            break
    return float(min(1.0, math.exp(logsumexp(log_terms))))


def perr_analytic(p: ErrorModelParams) -> float:
    """Probability of an undesired output pulse from accumulated off-cell
    currents.

    The concurrent-pulse count of n_r superposed Poisson pulse trains is, in
    steady state, Poisson with mean lam = n_r * f * t_pw (infinite-server
    occupancy); an error state is reached whenever m_tol or more pulses
    overlap. Returns the stationary occupancy probability P(N >= m_tol).
    """
    return poisson_tail(p.m_tol, p.lam)


def min_tolerance_for_perr(n_r: int, f: float, t_pw: float, p_target: float) -> int:
    """Smallest coincidence tolerance m with P(N >= m) < p_target."""
    if not 0.0 < p_target < 1.0:
        raise ValueError(f"p_target must be in (0, 1) (got {p_target})")
    lam = n_r * f * t_pw
    m = 1
    limit = int(10 * lam) + 1000  # tail decays super-exponentially past lam
    while poisson_tail(m, lam) >= p_target:
        m += 1
        if m > limit:
            raise RuntimeError("no tolerance found; p_target unreachable")
    return m


def margin_sweep(cfg: ChannelConfig, n_rows_list=None, r_line_list=None) -> list[dict]:
    """Evaluate the effective-ratio report on a grid of channel geometries.

    Returns one row per grid point, keyed by MARGIN_SWEEP_HEADER.
    """
    n_rows_list = list(n_rows_list) if n_rows_list is not None else [cfg.n_rows]
    r_line_list = list(r_line_list) if r_line_list is not None else [cfg.r_line]
    if not n_rows_list or not r_line_list:
        raise ValueError("sweep lists must be non-empty")
    rows = []
    from dataclasses import replace
    for n, r in product(n_rows_list, r_line_list):
        point = replace(cfg, n_rows=int(n), r_line=float(r))
        rep = effective_onoff_ratio(point)
        rows.append({
            "n_rows": int(n),
            "r_line": float(r),
            "r_on": point.device.r_on,
            "r_off": point.device.r_off,
            "r_t": point.transistor.r_t,
            "k": rep.k,
            "k_eff": rep.k_eff,
            "margin_fraction": rep.margin_fraction,
        })
    return rows
