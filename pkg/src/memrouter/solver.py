"""Exact linear solver for one routing channel's resistive ladder.

Electrical model: source-line nodes 1..n chained by segments of r_line, node
n held at the sense terminal's virtual ground. Row i injects current through
a branch of i * r_line (word-line run) + cell resistance + FET resistance,
driven from the read rail at v_read. Active rows use the on-state FET r_t;
inactive rows conduct only through the calibrated FET off-resistance
(v_read / i_leak_per_fet), or are open when leakage is disabled.

The reduced nodal system is tridiagonal, symmetric and strictly diagonally
dominant, solved in O(n). A dense full-mesh oracle (every word-line segment
node explicit) cross-validates the fast path in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .types import ChannelConfig, ChannelSolution, validate_config

__all__ = [
    "ChannelInstance",
    "LeakReport",
    "make_instance",
    "sample_resistance_overrides",
    "solve_channel",
    "dense_oracle_solve",
    "i_cc_leak",
    "calibrate_fet_leak",
    "ir_drop_profile",
]

DENSE_ORACLE_MAX_ROWS = 256


@dataclass(frozen=True)
class ChannelInstance:
    """One concrete channel: config, per-row cell state (True = LRS) and
    per-row activation, plus optional per-row cell resistance overrides."""

    cfg: ChannelConfig
    cell_state: np.ndarray
    row_active: np.ndarray
    r_cell_override: np.ndarray | None = None

    def __post_init__(self):
        n = self.cfg.n_rows
        cell = np.asarray(self.cell_state, dtype=bool)
        act = np.asarray(self.row_active, dtype=bool)
        if cell.shape != (n,) or act.shape != (n,):
            raise ValueError(f"cell_state and row_active must have length {n}")
        for name, arr in (("cell_state", cell), ("row_active", act)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.r_cell_override is not None:
            ov = np.asarray(self.r_cell_override, dtype=float)
            if ov.shape != (n,):
                raise ValueError(f"r_cell_override must have length {n}")
            ov = ov.copy()
            ov.setflags(write=False)
            object.__setattr__(self, "r_cell_override", ov)


@dataclass(frozen=True)
class LeakReport:
    """Accumulated off-state channel current vs. the one-input reference.

    i_cells / i_fets split the total between active off-cell branches and
    inactive-row FET leakage.
    """

    i_cc_leak: float
    i_off_single: float
    ratio: float
    i_cells: float
    i_fets: float


def make_instance(cfg: ChannelConfig, on_rows=(), active_rows=(),
                  r_cell_override=None) -> ChannelInstance:
    """Build an instance from row index lists (0-based)."""
    cell = np.zeros(cfg.n_rows, dtype=bool)
    act = np.zeros(cfg.n_rows, dtype=bool)
    cell[list(on_rows)] = True
    act[list(active_rows)] = True
    return ChannelInstance(cfg=cfg, cell_state=cell, row_active=act,
                           r_cell_override=r_cell_override)


def sample_resistance_overrides(cfg: ChannelConfig, cell_state, seed: int) -> np.ndarray:
    """Per-row lognormal resistance multipliers for device variability.

    Each cell's nominal resistance (r_on or r_off per its state) is scaled by
    an independent exp(sigma_log * z), z ~ N(0, 1), deterministically seeded.
    """
    cell_state = np.asarray(cell_state, dtype=bool)
    nominal = np.where(cell_state, cfg.device.r_on, cfg.device.r_off)
    if cfg.device.sigma_log == 0.0:
        return nominal.astype(float)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(cell_state.size)
    return nominal * np.exp(cfg.device.sigma_log * z)


def _branch_resistances(inst: ChannelInstance) -> np.ndarray:
    """Total series resistance per row branch (inf = open branch)."""
    cfg = inst.cfg
    n = cfg.n_rows
    idx = np.arange(1, n + 1, dtype=float)
    if inst.r_cell_override is not None:
        r_cell = inst.r_cell_override.astype(float)
    else:
        r_cell = np.where(inst.cell_state, cfg.device.r_on, cfg.device.r_off)
    i_leak = cfg.transistor.i_leak_per_fet
    r_fet_off = cfg.v_read / i_leak if i_leak > 0 else math.inf
    r_fet = np.where(inst.row_active, cfg.transistor.r_t, r_fet_off)
    return idx * cfg.r_line + r_cell + r_fet


def _solution_from_nodes(inst: ChannelInstance, volts: np.ndarray,
                         g: np.ndarray) -> ChannelSolution:
    cfg = inst.cfg
    n = cfg.n_rows
    branch = g * (cfg.v_read - volts)
    if cfg.r_line > 0 and n >= 2:
        i_sl = volts[n - 2] / cfg.r_line + branch[n - 1]
    else:
        i_sl = float(np.sum(branch))
    volts = volts.copy()
    volts.setflags(write=False)
    branch.setflags(write=False)
    return ChannelSolution(node_voltages=volts, branch_currents=branch,
                           i_sl=float(i_sl))


def solve_channel(inst: ChannelInstance) -> ChannelSolution:
    """Solve the channel ladder; O(n) banded elimination.

    With r_line = 0 the series terms vanish and every source-line node sits
    at the terminal's virtual ground, so branch currents decouple and are
    summed directly.
    """
    cfg = inst.cfg
    violations = validate_config(cfg)
    if violations:
        raise ValueError("invalid config: " + "; ".join(violations))
    n = cfg.n_rows
    r_branch = _branch_resistances(inst)
    with np.errstate(divide="ignore"):
        g = np.where(np.isfinite(r_branch), 1.0 / r_branch, 0.0)

    if cfg.r_line == 0 or n == 1:
        volts = np.zeros(n)
        return _solution_from_nodes(inst, volts, g)

    gs = 1.0 / cfg.r_line
    m = n - 1  # unknown source-line nodes 1..n-1; node n is virtual ground
    diag = g[:m].copy()
    diag += 2.0 * gs
    diag[0] -= gs  # node 1 has a single series neighbor
    rhs = g[:m] * cfg.v_read
    if m == 1:
        sol = rhs / diag
    else:
        # symmetric positive-definite banded system, upper form for solveh_banded
        ab = np.empty((2, m))
        ab[0, 0] = 0.0
        ab[0, 1:] = -gs
        ab[1] = diag
        sol = solveh_banded(ab, rhs)
    volts = np.concatenate([sol, [0.0]])
    return _solution_from_nodes(inst, volts, g)


def dense_oracle_solve(inst: ChannelInstance) -> ChannelSolution:
    """Full-mesh nodal solve with every word-line segment node explicit.

    Verification oracle only: general dense elimination with partial
    pivoting, guarded to small channels.
    """
    cfg = inst.cfg
    n = cfg.n_rows
    if n > DENSE_ORACLE_MAX_ROWS:
        raise ValueError(f"dense oracle limited to n_rows <= {DENSE_ORACLE_MAX_ROWS}")
    violations = validate_config(cfg)
    if violations:
        raise ValueError("invalid config: " + "; ".join(violations))
    r_branch_total = _branch_resistances(inst)
    r = cfg.r_line
    idx = np.arange(1, n + 1, dtype=float)
    # cell + FET portion of each branch (everything past the word-line run)
    r_tail = r_branch_total - idx * r

    if r == 0:
        with np.errstate(divide="ignore"):
            g = np.where(np.isfinite(r_tail), 1.0 / r_tail, 0.0)
        return _solution_from_nodes(inst, np.zeros(n), g)

    conducting = np.isfinite(r_tail)
    # node numbering: source-line nodes 1..n-1 -> 0..n-2 (node n is ground),
    # then i word-line chain nodes per conducting row i
    sl_of = lambda i: i - 1  # 1-based row -> unknown index, row n -> ground
    n_unknown = n - 1
    wl_base = {}
    for i in range(1, n + 1):
        if conducting[i - 1]:
            wl_base[i] = n_unknown
            n_unknown += i

    G = np.zeros((n_unknown, n_unknown))
    b = np.zeros(n_unknown)

    def stamp(a: int, c: int, cond: float):
        """Conductance between nodes a and c; index -1 = ground, -2 = source."""
        if a >= 0:
            G[a, a] += cond
        if c >= 0:
            G[c, c] += cond
        if a >= 0 and c >= 0:
            G[a, c] -= cond
            G[c, a] -= cond
        if a == -2 and c >= 0:
            b[c] += cond * cfg.v_read
        if c == -2 and a >= 0:
            b[a] += cond * cfg.v_read

    gseg = 1.0 / r
    for i in range(1, n):  # source-line segments between nodes i and i+1
        a = sl_of(i)
        c = sl_of(i + 1) if i + 1 < n else -1
        stamp(a, c, gseg)
    for i in range(1, n + 1):
        if not conducting[i - 1]:
            continue
        base = wl_base[i]
        prev = -2  # read-rail source
        for seg in range(i):  # i word-line segments of r each
            stamp(prev, base + seg, gseg)
            prev = base + seg
        sl = sl_of(i) if i < n else -1
        stamp(prev, sl, 1.0 / r_tail[i - 1])

    volts_all = np.linalg.solve(G, b)
    volts = np.concatenate([volts_all[: n - 1], [0.0]])
    branch = np.zeros(n)
    for i in range(1, n + 1):
        if not conducting[i - 1]:
            continue
        junction = volts_all[wl_base[i] + i - 1]
        v_sl = volts[i - 1]
        branch[i - 1] = (junction - v_sl) / r_tail[i - 1]
    i_sl = float(np.sum(branch))
    volts.setflags(write=False)
    branch.setflags(write=False)
    return ChannelSolution(node_voltages=volts, branch_currents=branch,
                           i_sl=i_sl)


def even_placement(n_rows: int, n_si: int) -> np.ndarray:
    """Deterministic evenly spaced row indices (0-based) for n_si inputs."""
    return np.unique(np.round(np.linspace(0, n_rows - 1, n_si)).astype(int))


def i_cc_leak(cfg: ChannelConfig, n_si: int, placement: str = "even",
              seed: int | None = None) -> LeakReport:
    """Accumulated channel current when n_si simultaneous inputs read an
    all-HRS channel, with every inactive row contributing FET off leakage.

    placement 'even' spaces the active rows deterministically; 'random'
    draws a seeded placement for sensitivity studies.
    """
    if not 1 <= n_si <= cfg.n_rows:
        raise ValueError(f"n_si must be in [1, {cfg.n_rows}] (got {n_si})")

    def total(count: int) -> tuple[float, float, float]:
        if placement == "even":
            rows = even_placement(cfg.n_rows, count)
        elif placement == "random":
            rng = np.random.default_rng(seed)
            rows = rng.choice(cfg.n_rows, size=count, replace=False)
        else:
            raise ValueError(f"unknown placement {placement!r}")
        inst = make_instance(cfg, on_rows=(), active_rows=rows)
        sol = solve_channel(inst)
        i_cells = float(np.sum(sol.branch_currents[inst.row_active]))
        i_fets = float(np.sum(sol.branch_currents[~inst.row_active]))
        return sol.i_sl, i_cells, i_fets

    i_total, i_cells, i_fets = total(n_si)
    i_single, _, _ = total(1)
    return LeakReport(i_cc_leak=i_total, i_off_single=i_single,
                      ratio=i_total / i_single, i_cells=i_cells, i_fets=i_fets)


def calibrate_fet_leak(total_leak: float, n_fets: int, v_read: float) -> tuple[float, float]:
    """Split a measured per-channel off leakage into per-FET current and the
    equivalent linear off-resistance used for inactive-row branches.

    Returns (i_leak_per_fet, r_fet_off); zero total leak disables the path
    (infinite off-resistance).
    """
    if total_leak < 0 or n_fets <= 0 or v_read <= 0:
        raise ValueError("total_leak must be >= 0; n_fets and v_read positive")
    if total_leak == 0:
        return 0.0, math.inf
    per_fet = total_leak / n_fets
    return per_fet, v_read / per_fet


def ir_drop_profile(inst: ChannelInstance) -> np.ndarray:
    """Per-row read-voltage loss to the metal lines.

    Row i's cell branch is driven by v_read minus the word-line run drop
    (i * r * I_i) minus its source-line node potential; the reported drop is
    that line loss, so drop + cell-branch drop = v_read exactly for every
    conducting row.
    """
    sol = solve_channel(inst)
    idx = np.arange(1, inst.cfg.n_rows + 1, dtype=float)
    return idx * inst.cfg.r_line * sol.branch_currents + sol.node_voltages
