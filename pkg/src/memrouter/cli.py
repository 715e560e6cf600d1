"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration, 3 infeasible design-rule
query, 4 unknown preset.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import analytic, simulate, solver, sweep
from .types import (ConfigError, SpikeTrainSet, SwitchMatrix, apply_overrides,
                    config_from_dict, config_to_dict, default_config,
                    validate_config)

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_UNKNOWN_PRESET = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_BAD_CONFIG):
        super().__init__(message)
        self.code = code


def _load_cfg(args):
    doc = config_to_dict(default_config())
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        for key in ("channel", "device", "transistor"):
            doc.setdefault(key, {}).update(loaded.get(key, {}))
        for key in loaded:
            if key not in doc:
                doc[key] = loaded[key]
    try:
        doc = apply_overrides(doc, args.set or [])
        cfg = config_from_dict(doc)
    except ConfigError as exc:
        raise CliError(str(exc)) from exc
    violations = validate_config(cfg)
    if violations:
        raise CliError("invalid config:\n  " + "\n  ".join(violations))
    return cfg, doc


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def cmd_analytic(args) -> int:
    cfg, _ = _load_cfg(args)
    rep = analytic.effective_onoff_ratio(cfg)
    _emit(args, {
        "i_sl_single_on_a": analytic.i_sl_single_on(cfg),
        "k": rep.k,
        "k_eff": rep.k_eff,
        "margin_fraction": rep.margin_fraction,
    })
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg, _ = _load_cfg(args)
    if args.instance == "-":
        doc = json.load(sys.stdin)
    else:
        with open(args.instance) as fh:
            doc = json.load(fh)
    inst = solver.make_instance(cfg, on_rows=doc.get("on_rows", []),
                                active_rows=doc.get("active_rows", []))
    sol = solver.solve_channel(inst)
    if args.csv:
        drops = solver.ir_drop_profile(inst)
        path = args.out or "channel_profile.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["node", "voltage_v", "branch_current_a", "ir_drop_v"])
            for i in range(cfg.n_rows):
                w.writerow([i + 1, repr(sol.node_voltages[i]),
                            repr(sol.branch_currents[i]), repr(drops[i])])
        print(f"wrote {path}")
        return EXIT_OK
    _emit(args, {
        "i_sl_a": sol.i_sl,
        "node_voltages_v": list(sol.node_voltages),
        "branch_currents_a": list(sol.branch_currents),
    })
    return EXIT_OK


def cmd_mc(args) -> int:
    params = analytic.ErrorModelParams(n_r=args.n_r, f=args.f,
                                       t_pw=args.t_pw, m_tol=args.m_tol)
    est = simulate.perr_monte_carlo(params, duration=args.duration,
                                    seed=args.seed)
    _emit(args, asdict(est) | {"p_analytic": analytic.perr_analytic(params)})
    return EXIT_OK


def _read_matrix_csv(path) -> SwitchMatrix:
    grid = np.loadtxt(path, delimiter=",", dtype=int, ndmin=2)
    return SwitchMatrix(n_wl=grid.shape[0], n_ch=grid.shape[1],
                        state=grid.astype(bool))


def _read_trains_csv(path, n_inputs: int, t_pw: float,
                     duration: float) -> SpikeTrainSet:
    pulses = [[] for _ in range(n_inputs)]
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["input_index", "start_s"]:
            raise CliError(
                f"trains CSV must have header input_index,start_s "
                f"(got {reader.fieldnames})")
        for row in reader:
            pulses[int(row["input_index"])].append(float(row["start_s"]))
    arrays = tuple(np.sort(np.asarray(p, dtype=float)) for p in pulses)
    return SpikeTrainSet(n_inputs=n_inputs, pulses=arrays, t_pw=t_pw,
                         duration=duration)


def cmd_emulate(args) -> int:
    cfg, _ = _load_cfg(args)
    matrix = _read_matrix_csv(args.matrix)
    if matrix.n_wl != cfg.n_rows:
        raise CliError(
            f"matrix has {matrix.n_wl} word lines; set channel.n_rows to match")
    if (args.trains is None) == (args.poisson is None):
        raise CliError("provide exactly one of --trains or --poisson")
    if args.trains:
        trains = _read_trains_csv(args.trains, matrix.n_wl, args.t_pw,
                                  args.duration)
    else:
        try:
            kv = dict(item.split("=", 1) for item in args.poisson.split(","))
            f = float(kv.pop("f"))
        except (ValueError, KeyError) as exc:
            raise CliError(f"--poisson expects f=<rate_hz>: {exc}") from exc
        trains = simulate.gen_poisson_trains(matrix.n_wl, f, args.t_pw,
                                             args.duration, args.seed)
    trace = simulate.emulate(matrix, trains, cfg, mode=args.mode)
    path = args.out or "trace.csv"
    sweep.write_csv(path, simulate.TRACE_HEADER, sweep.trace_rows(trace))
    print(json.dumps({"trace": str(path), "events": len(trace.events),
                      "error_count": trace.error_count}, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg, _ = _load_cfg(args)
    axes = {}
    for axis in args.axis:
        if "=" not in axis:
            raise CliError(f"--axis must look like path=v1,v2,... (got {axis!r})")
        path, raw = axis.split("=", 1)
        axes[path.strip()] = [float(v) for v in raw.split(",")]
    known = {"channel.n_rows", "channel.r_line"}
    unknown = set(axes) - known
    if unknown:
        raise CliError(
            f"unsupported sweep axes {sorted(unknown)}; supported: {sorted(known)}")
    rows = analytic.margin_sweep(
        cfg,
        n_rows_list=[int(v) for v in axes.get("channel.n_rows", [cfg.n_rows])],
        r_line_list=axes.get("channel.r_line", [cfg.r_line]),
    )
    path = args.out or "margin_sweep.csv"
    sweep.write_csv(path, analytic.MARGIN_SWEEP_HEADER, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_figures(args) -> int:
    try:
        paths = sweep.run_preset(args.name, args.out or ".", seed=args.seed,
                                 jobs=args.jobs)
    except sweep.UnknownPresetError as exc:
        raise CliError(str(exc), code=EXIT_UNKNOWN_PRESET) from exc
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_design_rules(args) -> int:
    try:
        report = sweep.design_rules(n_rows=args.n_rows, t_pw=args.t_pw,
                                    p_target=args.p_target, r_on=args.r_on,
                                    f=args.f, r_line=args.r_line,
                                    r_t=args.r_t)
    except sweep.InfeasibleDesignError as exc:
        raise CliError(str(exc), code=EXIT_INFEASIBLE) from exc
    _emit(args, asdict(report))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    per_fet, r_off = solver.calibrate_fet_leak(args.total_leak, args.n_fets,
                                               args.v_read)
    _emit(args, {"i_leak_per_fet_a": per_fet,
                 "r_fet_off_ohm": r_off if np.isfinite(r_off) else None})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memrouter",
        description="Reliability models for memristive crossbar spike routers")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config field by dotted path")
    common.add_argument("--out", help="output file path")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analytic", parents=[common],
                   help="closed-form margin report for the config"
                   ).set_defaults(func=cmd_analytic)

    p = sub.add_parser("solve", parents=[common],
                       help="solve one channel instance")
    p.add_argument("--instance", required=True,
                   help="JSON with on_rows/active_rows index lists ('-' = stdin)")
    p.add_argument("--csv", action="store_true",
                   help="emit the per-node profile table instead of JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mc", parents=[common],
                       help="Monte Carlo error-probability estimate")
    p.add_argument("--n-r", type=int, required=True, dest="n_r")
    p.add_argument("--f", type=float, required=True)
    p.add_argument("--t-pw", type=float, required=True, dest="t_pw")
    p.add_argument("--m-tol", type=int, required=True, dest="m_tol")
    p.add_argument("--duration", type=float, required=True)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("emulate", parents=[common],
                       help="route pulse trains through a switch matrix")
    p.add_argument("--matrix", required=True, help="0/1 CSV grid, row = word line")
    p.add_argument("--trains", help="CSV with input_index,start_s columns")
    p.add_argument("--poisson", help="generated traffic, e.g. f=500")
    p.add_argument("--mode", choices=["ideal", "solver"], default="ideal")
    p.add_argument("--t-pw", type=float, default=1e-6, dest="t_pw")
    p.add_argument("--duration", type=float, default=1e-3)
    p.set_defaults(func=cmd_emulate)

    p = sub.add_parser("sweep", parents=[common],
                       help="margin sweep over config axes")
    p.add_argument("--axis", action="append", default=[],
                   metavar="PATH=V1,V2,...")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", parents=[common],
                       help="emit the data grid behind a named figure preset")
    p.add_argument("name")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("design-rules", parents=[common],
                       help="traffic assumptions -> minimum device requirement")
    p.add_argument("--n-rows", type=int, required=True, dest="n_rows")
    p.add_argument("--t-pw", type=float, required=True, dest="t_pw")
    p.add_argument("--p-target", type=float, required=True, dest="p_target")
    p.add_argument("--r-on", type=float, required=True, dest="r_on")
    p.add_argument("--f", type=float, default=732.0)
    p.add_argument("--r-line", type=float, default=2.5, dest="r_line")
    p.add_argument("--r-t", type=float, default=1.7e3, dest="r_t")
    p.set_defaults(func=cmd_design_rules)

    p = sub.add_parser("calibrate", parents=[common],
                       help="per-FET leakage from a channel total")
    p.add_argument("--total-leak", type=float, required=True, dest="total_leak")
    p.add_argument("--n-fets", type=int, required=True, dest="n_fets")
    p.add_argument("--v-read", type=float, required=True, dest="v_read")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
