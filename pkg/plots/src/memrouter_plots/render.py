"""Render sweep CSVs into figure analogs (SVG/PNG).

Pure rendering layer: every plotted number comes straight from a CSV cell,
never from a model evaluation. The CSV header is validated strictly before
anything is drawn, because the header schema is the only coupling to the
producer.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# fixed hash salt so SVG element ids (and thus output bytes) are stable
matplotlib.rcParams["svg.hashsalt"] = "memrouter-plots"
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["FigureJob", "SchemaError", "render", "main"]

EXPECTED_HEADERS = {
    "perr": ["n_r", "f_hz", "t_pw_s", "m_tol", "p_err"],
    "margin": ["n_rows", "r_line", "r_on", "r_off", "r_t", "k", "k_eff",
               "margin_fraction"],
    "leak_ratio": ["n_rows", "n_si", "r_off", "r_line", "i_cc_leak_a",
                   "i_off_single_a", "ratio", "i_cells_a", "i_fets_a"],
    "trace": ["time_s", "channel", "i_sl_a", "fired", "expected",
              "error_class"],
}


class SchemaError(ValueError):
    """CSV header does not match the expected schema for the figure kind."""


@dataclass(frozen=True)
class FigureJob:
    input_csv: Path
    kind: str
    output: Path
    title: str = ""
    options: dict = field(default_factory=dict)


def _load(job: FigureJob) -> list[dict]:
    if job.kind not in EXPECTED_HEADERS:
        raise ValueError(
            f"unknown figure kind {job.kind!r}; "
            f"known: {', '.join(sorted(EXPECTED_HEADERS))}")
    expected = EXPECTED_HEADERS[job.kind]
    with open(job.input_csv, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{job.input_csv}: empty file, no header") from None
        if header != expected:
            missing = [c for c in expected if c not in header]
            unexpected = [c for c in header if c not in expected]
            raise SchemaError(
                f"{job.input_csv}: header mismatch for kind {job.kind!r}\n"
                f"  expected: {expected}\n"
                f"  got:      {header}\n"
                f"  missing:  {missing}\n"
                f"  unexpected or misplaced: {unexpected}")
        return [dict(zip(expected, row)) for row in reader if row]


def _groups(rows: list[dict], keys: tuple[str, ...]) -> dict:
    out: dict = {}
    for row in rows:
        out.setdefault(tuple(row[k] for k in keys), []).append(row)
    return out


def _draw_perr(ax, rows):
    for key, grp in sorted(_groups(rows, ("n_r", "f_hz", "t_pw_s")).items()):
        xs = [int(r["m_tol"]) for r in grp]
        ys = [float(r["p_err"]) for r in grp]
        ax.plot(xs, ys, marker=".",
                label=f"N={key[0]}, f={key[1]} Hz, Tpw={key[2]} s")
    ax.set_yscale("log")
    ax.set_xlabel("tolerated coincident inputs")
    ax.set_ylabel("error probability")
    ax.axhline(1e-10, color="grey", lw=0.6, ls="--")


def _draw_margin(ax, rows):
    for key, grp in sorted(_groups(rows, ("r_line",)).items(),
                           key=lambda kv: float(kv[0][0])):
        xs = [int(r["n_rows"]) for r in grp]
        ys = [float(r["margin_fraction"]) for r in grp]
        ax.plot(xs, ys, marker=".", label=f"r = {key[0]} ohm")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("channel rows")
    ax.set_ylabel("sensing margin k'/k")


def _draw_leak_ratio(ax, rows):
    for key, grp in sorted(
            _groups(rows, ("n_rows", "r_off", "r_line")).items(),
            key=lambda kv: tuple(float(v) for v in kv[0])):
        xs = [int(r["n_si"]) for r in grp]
        ys = [float(r["ratio"]) for r in grp]
        ax.plot(xs, ys, marker=".",
                label=f"N={key[0]}, Roff={key[1]}, r={key[2]}")
    ax.set_xlabel("simultaneous inputs")
    ax.set_ylabel("accumulated / single off-current")


def _draw_trace(ax, rows):
    styles = {
        "": dict(color="tab:green", marker="|", label="correct"),
        "false_output": dict(color="tab:red", marker="x", label="false output"),
        "missed_output": dict(color="tab:orange", marker="o",
                              label="missed output"),
    }
    for cls, style in styles.items():
        pts = [(float(r["time_s"]), int(r["channel"])) for r in rows
               if r["error_class"] == cls]
        if pts:
            ax.scatter([p[0] for p in pts], [p[1] for p in pts],
                       s=40, **style)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("channel")


DRAWERS = {
    "perr": _draw_perr,
    "margin": _draw_margin,
    "leak_ratio": _draw_leak_ratio,
    "trace": _draw_trace,
}


def render(job: FigureJob) -> Path:
    """Validate the CSV against the kind's schema and write the image.

    An empty CSV body yields a blank-axes figure and a warning on stderr.
    """
    rows = _load(job)
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        DRAWERS[job.kind](ax, rows)
        handles, _ = ax.get_legend_handles_labels()
        if handles and len(handles) <= 12:
            ax.legend(fontsize=7)
    else:
        print(f"warning: {job.input_csv} has no data rows; "
              "rendering blank axes", file=sys.stderr)
    ax.set_title(job.title or f"{job.kind}: {Path(job.input_csv).name}")
    fig.tight_layout()
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    # suppress the date stamp so identical inputs give identical bytes
    fig.savefig(out, metadata={"Date": None} if out.suffix == ".svg" else None)
    plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render a memrouter sweep CSV to an image")
    parser.add_argument("--kind", required=True,
                        choices=sorted(EXPECTED_HEADERS))
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output", required=True)
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    job = FigureJob(input_csv=Path(args.input_csv), kind=args.kind,
                    output=Path(args.output), title=args.title)
    try:
        render(job)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
