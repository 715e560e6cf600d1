"""Rendering tests, driven only through the producer's command-line interface.

The preset CSVs are generated by invoking the `memrouter` console script in a
subprocess, so the rendering package is exercised exactly the way a user
would: CSV in, image out, with no shared Python state.
"""

import csv
import shutil
import subprocess
import sys

import pytest

from memrouter_plots import EXPECTED_HEADERS, FigureJob, SchemaError, main, render

PRESET_KINDS = {
    "fig6": "perr",
    "fig8": "margin",
    "fig10": "leak_ratio",
    "fig11": "leak_ratio",
    "demo_fig2": "trace",
    "error_fig3": "trace",
}


@pytest.fixture(scope="session")
def preset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("presets")
    exe = shutil.which("memrouter")
    assert exe, "memrouter console script not on PATH"
    for name in PRESET_KINDS:
        subprocess.run([exe, "figures", name, "--out", str(out)], check=True)
    return out


@pytest.mark.parametrize("preset,kind", sorted(PRESET_KINDS.items()))
def test_each_preset_renders_nonempty_image(preset_dir, tmp_path, preset, kind):
    out = tmp_path / f"{preset}.svg"
    code = main(["--kind", kind, "--in", str(preset_dir / f"{preset}.csv"),
                 "--out", str(out)])
    assert code == 0
    assert out.exists() and out.stat().st_size > 0


def shuffle_header(src, dst):
    with open(src, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    rows[0] = header[1:] + header[:1]
    with open(dst, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)


@pytest.mark.parametrize("preset,kind", sorted(PRESET_KINDS.items()))
def test_shuffled_header_is_rejected(preset_dir, tmp_path, preset, kind):
    bad = tmp_path / f"{preset}_bad.csv"
    shuffle_header(preset_dir / f"{preset}.csv", bad)
    out = tmp_path / "should_not_exist.svg"
    code = main(["--kind", kind, "--in", str(bad), "--out", str(out)])
    assert code != 0
    assert not out.exists()


def test_shuffled_header_nonzero_exit_via_subprocess(preset_dir, tmp_path):
    bad = tmp_path / "fig6_bad.csv"
    shuffle_header(preset_dir / "fig6.csv", bad)
    exe = shutil.which("memrouter-render")
    assert exe
    proc = subprocess.run(
        [exe, "--kind", "perr", "--in", str(bad),
         "--out", str(tmp_path / "x.svg")],
        capture_output=True, text=True)
    assert proc.returncode == 2
    assert "header mismatch" in proc.stderr


def test_error_message_names_mismatched_columns(preset_dir, tmp_path):
    bad = tmp_path / "bad.csv"
    shuffle_header(preset_dir / "fig8.csv", bad)
    job = FigureJob(input_csv=bad, kind="margin", output=tmp_path / "x.svg")
    with pytest.raises(SchemaError) as exc:
        render(job)
    assert "n_rows" in str(exc.value)


def test_wrong_kind_for_valid_csv_is_rejected(preset_dir, tmp_path):
    code = main(["--kind", "margin", "--in", str(preset_dir / "fig6.csv"),
                 "--out", str(tmp_path / "x.svg")])
    assert code == 2


def test_empty_body_renders_blank_axes_with_warning(tmp_path, capsys):
    src = tmp_path / "empty.csv"
    src.write_text(",".join(EXPECTED_HEADERS["trace"]) + "\n")
    out = tmp_path / "empty.svg"
    code = main(["--kind", "trace", "--in", str(src), "--out", str(out)])
    err = capsys.readouterr().err
    assert code == 0
    assert out.stat().st_size > 0
    assert "no data rows" in err


def test_identical_inputs_identical_bytes(preset_dir, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        assert main(["--kind", "margin", "--in",
                     str(preset_dir / "fig8.csv"), "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_png_output_supported(preset_dir, tmp_path):
    out = tmp_path / "fig10.png"
    code = main(["--kind", "leak_ratio", "--in",
                 str(preset_dir / "fig10.csv"), "--out", str(out)])
    assert code == 0
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_criterion_9_summary(preset_dir, tmp_path):
    """Aggregate gate: every preset renders, every shuffled header rejects."""
    ok = True
    for preset, kind in sorted(PRESET_KINDS.items()):
        img = tmp_path / f"{preset}.svg"
        rendered = main(["--kind", kind,
                         "--in", str(preset_dir / f"{preset}.csv"),
                         "--out", str(img)]) == 0 and img.stat().st_size > 0
        bad = tmp_path / f"{preset}_bad.csv"
        shuffle_header(preset_dir / f"{preset}.csv", bad)
        rejected = main(["--kind", kind, "--in", str(bad),
                         "--out", str(tmp_path / "reject.svg")]) != 0
        ok = ok and rendered and rejected
    print(f"CRITERION 9: {'PASS' if ok else 'FAIL'}  "
          f"{len(PRESET_KINDS)} presets rendered, shuffled headers rejected",
          file=sys.stderr)
    assert ok
