"""CSV and SVG writers for run results and comparisons."""
from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .compare import CONDITIONS, Comparison, _label  # noqa: E402
from .runner import RunResult  # noqa: E402

PANELS = (
    ("Output response", ("r1", "y")),
    ("Control signal", ("u",)),
    ("Total disturbance estimation error", ("e3", "zeta3")),
)
LEGEND = {"r1": "r1 (TD)", "y": "y", "u": "u", "e3": "e3 (inner)", "zeta3": "zeta3 (outer)"}


def _num(v: float) -> str:
    return f"{v:.9g}"


def _write_text(path, text: str) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def trace_csv(result: RunResult) -> str:
    trace = result.trace
    if trace.grid.size < 2:
        raise ValueError("trace is shorter than one output grid step")
    names = trace.names
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + names)
    cols = [trace[n] for n in names]
    for k, t in enumerate(trace.grid):
        writer.writerow([_num(t)] + [_num(c[k]) for c in cols])
    return buf.getvalue()


def export_csv(result: RunResult, path) -> Path:
    """Header of channel names, one row per grid sample, 9 significant digits."""
    return _write_text(path, trace_csv(result))


def comparison_csv(comp: Comparison) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    rows = comp.rows()
    writer.writerow(rows[0])
    for row in rows[1:]:
        writer.writerow([row[0]] + [_num(v) for v in row[1:]])
    return buf.getvalue()


def export_comparison_csv(comp: Comparison, path) -> Path:
    return _write_text(path, comparison_csv(comp))


def _panels(trace):
    found = [(title, [c for c in chans if c in trace]) for title, chans in PANELS]
    found = [(title, chans) for title, chans in found if chans]
    if not found:
        found = [(name, [name]) for name in trace.names]
    return found


def _save(fig, path) -> Path:
    path = Path(path)
    with plt.rc_context({"svg.hashsalt": "nested-adrc", "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def export_svg(obj, path) -> Path:
    """Plot a run (stacked panels) or a comparison (2x2 response grid)."""
    if isinstance(obj, Comparison):
        return _comparison_svg(obj, path)
    trace = obj.trace
    panels = _panels(trace)
    fig, axes = plt.subplots(len(panels), 1, figsize=(7, 2.4 * len(panels)), squeeze=False)
    for ax, (title, chans) in zip(axes[:, 0], panels):
        for name in chans:
            ax.plot(trace.grid, trace[name], lw=0.8, label=LEGEND.get(name, name))
        ax.set_title(title, fontsize=9)
        ax.set_xlabel("time (s)")
        ax.set_ylabel(", ".join(chans))
        ax.legend(fontsize=7, loc="upper right")
        ax.grid(alpha=0.3)
    fig.suptitle(obj.label, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def _comparison_svg(comp: Comparison, path) -> Path:
    fig, axes = plt.subplots(2, 2, figsize=(10, 6), sharex=True)
    letters = iter("abcd")
    for row, variant in enumerate((comp.baseline, comp.candidate)):
        for col, (cond, _) in enumerate(CONDITIONS):
            ax = axes[row, col]
            trace = comp.runs[(variant, cond)].trace
            ax.plot(trace.grid, trace["r1"], lw=0.8, label="r1 (TD)")
            ax.plot(trace.grid, trace["y"], lw=0.6, label="y")
            ax.set_title(f"({next(letters)}) {_label(variant)} ({cond})", fontsize=9)
            ax.set_xlabel("time (s)")
            ax.set_ylabel("output")
            ax.legend(fontsize=7, loc="upper right")
            ax.grid(alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)
