"""FrameReport serialization and run summary figures.

The JSONL schema is frozen in docs/report-schema.md. Per-frame processing
time is deliberately absent by default: two replays of the same input must
produce byte-identical report files, and wall-clock timing would break
that. Pass include_timing=True (CLI --timing) to add it back for profiling.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .pipeline import FrameReport


def _round6(x: float) -> float:
    # 0.0 + avoids emitting "-0.0", which would leak sign noise into diffs.
    return 0.0 + round(float(x), 6)


def report_to_dict(report: FrameReport, include_timing: bool = False) -> dict:
    doc = {
        "frame": report.frame_index,
        "t": report.timestamp_ms,
        "status": report.status,
        "box": ([report.user_box.x, report.user_box.y,
                 report.user_box.w, report.user_box.h]
                if report.user_box else None),
        "detection": {
            "kind": report.detection.kind,
            "vec": [report.detection.vector[0], report.detection.vector[1]],
        },
        "command": None,
        "drone": {
            "pos": [_round6(c) for c in report.drone.position],
            "yaw": _round6(report.drone.yaw),
            "vel": [_round6(c) for c in report.drone.velocity],
        },
    }
    if report.command is not None:
        doc["command"] = {
            "kind": report.command.kind,
            "vec": [_round6(c) for c in report.command.vector],
            "speed_norm": _round6(report.command.magnitude_norm),
        }
    if include_timing:
        doc["ms"] = _round6(report.processing_ms)
    return doc


def report_to_json(report: FrameReport, include_timing: bool = False) -> str:
    return json.dumps(report_to_dict(report, include_timing),
                      separators=(",", ":"), sort_keys=False)


def write_reports(reports: Iterable[FrameReport], stream: TextIO,
                  include_timing: bool = False) -> int:
    count = 0
    for report in reports:
        stream.write(report_to_json(report, include_timing) + "\n")
        count += 1
    return count


# --------------------------------------------------------------------------
# Figures

def render_figures(reports: Sequence[FrameReport], stem: str | Path) -> list[Path]:
    """Draw the run-summary charts next to the report file.

    stem is the report path without its suffix; figures are written as
    <stem>.trajectory.png, <stem>.altitude.png and <stem>.gesture.png.
    Returns the written paths.
    """
    stem = Path(stem)
    if not reports:
        return []
    t = [r.timestamp_ms / 1000.0 for r in reports]
    xs = [r.drone.position[0] for r in reports]
    ys = [r.drone.position[1] for r in reports]
    zs = [r.drone.position[2] for r in reports]
    emissions = [(r.timestamp_ms / 1000.0, r.command) for r in reports
                 if r.command is not None]
    written = []

    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    ax.plot(xs, ys, "-", color="tab:blue", lw=1.5, label="drone path")
    ax.plot(xs[0], ys[0], "o", color="tab:green", label="start")
    ax.plot(xs[-1], ys[-1], "s", color="tab:red", label="end")
    ax.set_xlabel("x east [m]")
    ax.set_ylabel("y north [m]")
    ax.set_title("Top-down trajectory")
    ax.axis("equal")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    path = Path(str(stem) + ".trajectory.png")
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 3.2))
    ax.plot(t, zs, "-", color="tab:blue", lw=1.5)
    for et, cmd in emissions:
        color = {"planar": "tab:red", "depth": "tab:purple"}.get(cmd.kind, "gray")
        ax.axvline(et, color=color, alpha=0.35, lw=1)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("altitude z [m]")
    ax.set_title("Altitude (vertical lines: emitted commands)")
    ax.grid(True, alpha=0.3)
    path = Path(str(stem) + ".altitude.png")
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 3.2))
    ax.plot(t, [r.detection.vector[0] for r in reports], "-",
            color="tab:blue", lw=1.0, label="hand vec x")
    ax.plot(t, [r.detection.vector[1] for r in reports], "-",
            color="tab:orange", lw=1.0, label="hand vec y")
    for et, _ in emissions:
        ax.axvline(et, color="tab:red", alpha=0.3, lw=1)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("pixels")
    ax.set_title("Per-frame gesture vector")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    path = Path(str(stem) + ".gesture.png")
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written
