"""Command-line entry points.

    pilot run        process a frame directory, wire stream, or scenario
    pilot serve      start the WebSocket/HTTP piloting service
    pilot train-skin build a skin model from labeled pixel images
    pilot bench      per-stage timing table on a synthetic workload

Set PILOT_LOG=DEBUG (or INFO/WARNING/ERROR) to control log verbosity.
"""

from __future__ import annotations

import dataclasses
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import click
import numpy as np

from .cascade import load_cascade
from .errors import PilotError
from .frames import Frame, iter_wire_frames, load_ppm, load_sequence, save_ppm
from .geometry import BoundingBox
from .pipeline import (PilotSession, PipelineConfig, STAGES, annotate,
                       scenario_frames)
from .report import render_figures, write_reports
from .scene import (CameraSpec, Scenario, SceneSpec, TimelineEntry,
                    facing_user_state, load_scenario, render)
from .skin import (load_skin_model, save_skin_model, skin_probability,
                   train_skin_model)
from .tracker import TrackerParams

log = logging.getLogger("gesturepilot")


def _bundled(name: str) -> Path:
    with resources.as_file(resources.files("gesturepilot.assets") / name) as p:
        return Path(p)


def _parse_box(text: str) -> BoundingBox:
    parts = text.split(",")
    if len(parts) != 4:
        raise click.BadParameter("expected x,y,w,h")
    try:
        x, y, w, h = (int(v) for v in parts)
        return BoundingBox(x, y, w, h)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def _parse_tracker(text: str | None) -> TrackerParams:
    if not text:
        return TrackerParams()
    values = {}
    fields = {f.name: f.type for f in dataclasses.fields(TrackerParams)}
    for pair in text.split(","):
        if "=" not in pair:
            raise click.BadParameter(f"expected key=value, got {pair!r}")
        key, _, raw = pair.partition("=")
        key = key.strip()
        if key not in fields:
            raise click.BadParameter(
                f"unknown tracker parameter {key!r}; known: {sorted(fields)}")
        caster = int if fields[key] == "int" else float
        try:
            values[key] = caster(raw)
        except ValueError:
            raise click.BadParameter(f"bad value for {key}: {raw!r}")
    try:
        return TrackerParams(**values)
    except PilotError as exc:
        raise click.BadParameter(str(exc))


def _load_models(cascade_path: str | None, skin_path: str | None):
    cascade = load_cascade(cascade_path or _bundled("face_cascade.xml"))
    skin = load_skin_model(skin_path or _bundled("default_skin.skn"))
    return cascade, skin


def _frame_source(input_spec: str | None, interval_ms: int):
    if input_spec is None:
        raise click.UsageError("needs --input or --scenario")
    kind, _, rest = input_spec.partition(":")
    if kind == "dir":
        return iter(load_sequence(rest, frame_interval_ms=interval_ms))
    if kind == "wire":
        if rest in ("-", "stdin", ""):
            return iter_wire_frames(sys.stdin.buffer)
        raise click.BadParameter("wire input supports only 'wire:-' (stdin)")
    raise click.BadParameter(f"unknown input kind {kind!r}; use dir:PATH or wire:-")


def _dump_skin_rasters(dump_dir: Path, index: int, frame: Frame, skin,
                       threshold: float) -> None:
    """Whole-frame skin likelihood, its thresholded mask, and an overlay
    marking mask pixels by saturating the red channel."""
    prob = skin_probability(skin, frame.pixels)
    mask = prob >= threshold
    gray = np.round(prob * 255).astype(np.uint8)
    save_ppm(dump_dir / f"skin_likelihood_{index:05d}.ppm",
             np.repeat(gray[..., None], 3, axis=2))
    save_ppm(dump_dir / f"skin_mask_{index:05d}.ppm",
             np.repeat(np.where(mask, 255, 0).astype(np.uint8)[..., None], 3, axis=2))
    overlay = frame.pixels.copy()
    # keep "R == 255" an exact mask test: cap naturally-saturated red elsewhere
    overlay[..., 0] = np.where(mask, 255, np.minimum(overlay[..., 0], 254))
    save_ppm(dump_dir / f"skin_overlay_{index:05d}.ppm", overlay)


@click.group()
def main():
    """Gesture-driven quadrotor piloting toolkit."""
    level = os.environ.get("PILOT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


@main.command()
@click.option("--input", "input_spec", default=None,
              help="Frame source: dir:PATH of PPMs, or wire:- for stdin.")
@click.option("--scenario", "scenario_path", type=click.Path(), default=None,
              help="Synthetic closed-loop scenario JSON instead of --input.")
@click.option("--cascade", "cascade_path", type=click.Path(), default=None,
              help="Face cascade XML (bundled default).")
@click.option("--skin-model", "skin_path", type=click.Path(), default=None,
              help="Skin model .skn file (bundled default).")
@click.option("--init-box", default=None,
              help="Manual tracker init box 'x,y,w,h'; skips face detection.")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write FrameReport JSONL here (plus summary figures).")
@click.option("--annotated", "annotated_dir", type=click.Path(), default=None,
              help="Directory for annotated PPM frames.")
@click.option("--dump-skin", "dump_skin_dir", type=click.Path(), default=None,
              help="Write per-frame skin likelihood/mask/overlay rasters here.")
@click.option("--timing", is_flag=True,
              help="Include per-frame processing ms in the JSONL output.")
@click.option("--no-figures", is_flag=True, help="Skip the summary figures.")
@click.option("--tracker", "tracker_spec", default=None,
              help="Tracker overrides, e.g. 'learning_rate=0.05,num_scales=17'.")
@click.option("--frame-interval", default=40, show_default=True,
              help="Synthesized timestamp spacing (ms) for dir inputs.")
def run(input_spec, scenario_path, cascade_path, skin_path, init_box,
        report_path, annotated_dir, dump_skin_dir, timing, no_figures,
        tracker_spec, frame_interval):
    """Process frames through the full pilot pipeline."""
    if (input_spec is None) == (scenario_path is None):
        raise click.UsageError("need exactly one of --input or --scenario")
    cascade, skin = _load_models(cascade_path, skin_path)
    config = PipelineConfig(
        tracker=_parse_tracker(tracker_spec),
        init_box=_parse_box(init_box) if init_box else None,
        frame_interval_ms=frame_interval)

    scenario = frames = None
    try:
        if scenario_path:
            scenario = load_scenario(scenario_path)
        else:
            frames = _frame_source(input_spec, frame_interval)
    except PilotError as exc:
        raise click.ClickException(str(exc))

    out_dir = dump_dir = None
    if annotated_dir:
        out_dir = Path(annotated_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
    if dump_skin_dir:
        dump_dir = Path(dump_skin_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)

    session = PilotSession(config, cascade, skin)
    reports = []
    emitted = 0
    try:
        if scenario is not None:
            frames = scenario_frames(scenario, session)
        for frame in frames:
            report = session.process(frame)
            reports.append(report)
            emitted += report.command is not None
            if out_dir is not None:
                save_ppm(out_dir / f"frame_{report.frame_index:05d}.ppm",
                         annotate(frame, report).pixels)
            if dump_dir is not None:
                _dump_skin_rasters(dump_dir, report.frame_index, frame, skin,
                                   config.skin_threshold)
            if report.status == "tracking_lost":
                break
    except PilotError as exc:
        raise click.ClickException(str(exc))

    if report_path:
        with open(report_path, "w") as fh:
            write_reports(reports, fh, include_timing=timing)
        if not no_figures:
            stem = report_path[:-6] if report_path.endswith(".jsonl") else report_path
            for p in render_figures(reports, stem):
                click.echo(f"figure: {p}")
        click.echo(f"report: {report_path}")

    last = reports[-1] if reports else None
    status = last.status if last else "no frames"
    click.echo(f"{len(reports)} frames, {emitted} commands emitted, "
               f"final status: {status}")
    if last and last.status == "tracking_lost":
        sys.exit(3)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--cascade", "cascade_path", type=click.Path(), default=None)
@click.option("--skin-model", "skin_path", type=click.Path(), default=None)
@click.option("--tracker", "tracker_spec", default=None)
def serve(host, port, cascade_path, skin_path, tracker_spec):
    """Serve the /pilot WebSocket and control endpoints."""
    from .service import serve as serve_app

    cascade, skin = _load_models(cascade_path, skin_path)
    config = PipelineConfig(tracker=_parse_tracker(tracker_spec))
    serve_app(config, cascade, skin, host=host, port=port)


@main.command("train-skin")
@click.option("--skin", "skin_dir", type=click.Path(), required=True,
              help="Directory of PPM images whose every pixel is skin.")
@click.option("--nonskin", "nonskin_dir", type=click.Path(), required=True,
              help="Directory of PPM images with no skin pixels.")
@click.option("--bins", default=64, show_default=True)
@click.option("-o", "--output", type=click.Path(), required=True)
def train_skin(skin_dir, nonskin_dir, bins, output):
    """Train a lookup-table skin model from labeled images."""

    def gather(directory):
        root = Path(directory)
        if not root.is_dir():
            raise click.ClickException(f"no such directory: {root}")
        chunks = [load_ppm(p).reshape(-1, 3) for p in sorted(root.glob("*.ppm"))]
        if not chunks:
            raise click.ClickException(f"no .ppm files in {root}")
        return np.concatenate(chunks)

    try:
        model = train_skin_model(gather(skin_dir), gather(nonskin_dir), bins=bins)
    except PilotError as exc:
        raise click.ClickException(str(exc))
    save_skin_model(model, output)
    click.echo(f"skin model with {bins}^3 cells written to {output}")


@main.command()
@click.option("--frames", "n_frames", default=60, show_default=True)
@click.option("--width", default=640, show_default=True)
@click.option("--height", default=480, show_default=True)
def bench(n_frames, width, height):
    """Time each pipeline stage on a synthetic 'arm up' workload."""
    import time

    cascade, skin = _load_models(None, None)
    base = SceneSpec(camera=CameraSpec(width=width, height=height))
    scenario = Scenario(
        base=base,
        timeline=(TimelineEntry(frames=n_frames, arm_which="right",
                                arm_angle=1.2),),
        drone_start=facing_user_state(base.user_position))
    session = PilotSession(PipelineConfig(), cascade, skin)
    session.drone = scenario.drone_start
    session.user_position = base.user_position
    rendered = []
    for i in range(n_frames):
        frame, _ = render(scenario.spec_at(i), session.drone)
        rendered.append(Frame(frame.pixels, timestamp_ms=i * 40))

    start = time.perf_counter()
    for frame in rendered:
        session.process(frame)
    elapsed = time.perf_counter() - start

    click.echo(f"{n_frames} frames at {width}x{height}: "
               f"{n_frames / elapsed:.1f} fps ({1000 * elapsed / n_frames:.1f} ms/frame)")
    click.echo(f"{'stage':<10}{'total ms':>12}{'ms/frame':>12}")
    for stage in STAGES:
        total = session.stage_ms[stage]
        click.echo(f"{stage:<10}{total:>12.1f}{total / session.stage_frames:>12.2f}")


if __name__ == "__main__":
    main()
