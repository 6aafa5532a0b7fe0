"""Per-frame orchestration: detect/track the user, find the gesturing hand,
vote commands out of the frame buffers, and fly the simulated drone.

One PilotSession owns all mutable per-run state (tracker, buffers, rate
limiter, drone) and turns each input frame into exactly one FrameReport.
The commanded velocity persists while the rate limiter suppresses repeat
commands, and is zeroed when the decision tree reports none, so the drone
glides to a stop when the user rests.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import cascade as cascade_mod
from .commands import (DEFAULT_MIN_INTERVAL_MS, PilotCommand, RateLimiter,
                       StateBuffers, generate_command, push_frame)
from .drawing import (BOX_COLOR, COMMAND_COLOR, draw_arrow, draw_circle,
                      draw_cross, draw_rect)
from .errors import InitializationError, InputError, TrackingLostError
from .frames import Frame
from .geometry import BoundingBox
from .hands import HandDetection, NO_HAND, body_anchors, detect_hands
from .scene import Scenario, render
from .sim import DroneState, SimParams, camera_to_body, step
from .skin import SkinModel, detect_skin, erase_body_regions
from .tracker import TrackerParams, TrackerState, init_tracker, track

log = logging.getLogger("gesturepilot.pipeline")

STAGES = ("detect", "track", "skin", "hands", "command", "sim")


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of the frame loop; defaults reproduce the reference setup."""

    tracker: TrackerParams = field(default_factory=TrackerParams)
    sim: SimParams = field(default_factory=SimParams)
    skin_threshold: float = 0.5
    lambda1: float = 0.5    # stretched-hand skin-density weight
    lambda2: float = 0.2    # stretched-hand upward bias
    lambda3: float = 0.013  # front-hand skin-density weight
    lambda4: float = 0.5    # snap-to-vertical ratio
    count_threshold: int = 30
    min_interval_ms: int = DEFAULT_MIN_INTERVAL_MS
    init_frames: int = 100
    init_box: BoundingBox | None = None
    detect_scale_step: float = 1.1
    detect_min_window: int = 24
    detect_min_neighbors: int = 3
    user_position: tuple[float, float, float] = (0.0, 4.0, 0.0)
    drone_start: DroneState = field(default_factory=DroneState)
    frame_interval_ms: int = 40

    def to_dict(self) -> dict:
        t, s = self.tracker, self.sim
        return {
            "tracker": {
                "regularization": t.regularization,
                "learning_rate": t.learning_rate,
                "padding": t.padding,
                "response_sigma_factor": t.response_sigma_factor,
                "num_scales": t.num_scales,
                "scale_step": t.scale_step,
                "scale_sigma_bins": t.scale_sigma_bins,
                "template_max_side": t.template_max_side,
                "scale_model_max_area": t.scale_model_max_area,
                "min_box_side": t.min_box_side,
            },
            "sim": {
                "v_max": s.v_max,
                "tau": s.tau,
                "omega_max": s.omega_max,
                "depth_speed_ratio": s.depth_speed_ratio,
            },
            "skin_threshold": self.skin_threshold,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "lambda3": self.lambda3,
            "lambda4": self.lambda4,
            "count_threshold": self.count_threshold,
            "min_interval_ms": self.min_interval_ms,
            "init_frames": self.init_frames,
            "init_box": ([self.init_box.x, self.init_box.y,
                          self.init_box.w, self.init_box.h]
                         if self.init_box else None),
            "detect_scale_step": self.detect_scale_step,
            "detect_min_window": self.detect_min_window,
            "detect_min_neighbors": self.detect_min_neighbors,
            "user_position": list(self.user_position),
            "frame_interval_ms": self.frame_interval_ms,
        }


@dataclass(frozen=True)
class FrameReport:
    """Everything the pipeline concluded about one frame."""

    frame_index: int
    timestamp_ms: int
    status: str  # "awaiting_init" | "tracking" | "tracking_lost"
    user_box: BoundingBox | None
    detection: HandDetection
    command: PilotCommand | None  # emitted this frame, None otherwise
    drone: DroneState
    processing_ms: float


class PilotSession:
    """Mutable pipeline state for one input stream."""

    def __init__(self, config: PipelineConfig, face_cascade, skin_model: SkinModel):
        self.config = config
        self.face_cascade = face_cascade
        self.skin_model = skin_model
        self.tracker_state: TrackerState | None = None
        self.buffers = StateBuffers()
        self.limiter = RateLimiter(config.min_interval_ms)
        self.drone = config.drone_start
        self.v_cmd = np.zeros(3)
        self.user_position = config.user_position
        self.frame_index = 0
        self.last_timestamp_ms: int | None = None
        self.status = "awaiting_init"
        self.pending_init_box: BoundingBox | None = config.init_box
        self.stage_ms: dict[str, float] = {name: 0.0 for name in STAGES}
        self.stage_frames = 0

    def request_init_box(self, box: BoundingBox) -> None:
        """Schedule (re)initialization of the tracker on the next frame."""
        self.pending_init_box = box

    def reset(self) -> None:
        """Return the drone to its start pose and forget gesture history."""
        self.drone = self.config.drone_start
        self.buffers.clear()
        self.limiter.reset()
        self.v_cmd = np.zeros(3)

    def _dt(self, timestamp_ms: int) -> float:
        if self.last_timestamp_ms is None or timestamp_ms <= self.last_timestamp_ms:
            return self.config.frame_interval_ms / 1000.0
        return (timestamp_ms - self.last_timestamp_ms) / 1000.0

    def _try_init(self, frame: Frame) -> None:
        cfg = self.config
        if self.pending_init_box is not None:
            box = self.pending_init_box.clip_to(frame.width, frame.height)
            self.tracker_state = init_tracker(frame.pixels, box, cfg.tracker)
            self.pending_init_box = None
            self.status = "tracking"
            log.info("tracker initialized from manual box %s", box)
            return
        faces = cascade_mod.detect_faces(
            self.face_cascade, frame.pixels,
            scale_step=cfg.detect_scale_step,
            min_window=cfg.detect_min_window,
            min_neighbors=cfg.detect_min_neighbors)
        if faces:
            box = cascade_mod.user_box_from_face(faces[0], frame.width,
                                                 frame.height)
            self.tracker_state = init_tracker(frame.pixels, box, cfg.tracker)
            self.status = "tracking"
            log.info("tracker initialized from detected face at frame %d",
                     self.frame_index)
        elif self.frame_index + 1 >= cfg.init_frames:
            raise InitializationError(
                f"no face found in the first {cfg.init_frames} frames "
                f"and no manual init box given")

    def process(self, frame: Frame) -> FrameReport:
        """Advance the whole pipeline by one frame."""
        started = time.perf_counter()
        cfg = self.config
        dt = self._dt(frame.timestamp_ms)
        marks = [started]

        def mark(stage):
            now = time.perf_counter()
            self.stage_ms[stage] += (now - marks[0]) * 1000.0
            marks[0] = now

        box: BoundingBox | None = None
        detection = NO_HAND
        emitted: PilotCommand | None = None

        if self.status == "awaiting_init" or self.pending_init_box is not None:
            self._try_init(frame)
            mark("detect")
        if self.status == "tracking":
            try:
                box = track(self.tracker_state, frame.pixels)
            except TrackingLostError:
                self.status = "tracking_lost"
                log.warning("tracking lost at frame %d", self.frame_index)
            mark("track")

        if self.status == "tracking":
            mask = detect_skin(self.skin_model, frame.pixels, box,
                               threshold=cfg.skin_threshold)
            mask = erase_body_regions(mask, box)
            mark("skin")
            anchors = body_anchors(box)
            detection = detect_hands(mask, box, anchors)
            mark("hands")
            push_frame(self.buffers, detection)
            candidate = generate_command(self.buffers, cfg.lambda4,
                                         box_width=box.w,
                                         count_threshold=cfg.count_threshold)
            if candidate.kind == "none":
                self.v_cmd = np.zeros(3)
            elif self.limiter.allow(frame.timestamp_ms):
                emitted = candidate
                self.v_cmd = camera_to_body(candidate, self.drone.yaw, cfg.sim)
                log.debug("frame %d: %s command %s", self.frame_index,
                          candidate.kind, candidate.vector)
            mark("command")

        self.drone = step(self.drone, self.v_cmd, self.user_position, dt,
                          cfg.sim)
        mark("sim")

        self.last_timestamp_ms = frame.timestamp_ms
        report = FrameReport(frame_index=self.frame_index,
                             timestamp_ms=frame.timestamp_ms,
                             status=self.status,
                             user_box=box,
                             detection=detection,
                             command=emitted,
                             drone=self.drone,
                             processing_ms=(time.perf_counter() - started) * 1000.0)
        self.frame_index += 1
        self.stage_frames += 1
        return report


def annotate(frame: Frame, report: FrameReport) -> Frame:
    """Overlay the tracked box and the emitted command glyph on a copy."""
    px = frame.pixels.copy()
    if report.user_box is not None:
        draw_rect(px, report.user_box, BOX_COLOR)
        origin = body_anchors(report.user_box).upper_chest
        cmd = report.command
        if cmd is not None and cmd.kind == "planar":
            draw_arrow(px, origin, (cmd.vector[0], cmd.vector[1]), COMMAND_COLOR)
        elif cmd is not None and cmd.kind == "depth":
            size = max(6, report.user_box.w // 8)
            if cmd.vector[2] < 0:
                draw_cross(px, origin, size, COMMAND_COLOR)
            else:
                draw_circle(px, origin, size, COMMAND_COLOR)
    return Frame(px, timestamp_ms=frame.timestamp_ms)


# --------------------------------------------------------------------------
# Sources and the replay loop

def scenario_frames(scenario: Scenario, session: PilotSession) -> Iterator[Frame]:
    """Closed-loop frame source: each frame is rendered at the drone pose
    the session reached after the previous frame."""
    session.drone = scenario.drone_start
    session.user_position = scenario.base.user_position
    for i in range(scenario.total_frames):
        spec = scenario.spec_at(i)
        frame, _ = render(spec, session.drone)
        yield Frame(frame.pixels, timestamp_ms=i * scenario.frame_interval_ms)


def run_pipeline(config: PipelineConfig, face_cascade, skin_model: SkinModel,
                 frames: Iterator[Frame] | None = None,
                 scenario: Scenario | None = None,
                 session: PilotSession | None = None) -> Iterator[FrameReport]:
    """Run the loop over a frame source, yielding one report per frame.

    Exactly one of frames/scenario must be given. Halts with a final
    tracking_lost report if the tracker degenerates.
    """
    if (frames is None) == (scenario is None):
        raise InputError("provide exactly one of frames or scenario")
    session = session or PilotSession(config, face_cascade, skin_model)
    if scenario is not None:
        frames = scenario_frames(scenario, session)
    for frame in frames:
        report = session.process(frame)
        yield report
        if report.status == "tracking_lost":
            return
