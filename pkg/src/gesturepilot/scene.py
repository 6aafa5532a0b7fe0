"""Synthetic scene renderer: a ground-truth-labeled stick figure.

The user is drawn as a billboard in a vertical plane through their feet
position, always facing the camera, so every body point shares one camera
depth and the pinhole projection reduces to a similarity transform. Plane
coordinates are (a, z): a meters to the image right of the feet, z meters
above the ground.

Body geometry (meters):

    height 1.75, head disk radius 0.11 centered at z 1.64
    face box = bounding square of the head disk (side 0.22)
    body box = 3 face widths wide, 7.5 face heights tall, top at head top,
               which puts the shoulder line (upper chest) at z 1.42 and
               the body-box center at z 0.925
    torso 0.40 wide spanning z 0.95..1.53, legs 0.26 wide down to z 0.10

Arms are clothing-colored sleeves; only the head and the gesturing hand
expose skin, placed per arm_which:

    left/right   hand at p_uc + L*(cos angle, sin angle), L in meters
                 equal to arm_length_ratio times the body-box width
    front_high   skin disk in front of the chest, above the body center
    front_low    skin disk in front of the hips, below the body center
    rest         no hand visible

Rendering is deterministic; optional seeded uniform pixel noise is the only
randomness and is reproduced exactly for a given seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .cascade import user_box_from_face
from .errors import ContractError, FrustumError, InputError
from .frames import Frame
from .geometry import BoundingBox, Point
from .sim import DroneState, bearing, camera_axes

PERSON_HEIGHT = 1.75
HEAD_RADIUS = 0.11
HEAD_CENTER_Z = PERSON_HEIGHT - HEAD_RADIUS
FACE_SIDE = 2.0 * HEAD_RADIUS
BODY_W = 3.0 * FACE_SIDE            # 0.66
BODY_H = 7.5 * FACE_SIDE            # 1.65
BODY_TOP_Z = PERSON_HEIGHT
SHOULDER_Z = BODY_TOP_Z - 0.20 * BODY_H   # 1.42, the upper-chest anchor
BODY_CENTER_Z = BODY_TOP_Z - 0.50 * BODY_H  # 0.925
TORSO_W, TORSO_TOP_Z, TORSO_BOT_Z = 0.40, 1.53, 0.95
LEGS_W, LEGS_BOT_Z = 0.26, 0.10
SHOULDER_A = 0.20
SLEEVE_RADIUS = 0.035
FRONT_HIGH_DZ = 0.26
FRONT_LOW_DZ = -0.057
FRONT_HAND_RADIUS = 0.04
MIN_RENDER_DEPTH = 0.3

ARM_CHOICES = ("left", "right", "front_high", "front_low", "rest")


@dataclass(frozen=True)
class Palette:
    skin: tuple[int, int, int] = (219, 168, 132)
    clothing: tuple[int, int, int] = (46, 58, 84)
    background: tuple[int, int, int] = (168, 180, 190)
    marks: tuple[int, int, int] = (58, 44, 38)


@dataclass(frozen=True)
class CameraSpec:
    focal_px: float = 500.0
    width: int = 640
    height: int = 480

    def __post_init__(self):
        if self.focal_px <= 0 or self.width < 8 or self.height < 8:
            raise ContractError("camera needs positive focal length and size")


@dataclass(frozen=True)
class SceneSpec:
    user_position: tuple[float, float, float] = (0.0, 4.0, 0.0)
    arm_which: str = "rest"
    arm_angle: float = 0.0
    arm_length_ratio: float = 1.0
    hand_radius: float = 0.05
    palette: Palette = field(default_factory=Palette)
    camera: CameraSpec = field(default_factory=CameraSpec)
    noise_seed: int | None = None
    noise_amp: int = 5

    def __post_init__(self):
        if self.arm_which not in ARM_CHOICES:
            raise ContractError(f"arm_which must be one of {ARM_CHOICES}")
        if not 0.25 <= self.arm_length_ratio <= 1.3:
            raise ContractError("arm_length_ratio outside the supported range")


@dataclass(frozen=True)
class GroundTruth:
    """Exact projected geometry of the rendered user."""

    p_uc_px: Point
    hand_px: Point | None
    gesture_vector_px: tuple[int, int] | None
    face_box: BoundingBox
    body_box: BoundingBox


class _Projector:
    """Similarity map from user-plane (a, z) meters to image pixels."""

    def __init__(self, spec: SceneSpec, drone: DroneState):
        cam = np.asarray(drone.position, dtype=float)
        user = np.asarray(spec.user_position, dtype=float)
        x_cam, y_cam, z_cam = camera_axes(drone.yaw)
        depth = float(np.dot(user - cam, z_cam))
        if depth < MIN_RENDER_DEPTH:
            raise FrustumError(f"user at depth {depth:.2f} m is behind or too "
                               f"close to the camera")
        self.scale = spec.camera.focal_px / depth
        self.u0 = (spec.camera.width / 2.0
                   + spec.camera.focal_px * float(np.dot(user - cam, x_cam)) / depth)
        self.v0 = (spec.camera.height / 2.0
                   + spec.camera.focal_px * (cam[2] - user[2]) / depth)

    def point(self, a: float, z: float) -> tuple[float, float]:
        return self.u0 + self.scale * a, self.v0 - self.scale * z


def _fill_rect(px, proj, a0, z0, a1, z1, color):
    """Fill the plane rectangle [a0,a1] x [z0,z1] (z up)."""
    u0, v1 = proj.point(a0, z0)
    u1, v0 = proj.point(a1, z1)
    x0 = max(0, int(round(u0)))
    x1 = min(px.shape[1], int(round(u1)))
    y0 = max(0, int(round(v0)))
    y1 = min(px.shape[0], int(round(v1)))
    if x0 < x1 and y0 < y1:
        px[y0:y1, x0:x1] = color


def _fill_disk(px, proj, a, z, radius_m, color):
    uc, vc = proj.point(a, z)
    r = proj.scale * radius_m
    x0 = max(0, int(math.floor(uc - r)))
    x1 = min(px.shape[1], int(math.ceil(uc + r)) + 1)
    y0 = max(0, int(math.floor(vc - r)))
    y1 = min(px.shape[0], int(math.ceil(vc + r)) + 1)
    if x0 >= x1 or y0 >= y1:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    inside = (xs - uc) ** 2 + (ys - vc) ** 2 <= r * r
    px[y0:y1, x0:x1][inside] = color


def _fill_capsule(px, proj, p0, p1, radius_m, color):
    """Thick segment between plane points p0 and p1."""
    u0, v0 = proj.point(*p0)
    u1, v1 = proj.point(*p1)
    r = proj.scale * radius_m
    x0 = max(0, int(math.floor(min(u0, u1) - r)))
    x1 = min(px.shape[1], int(math.ceil(max(u0, u1) + r)) + 1)
    y0 = max(0, int(math.floor(min(v0, v1) - r)))
    y1 = min(px.shape[0], int(math.ceil(max(v0, v1) + r)) + 1)
    if x0 >= x1 or y0 >= y1:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    dx, dy = u1 - u0, v1 - v0
    seg_sq = dx * dx + dy * dy
    if seg_sq == 0:
        t = np.zeros_like(xs, dtype=float)
    else:
        t = np.clip(((xs - u0) * dx + (ys - v0) * dy) / seg_sq, 0.0, 1.0)
    dist_sq = (xs - (u0 + t * dx)) ** 2 + (ys - (v0 + t * dy)) ** 2
    px[y0:y1, x0:x1][dist_sq <= r * r] = color


def _hand_center(spec: SceneSpec) -> tuple[float, float] | None:
    if spec.arm_which == "rest":
        return None
    if spec.arm_which in ("left", "right"):
        length = spec.arm_length_ratio * BODY_W
        sign = 1.0 if spec.arm_which == "right" else -1.0
        return (sign * length * math.cos(spec.arm_angle),
                SHOULDER_Z + length * math.sin(spec.arm_angle))
    dz = FRONT_HIGH_DZ if spec.arm_which == "front_high" else FRONT_LOW_DZ
    return (0.0, BODY_CENTER_Z + dz)


def render(spec: SceneSpec, drone: DroneState) -> tuple[Frame, GroundTruth]:
    """Draw the user as seen from the drone; exact ground truth included."""
    cam = spec.camera
    proj = _Projector(spec, drone)
    px = np.empty((cam.height, cam.width, 3), dtype=np.uint8)
    px[:] = spec.palette.background

    # Clothing first, then head and hands so skin wins overlaps.
    _fill_rect(px, proj, -LEGS_W / 2, LEGS_BOT_Z, LEGS_W / 2, TORSO_BOT_Z,
               spec.palette.clothing)
    _fill_rect(px, proj, -TORSO_W / 2, TORSO_BOT_Z, TORSO_W / 2, TORSO_TOP_Z,
               spec.palette.clothing)

    hand = _hand_center(spec)
    for side in ("left", "right"):
        if side == spec.arm_which:
            continue  # the gesturing arm is drawn below
        sign = 1.0 if side == "right" else -1.0
        _fill_capsule(px, proj, (sign * SHOULDER_A, SHOULDER_Z),
                      (sign * 0.21, 0.98), SLEEVE_RADIUS, spec.palette.clothing)
    if spec.arm_which in ("left", "right"):
        sign = 1.0 if spec.arm_which == "right" else -1.0
        _fill_capsule(px, proj, (sign * SHOULDER_A, SHOULDER_Z), hand,
                      SLEEVE_RADIUS, spec.palette.clothing)
    elif spec.arm_which in ("front_high", "front_low"):
        # Foreshortened reach: a short sleeve stub from the right shoulder
        # toward the raised hand.
        _fill_capsule(px, proj, (SHOULDER_A, SHOULDER_Z),
                      (hand[0] + 0.06, hand[1] + 0.04), SLEEVE_RADIUS,
                      spec.palette.clothing)

    # Head with contrast marks, then hands.
    _fill_disk(px, proj, 0.0, HEAD_CENTER_Z, HEAD_RADIUS, spec.palette.skin)
    eye_dz = HEAD_CENTER_Z + 0.30 * HEAD_RADIUS
    for ex in (-0.35 * HEAD_RADIUS, 0.35 * HEAD_RADIUS):
        _fill_rect(px, proj, ex - 0.15 * HEAD_RADIUS, eye_dz - 0.10 * HEAD_RADIUS,
                   ex + 0.15 * HEAD_RADIUS, eye_dz + 0.10 * HEAD_RADIUS,
                   spec.palette.marks)
    mouth_z = HEAD_CENTER_Z - 0.45 * HEAD_RADIUS
    _fill_rect(px, proj, -0.40 * HEAD_RADIUS, mouth_z - 0.08 * HEAD_RADIUS,
               0.40 * HEAD_RADIUS, mouth_z + 0.08 * HEAD_RADIUS,
               spec.palette.marks)

    hand_px_coord = None
    if hand is not None:
        radius = (spec.hand_radius if spec.arm_which in ("left", "right")
                  else FRONT_HAND_RADIUS)
        _fill_disk(px, proj, hand[0], hand[1], radius, spec.palette.skin)
        u, v = proj.point(hand[0], hand[1])
        hand_px_coord = (int(round(u)), int(round(v)))

    if spec.noise_seed is not None:
        rng = np.random.default_rng(spec.noise_seed)
        noise = rng.integers(-spec.noise_amp, spec.noise_amp + 1,
                             size=px.shape, dtype=np.int16)
        px = np.clip(px.astype(np.int16) + noise, 0, 255).astype(np.uint8)

    # Ground truth from the same projection.
    fu, fv = proj.point(-HEAD_RADIUS, HEAD_CENTER_Z + HEAD_RADIUS)
    side = 2.0 * HEAD_RADIUS * proj.scale
    face_box = BoundingBox(int(round(fu)), int(round(fv)),
                           int(round(side)), int(round(side)))
    body_box = user_box_from_face(face_box, cam.width, cam.height)
    pu, pv = proj.point(0.0, SHOULDER_Z)
    p_uc = (int(round(pu)), int(round(pv)))
    vector = None
    if hand_px_coord is not None:
        vector = (hand_px_coord[0] - p_uc[0], hand_px_coord[1] - p_uc[1])
    truth = GroundTruth(p_uc_px=p_uc, hand_px=hand_px_coord,
                        gesture_vector_px=vector, face_box=face_box,
                        body_box=body_box)
    return Frame(px, timestamp_ms=0), truth


# --------------------------------------------------------------------------
# Scripted scenarios

@dataclass(frozen=True)
class TimelineEntry:
    frames: int
    arm_which: str = "rest"
    arm_angle: float = 0.0
    arm_length_ratio: float = 1.0


@dataclass(frozen=True)
class Scenario:
    """A scripted sequence of arm poses rendered in a fixed world."""

    base: SceneSpec
    timeline: tuple[TimelineEntry, ...]
    drone_start: DroneState
    frame_interval_ms: int = 40

    @property
    def total_frames(self) -> int:
        return sum(e.frames for e in self.timeline)

    def spec_at(self, frame_index: int) -> SceneSpec:
        """SceneSpec in effect for the given frame index."""
        remaining = frame_index
        for entry in self.timeline:
            if remaining < entry.frames:
                return replace(self.base, arm_which=entry.arm_which,
                               arm_angle=entry.arm_angle,
                               arm_length_ratio=entry.arm_length_ratio,
                               noise_seed=(None if self.base.noise_seed is None
                                           else self.base.noise_seed + frame_index))
            remaining -= entry.frames
        raise ContractError(f"frame index {frame_index} beyond scenario "
                            f"length {self.total_frames}")


def facing_user_state(user_position, position=(0.0, 0.0, 1.2)) -> DroneState:
    """Drone hovering at position with the camera already on the user."""
    return DroneState(position=tuple(float(c) for c in position),
                      yaw=bearing(position, user_position))


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario JSON file; unknown keys are rejected."""
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such scenario file: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: not valid JSON: {exc}") from None
    return scenario_from_dict(doc)


def scenario_from_dict(doc: dict) -> Scenario:
    known = {"user_position", "camera", "palette", "noise_seed", "noise_amp",
             "hand_radius", "drone", "frame_interval_ms", "timeline"}
    extra = set(doc) - known
    if extra:
        raise InputError(f"unknown scenario keys: {sorted(extra)}")
    if "timeline" not in doc or not doc["timeline"]:
        raise InputError("scenario needs a non-empty timeline")

    cam = CameraSpec(**doc.get("camera", {}))
    palette = Palette(**{k: tuple(v) for k, v in doc.get("palette", {}).items()})
    base = SceneSpec(user_position=tuple(doc.get("user_position", (0.0, 4.0, 0.0))),
                     palette=palette, camera=cam,
                     noise_seed=doc.get("noise_seed"),
                     noise_amp=doc.get("noise_amp", 5),
                     hand_radius=doc.get("hand_radius", 0.05))
    entries = []
    for i, e in enumerate(doc["timeline"]):
        bad = set(e) - {"frames", "arm_which", "arm_angle", "arm_length_ratio"}
        if bad:
            raise InputError(f"timeline[{i}]: unknown keys {sorted(bad)}")
        if "frames" not in e or int(e["frames"]) < 1:
            raise InputError(f"timeline[{i}]: needs frames >= 1")
        entries.append(TimelineEntry(frames=int(e["frames"]),
                                     arm_which=e.get("arm_which", "rest"),
                                     arm_angle=float(e.get("arm_angle", 0.0)),
                                     arm_length_ratio=float(e.get("arm_length_ratio", 1.0))))

    drone_doc = doc.get("drone", {})
    position = tuple(drone_doc.get("position", (0.0, 0.0, 1.2)))
    if "yaw" in drone_doc:
        drone = DroneState(position=position, yaw=float(drone_doc["yaw"]))
    else:
        drone = facing_user_state(base.user_position, position)
    return Scenario(base=base, timeline=tuple(entries), drone_start=drone,
                    frame_interval_ms=int(doc.get("frame_interval_ms", 40)))
