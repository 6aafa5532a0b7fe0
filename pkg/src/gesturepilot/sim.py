"""Kinematic quadrotor simulator closing the gesture loop.

World frame is ENU: x east, y north, z up. Yaw is the camera heading
measured from world +x. The camera basis at yaw psi:

    z_cam (toward scene)  = (cos psi, sin psi, 0)
    y_cam (image down)    = (0, 0, -1)
    x_cam (image right)   = (sin psi, -cos psi, 0)

Planar commands move the drone along the image-plane direction the user
points; depth commands move it straight toward or away from the user along
the camera axis. The drone's yaw is servoed every step toward the bearing
of the user so the camera keeps facing them. docs/frames.md tabulates the
sign conventions end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .commands import PilotCommand
from .errors import ContractError


@dataclass(frozen=True)
class SimParams:
    v_max: float = 1.0             # m/s, hard speed clamp
    tau: float = 0.5               # s, velocity relaxation time constant
    omega_max: float = 1.0         # rad/s, yaw slew limit
    depth_speed_ratio: float = 0.5  # depth command speed as a fraction of v_max

    def __post_init__(self):
        if self.v_max <= 0 or self.tau <= 0 or self.omega_max <= 0:
            raise ContractError("sim parameters must be positive")


@dataclass(frozen=True)
class DroneState:
    """Pose and velocity in the world frame; z is clamped at ground level."""

    position: tuple[float, float, float] = (0.0, 0.0, 1.0)
    yaw: float = 0.0
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)


def camera_axes(yaw: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x_cam, y_cam, z_cam) as world vectors for a level camera at yaw."""
    z_cam = np.array([math.cos(yaw), math.sin(yaw), 0.0])
    y_cam = np.array([0.0, 0.0, -1.0])
    x_cam = np.array([math.sin(yaw), -math.cos(yaw), 0.0])
    return x_cam, y_cam, z_cam


def camera_to_body(cmd: PilotCommand, yaw: float,
                   params: SimParams | None = None) -> np.ndarray:
    """World-frame commanded velocity for a pilot command.

    Planar commands scale to speed v_max * min(1, magnitude_norm) along the
    pointed image direction; depth commands run at the fixed depth speed,
    +z meaning away from the user (against the camera axis).
    """
    params = params or SimParams()
    x_cam, y_cam, z_cam = camera_axes(yaw)
    if cmd.kind == "planar":
        vx, vy, _ = cmd.vector
        length = math.hypot(vx, vy)
        if length == 0.0:
            return np.zeros(3)
        speed = params.v_max * min(1.0, cmd.magnitude_norm)
        return speed * (vx * x_cam + vy * y_cam) / length
    if cmd.kind == "depth":
        speed = params.depth_speed_ratio * params.v_max
        return -cmd.vector[2] * speed * z_cam
    return np.zeros(3)


def bearing(from_pos, to_pos) -> float:
    """Horizontal bearing angle of to_pos as seen from from_pos."""
    return math.atan2(to_pos[1] - from_pos[1], to_pos[0] - from_pos[0])


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def step(state: DroneState, v_cmd, user_position, dt: float,
         params: SimParams | None = None) -> DroneState:
    """Integrate one timestep of first-order velocity dynamics.

    Velocity relaxes toward v_cmd with time constant tau and is clamped to
    v_max; position integrates the new velocity; altitude never goes below
    ground; yaw slews toward the user bearing at omega_max.
    """
    if dt <= 0:
        raise ContractError(f"dt must be positive, got {dt}")
    params = params or SimParams()
    v = np.asarray(state.velocity, dtype=float)
    v_cmd = np.asarray(v_cmd, dtype=float)
    v = v + (dt / params.tau) * (v_cmd - v)
    speed = float(np.linalg.norm(v))
    if speed > params.v_max:
        v = v * (params.v_max / speed)

    pos = np.asarray(state.position, dtype=float) + v * dt
    if pos[2] < 0.0:
        pos[2] = 0.0

    target = bearing(pos, user_position)
    delta = _wrap_angle(target - state.yaw)
    max_turn = params.omega_max * dt
    if abs(delta) > max_turn:
        delta = math.copysign(max_turn, delta)
    yaw = _wrap_angle(state.yaw + delta)

    return DroneState(position=tuple(pos), yaw=yaw, velocity=tuple(v))
