"""Per-frame detections to rate-limited 3-D piloting commands.

Each frame appends its hand vector to two 60-deep ring buffers, one for
stretched-out arms and one for front-of-body hands, storing (0, 0) on the
side that did not fire. A command is generated from buffer statistics:

    n_out > 30          planar command: mean of the nonzero stretched
                        vectors, x snapped to 0 when |y| > |lambda4 * x|
    n_higher > 30       depth command z = -1 (come closer): more than 30
                        front vectors above the body center (y < 0)
    n_lower > 30        depth command z = +1 (go further)
    otherwise           none

Counts are always compared against the same absolute threshold, so before
31 frames have been pushed no command can fire. The rate limiter emits a
command only when the configured interval has elapsed since the last
emission and drops suppressed commands rather than queuing stale gestures.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import ContractError
from .hands import HandDetection

BUFFER_FRAMES = 60
COUNT_THRESHOLD = 30
DEFAULT_MIN_INTERVAL_MS = 600


@dataclass(frozen=True)
class PilotCommand:
    """Camera-frame piloting command.

    vector is (x, y, z): x image-right, y image-down (so y < 0 points up),
    z depth with +1 = go further and -1 = come closer. magnitude_norm is
    the planar vector length in user-box widths; 0 for depth and none.
    """

    kind: str  # "planar" | "depth" | "none"
    vector: tuple[float, float, float]
    magnitude_norm: float = 0.0

    def __post_init__(self):
        x, y, z = self.vector
        if self.kind == "planar":
            if z != 0.0:
                raise ContractError("planar commands carry no depth component")
        elif self.kind == "depth":
            if x != 0.0 or y != 0.0 or z not in (-1.0, 1.0):
                raise ContractError("depth commands are exactly (0, 0, +-1)")
        elif self.kind == "none":
            if self.vector != (0.0, 0.0, 0.0):
                raise ContractError("none commands carry the zero vector")
        else:
            raise ContractError(f"unknown command kind {self.kind!r}")


NO_COMMAND = PilotCommand("none", (0.0, 0.0, 0.0))


@dataclass
class StateBuffers:
    """Sliding 60-frame history of hand vectors, one slot per frame."""

    stretched: deque = field(default_factory=lambda: deque(maxlen=BUFFER_FRAMES))
    front: deque = field(default_factory=lambda: deque(maxlen=BUFFER_FRAMES))

    def clear(self) -> None:
        self.stretched.clear()
        self.front.clear()


def push_frame(buffers: StateBuffers, detection: HandDetection) -> None:
    """Record one frame's detection; the inactive side records (0, 0)."""
    buffers.stretched.append(detection.vector if detection.kind == "stretched_out"
                             else (0, 0))
    buffers.front.append(detection.vector if detection.kind == "front_of_body"
                         else (0, 0))


def generate_command(buffers: StateBuffers, lambda4: float = 0.5,
                     box_width: int | None = None,
                     count_threshold: int = COUNT_THRESHOLD) -> PilotCommand:
    """Evaluate the decision tree over the current buffer contents.

    box_width scales magnitude_norm; without it the norm is reported as 0.
    """
    nonzero = [v for v in buffers.stretched if v != (0, 0)]
    if len(nonzero) > count_threshold:
        mean_x = sum(v[0] for v in nonzero) / len(nonzero)
        mean_y = sum(v[1] for v in nonzero) / len(nonzero)
        if abs(mean_y) > abs(lambda4 * mean_x):
            mean_x = 0.0
        norm = 0.0
        if box_width:
            norm = (mean_x ** 2 + mean_y ** 2) ** 0.5 / box_width
        return PilotCommand("planar", (mean_x, mean_y, 0.0), norm)

    n_higher = sum(1 for v in buffers.front if v[1] < 0)
    n_lower = sum(1 for v in buffers.front if v[1] > 0)
    if n_higher > count_threshold:
        return PilotCommand("depth", (0.0, 0.0, -1.0))
    if n_lower > count_threshold:
        return PilotCommand("depth", (0.0, 0.0, 1.0))
    return NO_COMMAND


@dataclass
class RateLimiter:
    """Emits at most one command per min_interval; suppressed ones are dropped."""

    min_interval_ms: int = DEFAULT_MIN_INTERVAL_MS
    last_emit_ms: int | None = None

    def allow(self, timestamp_ms: int) -> bool:
        """True when a command at timestamp_ms may be emitted; records it."""
        if (self.last_emit_ms is not None
                and timestamp_ms - self.last_emit_ms < self.min_interval_ms):
            return False
        self.last_emit_ms = timestamp_ms
        return True

    def reset(self) -> None:
        self.last_emit_ms = None
