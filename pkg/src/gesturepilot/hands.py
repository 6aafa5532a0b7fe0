"""Hand localization from the filtered skin mask.

Two detectors run in priority order on each frame:

Stretched-out arm: considers skin bits strictly outside the user box. When
more than min_pixels such bits exist, the hand is the bit maximizing

    |p.x - uc.x| + lateral_bias * (uc.y - p.y) + density_weight * F(p)

where uc is the upper-chest anchor and F(p) counts mask bits in a
hand-sized square around p. The gesture vector is p* - uc.

Hand in front of the body: considers bits inside the box (which the erase
step has already reduced to the chest band). The best bit maximizes

    -|p.x - bc.x| + center_density_weight * F(p)

around the body-center anchor bc, and is accepted only when it lies within
center_tolerance of the box center column and has F(p*) > min_pixels. The
gesture vector is p* - bc.

Ties break to the first candidate in row-major order. A winning candidate
that coincides with its anchor yields no gesture: the none detection is
exactly the zero vector and vice versa.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .geometry import BoundingBox, Point
from .skin import SkinMask

MIN_TRIGGER_PIXELS = 30


@dataclass(frozen=True)
class BodyAnchors:
    """Reference points derived from the user box.

    upper_chest sits on the box center column at 20% of the box height
    below the top; body_center is the box center. hand_side is the window
    edge used for local skin density, one quarter of the box width.
    """

    upper_chest: Point
    body_center: Point
    hand_side: int


@dataclass(frozen=True)
class HandDetection:
    """Outcome of hand localization for one frame."""

    kind: str  # "stretched" | "front" | "none"
    vector: tuple[int, int]
    position: Point | None = None

    def __post_init__(self):
        if self.kind not in ("stretched_out", "front_of_body", "none"):
            raise ContractError(f"unknown detection kind {self.kind!r}")
        if (self.kind == "none") != (self.vector == (0, 0)):
            raise ContractError("none detections carry exactly the zero vector")


NO_HAND = HandDetection("none", (0, 0))


def body_anchors(user_box: BoundingBox, chest_drop: float = 0.20) -> BodyAnchors:
    if user_box.w < 1 or user_box.h < 1:
        raise ContractError("user box must have positive size")
    cx = user_box.x + user_box.w // 2
    upper_chest = (cx, user_box.y + int(round(chest_drop * user_box.h)))
    return BodyAnchors(upper_chest=upper_chest,
                       body_center=user_box.center(),
                       hand_side=max(1, round(user_box.w / 4)))


def _density_counts(bits: np.ndarray, side: int) -> np.ndarray:
    """F(p) for every mask cell: bits inside the side x side square whose
    top-left corner is p - side//2, clipped at the region borders."""
    h, w = bits.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(np.cumsum(bits.astype(np.int64), axis=0), axis=1, out=ii[1:, 1:])
    lo = side // 2
    y0 = np.clip(np.arange(h) - lo, 0, h)
    y1 = np.clip(np.arange(h) - lo + side, 0, h)
    x0 = np.clip(np.arange(w) - lo, 0, w)
    x1 = np.clip(np.arange(w) - lo + side, 0, w)
    return (ii[np.ix_(y1, x1)] - ii[np.ix_(y0, x1)]
            - ii[np.ix_(y1, x0)] + ii[np.ix_(y0, x0)])


def split_mask(mask: SkinMask, user_box: BoundingBox) -> tuple[np.ndarray, np.ndarray]:
    """(outside_bits, inside_bits) relative to the user box, in region coords."""
    inside = np.zeros_like(mask.bits)
    overlap = mask.region.intersect(user_box)
    if overlap.area > 0:
        inside[overlap.y - mask.region.y:overlap.bottom - mask.region.y,
               overlap.x - mask.region.x:overlap.right - mask.region.x] = True
    return mask.bits & ~inside, mask.bits & inside


def detect_stretched_hand(mask: SkinMask, user_box: BoundingBox,
                          anchors: BodyAnchors,
                          lateral_bias: float = 0.2,
                          density_weight: float = 0.5,
                          min_pixels: int = MIN_TRIGGER_PIXELS) -> HandDetection:
    """Locate an arm stretched outside the user box; NO_HAND when quiet."""
    outside, _ = split_mask(mask, user_box)
    if int(outside.sum()) <= min_pixels:
        return NO_HAND
    density = _density_counts(outside, anchors.hand_side)
    ys, xs = np.nonzero(outside)
    fx = xs + mask.region.x
    fy = ys + mask.region.y
    ucx, ucy = anchors.upper_chest
    scores = (np.abs(fx - ucx)
              + lateral_bias * (ucy - fy)
              + density_weight * density[ys, xs])
    best = int(np.argmax(scores))
    pos = (int(fx[best]), int(fy[best]))
    vector = (pos[0] - ucx, pos[1] - ucy)
    if vector == (0, 0):
        return NO_HAND
    return HandDetection("stretched_out", vector, pos)


def detect_front_hand(mask: SkinMask, user_box: BoundingBox,
                      anchors: BodyAnchors,
                      center_density_weight: float = 0.013,
                      center_tolerance: float = 0.2,
                      min_pixels: int = MIN_TRIGGER_PIXELS) -> HandDetection:
    """Locate a hand held in front of the chest; NO_HAND when quiet.

    center_tolerance is the accepted horizontal offset from the box center
    as a fraction of the box width.
    """
    _, inside = split_mask(mask, user_box)
    if not inside.any():
        return NO_HAND
    density = _density_counts(inside, anchors.hand_side)
    ys, xs = np.nonzero(inside)
    fx = xs + mask.region.x
    fy = ys + mask.region.y
    bcx, bcy = anchors.body_center
    scores = -np.abs(fx - bcx) + center_density_weight * density[ys, xs]
    best = int(np.argmax(scores))
    if abs(int(fx[best]) - bcx) >= user_box.w * center_tolerance:
        return NO_HAND
    if density[ys[best], xs[best]] <= min_pixels:
        return NO_HAND
    pos = (int(fx[best]), int(fy[best]))
    vector = (pos[0] - bcx, pos[1] - bcy)
    if vector == (0, 0):
        return NO_HAND
    return HandDetection("front_of_body", vector, pos)


def detect_hands(mask: SkinMask, user_box: BoundingBox,
                 anchors: BodyAnchors | None = None) -> HandDetection:
    """Run both detectors, stretched-out arm first."""
    anchors = anchors or body_anchors(user_box)
    det = detect_stretched_hand(mask, user_box, anchors)
    if det.kind != "none":
        return det
    return detect_front_hand(mask, user_box, anchors)
