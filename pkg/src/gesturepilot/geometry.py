"""Axis-aligned boxes and pixel-coordinate helpers.

Image coordinates: x grows rightward, y grows downward, the origin is the
top-left pixel. Boxes are half-open: a box covers columns [x, x+w) and
rows [y, y+h).
"""

from __future__ import annotations

from dataclasses import dataclass

Point = tuple[int, int]


@dataclass(frozen=True)
class BoundingBox:
    """Integer axis-aligned rectangle in pixel coordinates."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise ValueError(f"negative box size: {self.w}x{self.h}")

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def center(self) -> Point:
        return (self.x + self.w // 2, self.y + self.h // 2)

    def contains(self, px: int, py: int) -> bool:
        return self.x <= px < self.right and self.y <= py < self.bottom

    def intersect(self, other: "BoundingBox") -> "BoundingBox":
        """Overlap of two boxes; a zero-size box at the near corner when disjoint."""
        x0 = max(self.x, other.x)
        y0 = max(self.y, other.y)
        x1 = min(self.right, other.right)
        y1 = min(self.bottom, other.bottom)
        return BoundingBox(x0, y0, max(0, x1 - x0), max(0, y1 - y0))

    def clip_to(self, width: int, height: int) -> "BoundingBox":
        """Clip to a width x height frame, preserving the half-open convention."""
        return self.intersect(BoundingBox(0, 0, width, height))

    def iou(self, other: "BoundingBox") -> float:
        inter = self.intersect(other).area
        union = self.area + other.area - inter
        return inter / union if union > 0 else 0.0


def similar_boxes(a: BoundingBox, b: BoundingBox, eps: float = 0.2) -> bool:
    """Detection-merging predicate: near-equal position and size.

    Two boxes are similar when their corners differ by at most eps times
    half the sum of the respective side lengths. Symmetric by construction.
    """
    delta = eps * 0.5 * (min(a.w, b.w) + min(a.h, b.h))
    return (
        abs(a.x - b.x) <= delta
        and abs(a.y - b.y) <= delta
        and abs(a.right - b.right) <= delta
        and abs(a.bottom - b.bottom) <= delta
    )
