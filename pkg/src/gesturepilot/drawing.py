"""Pixel-deterministic overlay primitives for annotated output frames.

Everything clips to the frame and mutates the given array in place; the
pipeline hands in copies of its immutable frames.
"""

from __future__ import annotations

import numpy as np

from .geometry import BoundingBox

BOX_COLOR = (40, 220, 60)
COMMAND_COLOR = (230, 40, 40)


def draw_rect(px: np.ndarray, box: BoundingBox, color, thickness: int = 2) -> None:
    h, w = px.shape[:2]
    for t in range(thickness):
        x0, y0 = box.x + t, box.y + t
        x1, y1 = box.right - 1 - t, box.bottom - 1 - t
        if x0 > x1 or y0 > y1:
            break
        cx0, cx1 = max(0, x0), min(w - 1, x1)
        cy0, cy1 = max(0, y0), min(h - 1, y1)
        if cx0 > cx1 or cy0 > cy1:
            continue
        if 0 <= y0 < h:
            px[y0, cx0:cx1 + 1] = color
        if 0 <= y1 < h:
            px[y1, cx0:cx1 + 1] = color
        if 0 <= x0 < w:
            px[cy0:cy1 + 1, x0] = color
        if 0 <= x1 < w:
            px[cy0:cy1 + 1, x1] = color


def draw_line(px: np.ndarray, p0, p1, color, thickness: int = 2) -> None:
    """Bresenham segment with a square brush."""
    h, w = px.shape[:2]
    x0, y0 = int(p0[0]), int(p0[1])
    x1, y1 = int(p1[0]), int(p1[1])
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    r = thickness // 2
    while True:
        ya, yb = max(0, y0 - r), min(h, y0 + r + 1)
        xa, xb = max(0, x0 - r), min(w, x0 + r + 1)
        if ya < yb and xa < xb:
            px[ya:yb, xa:xb] = color
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def draw_arrow(px: np.ndarray, origin, vector, color, thickness: int = 2) -> None:
    """Arrow from origin along vector with a fixed-size v-shaped head."""
    tip = (origin[0] + vector[0], origin[1] + vector[1])
    draw_line(px, origin, tip, color, thickness)
    length = np.hypot(vector[0], vector[1])
    if length < 1:
        return
    ux, uy = vector[0] / length, vector[1] / length
    head = min(12.0, 0.3 * length)
    for side in (-1.0, 1.0):
        # Reversed shaft direction rotated ~30 degrees to each side.
        hx = -0.866 * ux + 0.5 * side * uy
        hy = -0.5 * side * ux - 0.866 * uy
        draw_line(px, tip, (tip[0] + head * hx, tip[1] + head * hy),
                  color, thickness)


def draw_cross(px: np.ndarray, center, size: int, color, thickness: int = 2) -> None:
    cx, cy = center
    draw_line(px, (cx - size, cy - size), (cx + size, cy + size), color, thickness)
    draw_line(px, (cx - size, cy + size), (cx + size, cy - size), color, thickness)


def draw_circle(px: np.ndarray, center, radius: int, color, thickness: int = 2) -> None:
    """Ring of the given radius; filled band radius-thickness..radius."""
    h, w = px.shape[:2]
    cx, cy = int(center[0]), int(center[1])
    x0 = max(0, cx - radius - thickness)
    x1 = min(w, cx + radius + thickness + 1)
    y0 = max(0, cy - radius - thickness)
    y1 = min(h, cy + radius + thickness + 1)
    if x0 >= x1 or y0 >= y1:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    dist_sq = (xs - cx) ** 2 + (ys - cy) ** 2
    band = (dist_sq <= radius ** 2) & (dist_sq >= max(0, radius - thickness) ** 2)
    px[y0:y1, x0:x1][band] = color
