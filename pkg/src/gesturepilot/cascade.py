"""Boosted Haar-feature face detection: XML cascade files, integral images,
sliding-window evaluation, and detection merging.

The reader accepts the stump-based cascade XML layout used by the widely
distributed frontal-face files: an <opencv_storage>/<cascade> document with
<stageNum>, <stages> (stage threshold plus weak classifiers encoded as
"left right featureIndex threshold" internal nodes with two leaf values)
and a <features> table of weighted rectangles. Tilted features and
multi-node trees are rejected as unsupported.

Window evaluation normalizes each feature sum by the window area times the
pixel standard deviation inside the window, computed from the integral and
squared-integral images; windows with near-zero variance are rejected
outright. Rectangle weights are rebalanced after scaling so that a uniform
window always scores exactly zero.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, FormatError, InputError
from .frames import luma_u8
from .geometry import BoundingBox, similar_boxes

MIN_WINDOW_VARIANCE = 1.0


@dataclass(frozen=True)
class HaarRect:
    """One weighted rectangle of a Haar feature, in base-window coordinates."""

    x: int
    y: int
    w: int
    h: int
    weight: float


@dataclass(frozen=True)
class HaarFeature:
    rects: tuple[HaarRect, ...]


@dataclass(frozen=True)
class WeakStump:
    """Depth-1 decision tree over one feature."""

    feature: int
    threshold: float
    fail_value: float
    pass_value: float


@dataclass(frozen=True)
class CascadeStage:
    threshold: float
    stumps: tuple[WeakStump, ...]


@dataclass(frozen=True)
class HaarCascade:
    window_w: int
    window_h: int
    stages: tuple[CascadeStage, ...]
    features: tuple[HaarFeature, ...]

    @property
    def stage_count(self) -> int:
        return len(self.stages)


# --------------------------------------------------------------------------
# XML parsing

def _text(node, tag: str) -> str:
    child = node.find(tag)
    if child is None or child.text is None:
        raise FormatError(f"cascade XML missing <{tag}>")
    return child.text.strip()


def parse_cascade_xml(text: str) -> HaarCascade:
    """Parse cascade XML text into an evaluatable cascade."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise FormatError(f"cascade XML is not well formed: {exc}") from None
    cascade = root.find("cascade") if root.tag == "opencv_storage" else root
    if cascade is None or cascade.tag != "cascade":
        raise FormatError("no <cascade> element found")

    feature_type = _text(cascade, "featureType")
    if feature_type.upper() != "HAAR":
        raise FormatError(f"unsupported feature type {feature_type!r}")
    window_w = int(_text(cascade, "width"))
    window_h = int(_text(cascade, "height"))
    if window_w < 1 or window_h < 1:
        raise FormatError(f"bad base window {window_w}x{window_h}")
    declared_stages = int(_text(cascade, "stageNum"))

    features = []
    features_node = cascade.find("features")
    if features_node is None:
        raise FormatError("cascade XML missing <features>")
    for fi, fnode in enumerate(features_node.findall("_")):
        tilted = fnode.find("tilted")
        if tilted is not None and tilted.text and int(tilted.text.strip()) != 0:
            raise FormatError(f"feature {fi}: tilted features are unsupported")
        rects_node = fnode.find("rects")
        if rects_node is None:
            raise FormatError(f"feature {fi} has no <rects>")
        rects = []
        for rnode in rects_node.findall("_"):
            parts = (rnode.text or "").split()
            if len(parts) != 5:
                raise FormatError(f"feature {fi}: rect needs 5 fields, got {parts}")
            x, y, w, h = (int(float(v)) for v in parts[:4])
            weight = float(parts[4])
            if w < 1 or h < 1 or x < 0 or y < 0:
                raise FormatError(f"feature {fi}: bad rect geometry {parts}")
            if x + w > window_w or y + h > window_h:
                raise FormatError(f"feature {fi}: rect exceeds base window")
            rects.append(HaarRect(x, y, w, h, weight))
        if not 2 <= len(rects) <= 3:
            raise FormatError(f"feature {fi}: expected 2 or 3 rects, got {len(rects)}")
        features.append(HaarFeature(tuple(rects)))

    stages = []
    stages_node = cascade.find("stages")
    if stages_node is None:
        raise FormatError("cascade XML missing <stages>")
    for si, snode in enumerate(stages_node.findall("_")):
        threshold = float(_text(snode, "stageThreshold"))
        stumps = []
        weak_node = snode.find("weakClassifiers")
        if weak_node is None:
            raise FormatError(f"stage {si} has no <weakClassifiers>")
        for wi, wnode in enumerate(weak_node.findall("_")):
            nodes = _text(wnode, "internalNodes").split()
            leaves = _text(wnode, "leafValues").split()
            if len(nodes) != 4:
                raise FormatError(
                    f"stage {si} weak {wi}: only single-node stumps are supported")
            feat_idx = int(nodes[2])
            if not 0 <= feat_idx < len(features):
                raise FormatError(f"stage {si} weak {wi}: feature index {feat_idx} "
                                  f"out of range 0..{len(features) - 1}")
            if len(leaves) != 2:
                raise FormatError(f"stage {si} weak {wi}: expected 2 leaf values")
            stumps.append(WeakStump(feature=feat_idx,
                                    threshold=float(nodes[3]),
                                    fail_value=float(leaves[0]),
                                    pass_value=float(leaves[1])))
        if not stumps:
            raise FormatError(f"stage {si} has no weak classifiers")
        stages.append(CascadeStage(threshold, tuple(stumps)))

    if declared_stages != len(stages):
        raise FormatError(f"cascade declares {declared_stages} stages "
                          f"but contains {len(stages)}")
    if not stages:
        raise FormatError("cascade has no stages")
    return HaarCascade(window_w, window_h, tuple(stages), tuple(features))


def load_cascade(path: str | Path) -> HaarCascade:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such cascade file: {p}")
    return parse_cascade_xml(p.read_text())


# --------------------------------------------------------------------------
# Integral images

def integral_image(gray: np.ndarray) -> np.ndarray:
    """Summed-area table with a zero top row and left column, int64.

    result[y, x] = sum of gray[:y, :x], so rectangle sums need no edge
    special-casing: sum(x, y, w, h) = ii[y+h, x+w] - ii[y, x+w]
    - ii[y+h, x] + ii[y, x].
    """
    if gray.ndim != 2:
        raise ContractError(f"integral image input must be 2-D, got {gray.shape}")
    ii = np.zeros((gray.shape[0] + 1, gray.shape[1] + 1), dtype=np.int64)
    np.cumsum(np.cumsum(gray.astype(np.int64), axis=0), axis=1, out=ii[1:, 1:])
    return ii


def squared_integral_image(gray: np.ndarray) -> np.ndarray:
    """Summed-area table of squared pixel values, int64."""
    sq = gray.astype(np.int64) ** 2
    ii = np.zeros((gray.shape[0] + 1, gray.shape[1] + 1), dtype=np.int64)
    np.cumsum(np.cumsum(sq, axis=0), axis=1, out=ii[1:, 1:])
    return ii


def rect_sum(ii: np.ndarray, x: int, y: int, w: int, h: int) -> int:
    """Sum of the original image over columns [x, x+w) and rows [y, y+h)."""
    return int(ii[y + h, x + w] - ii[y, x + w] - ii[y + h, x] + ii[y, x])


# --------------------------------------------------------------------------
# Window evaluation

def _scaled_features(cascade: HaarCascade, scale: float):
    """Rect geometry and weights at one window scale.

    Integer rounding of rect corners would bias feature sums on uniform
    input, so the first rect's weight is recomputed to make the weighted
    areas cancel exactly.
    """
    scaled = []
    for feat in cascade.features:
        rects = []
        for r in feat.rects:
            rects.append((int(round(r.x * scale)), int(round(r.y * scale)),
                          max(1, int(round(r.w * scale))),
                          max(1, int(round(r.h * scale))), r.weight))
        x0, y0, w0, h0, _ = rects[0]
        rest = sum(rw * rh * wt for _, _, rw, rh, wt in rects[1:])
        rects[0] = (x0, y0, w0, h0, -rest / (w0 * h0))
        scaled.append(tuple(rects))
    return scaled


def evaluate_window(cascade: HaarCascade, ii: np.ndarray, sq_ii: np.ndarray,
                    x: int, y: int, scale: float,
                    scaled_feats=None) -> bool:
    """Run all stages on the window whose top-left corner is (x, y).

    The window spans round(window_w * scale) by round(window_h * scale)
    pixels. Returns True only if every stage total reaches its threshold.
    Near-uniform windows never pass.
    """
    win_w = max(1, int(round(cascade.window_w * scale)))
    win_h = max(1, int(round(cascade.window_h * scale)))
    if x < 0 or y < 0 or y + win_h >= ii.shape[0] or x + win_w >= ii.shape[1]:
        raise ContractError("window exceeds image bounds")
    if scaled_feats is None:
        scaled_feats = _scaled_features(cascade, scale)

    area = win_w * win_h
    total = rect_sum(ii, x, y, win_w, win_h)
    total_sq = rect_sum(sq_ii, x, y, win_w, win_h)
    variance = total_sq / area - (total / area) ** 2
    if variance < MIN_WINDOW_VARIANCE:
        return False
    norm = area * np.sqrt(variance)

    for stage in cascade.stages:
        stage_sum = 0.0
        for stump in stage.stumps:
            value = 0.0
            for rx, ry, rw, rh, wt in scaled_feats[stump.feature]:
                value += wt * rect_sum(ii, x + rx, y + ry, rw, rh)
            value /= norm
            stage_sum += stump.fail_value if value < stump.threshold else stump.pass_value
        if stage_sum < stage.threshold:
            return False
    return True


def _evaluate_grid(cascade: HaarCascade, ii: np.ndarray, sq_ii: np.ndarray,
                   xs: np.ndarray, ys: np.ndarray, scale: float,
                   scaled_feats) -> np.ndarray:
    """Vectorized evaluate_window over a candidate grid; returns a pass mask.

    Semantics match evaluate_window exactly: same variance gate, same
    stage-by-stage early rejection, applied to whole candidate sets.
    """
    win_w = max(1, int(round(cascade.window_w * scale)))
    win_h = max(1, int(round(cascade.window_h * scale)))

    def sums(table, x0, y0, w, h):
        return (table[y0 + h, x0 + w] - table[y0, x0 + w]
                - table[y0 + h, x0] + table[y0, x0])

    area = win_w * win_h
    total = sums(ii, xs, ys, win_w, win_h).astype(np.float64)
    total_sq = sums(sq_ii, xs, ys, win_w, win_h).astype(np.float64)
    variance = total_sq / area - (total / area) ** 2
    alive = variance >= MIN_WINDOW_VARIANCE
    norm = np.where(alive, area * np.sqrt(np.maximum(variance, 0.0)), 1.0)

    for stage in cascade.stages:
        if not alive.any():
            break
        ax = xs[alive]
        ay = ys[alive]
        anorm = norm[alive]
        stage_sum = np.zeros(ax.shape, dtype=np.float64)
        for stump in stage.stumps:
            value = np.zeros(ax.shape, dtype=np.float64)
            for rx, ry, rw, rh, wt in scaled_feats[stump.feature]:
                value += wt * sums(ii, ax + rx, ay + ry, rw, rh)
            value /= anorm
            stage_sum += np.where(value < stump.threshold,
                                  stump.fail_value, stump.pass_value)
        keep = stage_sum >= stage.threshold
        idx = np.flatnonzero(alive)
        alive[idx[~keep]] = False
    return alive


# --------------------------------------------------------------------------
# Detection

def merge_detections(raw: list[BoundingBox], min_neighbors: int = 3,
                     eps: float = 0.2) -> list[BoundingBox]:
    """Group near-identical raw hits and average each group.

    Similarity is transitive here: groups are the connected components of
    the pairwise box-similarity relation. Groups smaller than min_neighbors
    are dropped; survivors are ordered largest area first.
    """
    n = len(raw)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if similar_boxes(raw[i], raw[j], eps):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj

    groups: dict[int, list[BoundingBox]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(raw[i])

    merged = []
    for members in groups.values():
        if len(members) < min_neighbors:
            continue
        k = len(members)
        merged.append(BoundingBox(
            int(round(sum(b.x for b in members) / k)),
            int(round(sum(b.y for b in members) / k)),
            int(round(sum(b.w for b in members) / k)),
            int(round(sum(b.h for b in members) / k))))
    merged.sort(key=lambda b: b.area, reverse=True)
    return merged


def detect_faces(cascade: HaarCascade, pixels: np.ndarray,
                 scale_step: float = 1.1, min_window: int = 24,
                 min_neighbors: int = 3) -> list[BoundingBox]:
    """All merged face boxes in an RGB8 (or grayscale u8) image.

    Scans a window pyramid from the base window size upward by scale_step,
    sliding in steps of round(scale) pixels, then merges raw hits. Returns
    boxes ordered largest first; empty list when nothing survives merging.
    """
    if scale_step <= 1.0:
        raise ContractError("scale_step must exceed 1")
    gray = luma_u8(pixels) if pixels.ndim == 3 else pixels
    ii = integral_image(gray)
    sq_ii = squared_integral_image(gray)
    img_h, img_w = gray.shape

    raw: list[BoundingBox] = []
    scale = max(1.0, min_window / min(cascade.window_w, cascade.window_h))
    while True:
        win_w = max(1, int(round(cascade.window_w * scale)))
        win_h = max(1, int(round(cascade.window_h * scale)))
        if win_w > img_w or win_h > img_h:
            break
        step = max(1, int(round(scale)))
        xs = np.arange(0, img_w - win_w + 1, step)
        ys = np.arange(0, img_h - win_h + 1, step)
        if xs.size and ys.size:
            grid_x, grid_y = np.meshgrid(xs, ys)
            grid_x = grid_x.ravel()
            grid_y = grid_y.ravel()
            feats = _scaled_features(cascade, scale)
            passed = _evaluate_grid(cascade, ii, sq_ii, grid_x, grid_y,
                                    scale, feats)
            for x, y in zip(grid_x[passed], grid_y[passed]):
                raw.append(BoundingBox(int(x), int(y), win_w, win_h))
        scale *= scale_step
    return merge_detections(raw, min_neighbors=min_neighbors)


def user_box_from_face(face: BoundingBox, frame_w: int, frame_h: int,
                       width_ratio: float = 3.0,
                       height_ratio: float = 7.5) -> BoundingBox:
    """Whole-body box extrapolated from a face box.

    The body box is width_ratio face-widths wide, centered on the face
    center, and height_ratio face-heights tall with the face at its top;
    the result is clipped to the frame.
    """
    if face.w < 1 or face.h < 1:
        raise ContractError("face box must have positive size")
    w = int(round(face.w * width_ratio))
    h = int(round(face.h * height_ratio))
    cx = face.x + face.w // 2
    box = BoundingBox(cx - w // 2, face.y, w, h)
    clipped = box.clip_to(frame_w, frame_h)
    if clipped.area == 0:
        raise ContractError("body box lies entirely outside the frame")
    return clipped
