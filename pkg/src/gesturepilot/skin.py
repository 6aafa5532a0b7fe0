"""Color-histogram skin segmentation around the tracked user.

The model is a quantized RGB lookup table trained from labeled skin and
non-skin pixel sets. Each cell stores a smoothed skin probability

    p = (skin_count + 1) / (skin_count + nonskin_count + 2)

so colors never seen in training score exactly 0.5. Detection runs only
inside a search region derived from the user box (extended sideways by one
box width per side and upward by half a box height) and the result carries
that region so downstream code can map mask bits to frame coordinates.

Model file layout (little-endian): magic "SKN1", u32 bin count per channel,
then bins**3 float32 probabilities in C order (r-major, then g, then b).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, FormatError, InputError
from .geometry import BoundingBox

SKIN_MAGIC = b"SKN1"


@dataclass(frozen=True)
class SkinModel:
    """Quantized RGB skin-probability table, shape (bins, bins, bins)."""

    bins: int
    table: np.ndarray

    def __post_init__(self):
        if self.bins < 2 or self.bins > 256:
            raise ContractError(f"bins must be in [2, 256], got {self.bins}")
        if self.table.shape != (self.bins,) * 3:
            raise ContractError(f"table shape {self.table.shape} does not "
                                f"match bins {self.bins}")


@dataclass(frozen=True)
class SkinMask:
    """Boolean skin bits over a rectangular frame region."""

    region: BoundingBox
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (self.region.h, self.region.w):
            raise ContractError(f"mask bits {self.bits.shape} do not match "
                                f"region {self.region.w}x{self.region.h}")
        if self.bits.dtype != np.bool_:
            raise ContractError("mask bits must be boolean")

    def count(self) -> int:
        return int(self.bits.sum())


def quantize(pixels: np.ndarray, bins: int) -> np.ndarray:
    """Channel values 0..255 to bin indices 0..bins-1 (floor quantization)."""
    return (pixels.astype(np.uint32) * bins) >> 8


def train_skin_model(skin_pixels: np.ndarray, nonskin_pixels: np.ndarray,
                     bins: int = 64) -> SkinModel:
    """Build a probability table from labeled RGB pixel arrays of shape (n, 3)."""
    skin_pixels = np.asarray(skin_pixels, dtype=np.uint8).reshape(-1, 3)
    nonskin_pixels = np.asarray(nonskin_pixels, dtype=np.uint8).reshape(-1, 3)
    if len(skin_pixels) == 0 or len(nonskin_pixels) == 0:
        raise ContractError("both pixel sets must be non-empty")

    def histogram(px):
        q = quantize(px, bins)
        flat = (q[:, 0] * bins + q[:, 1]) * bins + q[:, 2]
        return np.bincount(flat, minlength=bins ** 3).reshape((bins,) * 3)

    skin = histogram(skin_pixels).astype(np.float64)
    nonskin = histogram(nonskin_pixels).astype(np.float64)
    table = (skin + 1.0) / (skin + nonskin + 2.0)
    return SkinModel(bins, table)


def skin_probability(model: SkinModel, pixels: np.ndarray) -> np.ndarray:
    """Per-pixel skin probability for an (..., 3) uint8 array."""
    if pixels.shape[-1] != 3:
        raise ContractError(f"expected RGB pixels, got shape {pixels.shape}")
    q = quantize(pixels, model.bins)
    return model.table[q[..., 0], q[..., 1], q[..., 2]]


def search_region(user_box: BoundingBox, frame_w: int, frame_h: int,
                  extend_sides: float = 1.0,
                  extend_above: float = 0.5) -> BoundingBox:
    """Region inspected for skin: user box widened for outstretched arms.

    Extends by extend_sides box-widths on each side and extend_above box
    heights upward; never below the box bottom. Clipped to the frame.
    """
    x0 = user_box.x - int(round(extend_sides * user_box.w))
    y0 = user_box.y - int(round(extend_above * user_box.h))
    x1 = user_box.right + int(round(extend_sides * user_box.w))
    y1 = user_box.bottom
    region = BoundingBox(x0, y0, x1 - x0, y1 - y0).clip_to(frame_w, frame_h)
    if region.area == 0:
        raise ContractError("search region lies outside the frame")
    return region


def detect_skin(model: SkinModel, pixels: np.ndarray, user_box: BoundingBox,
                threshold: float = 0.5) -> SkinMask:
    """Threshold the model over the search region around user_box."""
    if not 0.0 < threshold < 1.0:
        raise ContractError(f"threshold must lie in (0, 1), got {threshold}")
    h, w = pixels.shape[:2]
    region = search_region(user_box, w, h)
    patch = pixels[region.y:region.bottom, region.x:region.right]
    bits = skin_probability(model, patch) >= threshold
    return SkinMask(region, bits)


def erase_body_regions(mask: SkinMask, user_box: BoundingBox,
                       keep_top: float = 0.25,
                       keep_bottom: float = 0.55) -> SkinMask:
    """Zero the face band and the legs band inside the user box.

    Inside the box, rows with relative position r = (y - box.y) / box.h
    keep their bits only when keep_top <= r < keep_bottom. The top band
    holds the face and the bottom band the legs, neither of which should
    count as hand pixels. Bits outside the user box are untouched.
    """
    if not 0.0 <= keep_top < keep_bottom <= 1.0:
        raise ContractError("keep band must satisfy 0 <= top < bottom <= 1")
    bits = mask.bits.copy()
    overlap = mask.region.intersect(user_box)
    if overlap.area > 0 and user_box.h > 0:
        ys = np.arange(overlap.y, overlap.bottom)
        rel = (ys - user_box.y) / user_box.h
        erase_rows = ys[(rel < keep_top) | (rel >= keep_bottom)]
        local_rows = erase_rows - mask.region.y
        x0 = overlap.x - mask.region.x
        x1 = overlap.right - mask.region.x
        bits[local_rows, x0:x1] = False
    return SkinMask(mask.region, bits)


# --------------------------------------------------------------------------
# Model files

def save_skin_model(model: SkinModel, path: str | Path) -> None:
    payload = model.table.astype("<f4").tobytes(order="C")
    Path(path).write_bytes(SKIN_MAGIC + struct.pack("<I", model.bins) + payload)


def load_skin_model(path: str | Path) -> SkinModel:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such skin model file: {p}")
    data = p.read_bytes()
    if len(data) < 8 or data[:4] != SKIN_MAGIC:
        raise FormatError("not a skin model file (bad magic)")
    bins = struct.unpack_from("<I", data, 4)[0]
    if not 2 <= bins <= 256:
        raise FormatError(f"skin model bin count {bins} out of range")
    expect = 8 + 4 * bins ** 3
    if len(data) != expect:
        raise FormatError(f"skin model file is {len(data)} bytes, expected {expect}")
    table = np.frombuffer(data, dtype="<f4", offset=8).astype(np.float64)
    table = table.reshape((bins,) * 3)
    if table.min() < 0.0 or table.max() > 1.0:
        raise FormatError("skin model probabilities outside [0, 1]")
    return SkinModel(bins, table)
