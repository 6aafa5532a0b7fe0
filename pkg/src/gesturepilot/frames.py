"""Frame type, PPM image IO, directory replay, and the binary wire format.

A frame is an RGB8 raster plus a millisecond timestamp. Pixel storage is a
numpy array of shape (height, width, 3), dtype uint8, row-major, and is
frozen after construction: downstream annotation always works on copies.

Wire format (little-endian):

    magic   4 bytes  "GPF1"
    width   u32
    height  u32
    stamp   u32      milliseconds
    pixels  3*width*height bytes, RGB8 row-major
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterator

import numpy as np

from .errors import ContractError, FormatError, InputError

WIRE_MAGIC = b"GPF1"
WIRE_HEADER = struct.Struct("<4sIII")
MAX_WIRE_DIM = 4096


@dataclass(frozen=True)
class Frame:
    """One RGB8 video frame with a millisecond timestamp."""

    pixels: np.ndarray
    timestamp_ms: int = 0

    def __post_init__(self):
        px = self.pixels
        if px.ndim != 3 or px.shape[2] != 3 or px.dtype != np.uint8:
            raise ContractError(f"frame pixels must be (h, w, 3) uint8, got {px.shape} {px.dtype}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ContractError("frame must be at least 1x1")
        px.flags.writeable = False

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def luma_u8(pixels: np.ndarray) -> np.ndarray:
    """Integer luma (299 R + 587 G + 114 B) // 1000, shape (h, w) uint8."""
    px = pixels.astype(np.uint32)
    gray = (299 * px[..., 0] + 587 * px[..., 1] + 114 * px[..., 2]) // 1000
    return gray.astype(np.uint8)


# --------------------------------------------------------------------------
# PPM (binary P6, maxval 255)

def decode_ppm(data: bytes) -> np.ndarray:
    """Decode binary PPM bytes to an (h, w, 3) uint8 array."""
    pos = 0

    def token():
        nonlocal pos
        while pos < len(data):
            c = data[pos:pos + 1]
            if c.isspace():
                pos += 1
            elif c == b"#":
                while pos < len(data) and data[pos:pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PPM header")
        return data[start:pos]

    if token() != b"P6":
        raise FormatError("not a binary PPM (missing P6 magic)")
    try:
        width, height, maxval = int(token()), int(token()), int(token())
    except ValueError as exc:
        raise FormatError(f"bad PPM header: {exc}") from None
    if width < 1 or height < 1:
        raise FormatError(f"bad PPM dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"unsupported PPM maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    body = data[pos:pos + 3 * width * height]
    if len(body) != 3 * width * height:
        raise FormatError("truncated PPM pixel data")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3).copy()


def encode_ppm(pixels: np.ndarray) -> bytes:
    h, w = pixels.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(pixels).tobytes()


def load_ppm(path: str | Path) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such image file: {p}")
    return decode_ppm(p.read_bytes())


def save_ppm(path: str | Path, pixels: np.ndarray) -> None:
    Path(path).write_bytes(encode_ppm(pixels))


def load_sequence(directory: str | Path, pattern: str = "*.ppm",
                  frame_interval_ms: int = 40) -> list[Frame]:
    """Load a directory of PPM frames in lexicographic filename order.

    Timestamps are synthesized at a fixed interval. All frames must share
    one resolution; the offending filename is reported otherwise.
    """
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"no such frame directory: {root}")
    paths = sorted(root.glob(pattern))
    frames = []
    shape = None
    for i, p in enumerate(paths):
        px = decode_ppm(p.read_bytes())
        if shape is None:
            shape = px.shape
        elif px.shape != shape:
            raise FormatError(
                f"{p.name}: resolution {px.shape[1]}x{px.shape[0]} differs from "
                f"first frame {shape[1]}x{shape[0]}")
        frames.append(Frame(px, timestamp_ms=i * frame_interval_ms))
    return frames


# --------------------------------------------------------------------------
# Wire format

def encode_wire_frame(frame: Frame) -> bytes:
    header = WIRE_HEADER.pack(WIRE_MAGIC, frame.width, frame.height,
                              frame.timestamp_ms & 0xFFFFFFFF)
    return header + np.ascontiguousarray(frame.pixels).tobytes()


def decode_wire_frame(data: bytes, max_dim: int = MAX_WIRE_DIM) -> Frame:
    """Decode one wire message; raises FormatError on any malformed field."""
    if len(data) < WIRE_HEADER.size:
        raise FormatError(f"wire frame shorter than header ({len(data)} bytes)")
    magic, width, height, stamp = WIRE_HEADER.unpack_from(data)
    if magic != WIRE_MAGIC:
        raise FormatError(f"bad wire magic {magic!r}")
    if width < 1 or height < 1:
        raise FormatError(f"bad wire dimensions {width}x{height}")
    if width > max_dim or height > max_dim:
        raise FormatError(f"wire frame {width}x{height} exceeds limit {max_dim}")
    expect = WIRE_HEADER.size + 3 * width * height
    if len(data) != expect:
        raise FormatError(f"wire payload is {len(data)} bytes, expected {expect}")
    px = np.frombuffer(data, dtype=np.uint8, offset=WIRE_HEADER.size)
    return Frame(px.reshape(height, width, 3).copy(), timestamp_ms=stamp)


def read_wire_frame(stream: BinaryIO, max_dim: int = MAX_WIRE_DIM) -> Frame | None:
    """Read one length-delimited frame from a byte stream; None at clean EOF."""
    header = stream.read(WIRE_HEADER.size)
    if not header:
        return None
    if len(header) < WIRE_HEADER.size:
        raise FormatError("truncated wire header")
    magic, width, height, stamp = WIRE_HEADER.unpack(header)
    if magic != WIRE_MAGIC:
        raise FormatError(f"bad wire magic {magic!r}")
    if not (1 <= width <= max_dim and 1 <= height <= max_dim):
        raise FormatError(f"bad wire dimensions {width}x{height}")
    body = stream.read(3 * width * height)
    if len(body) != 3 * width * height:
        raise FormatError("truncated wire pixel data")
    px = np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3).copy()
    return Frame(px, timestamp_ms=stamp)


def write_wire_frame(stream: BinaryIO, frame: Frame) -> None:
    stream.write(encode_wire_frame(frame))


def iter_wire_frames(stream: BinaryIO, max_dim: int = MAX_WIRE_DIM) -> Iterator[Frame]:
    while True:
        frame = read_wire_frame(stream, max_dim=max_dim)
        if frame is None:
            return
        yield frame
