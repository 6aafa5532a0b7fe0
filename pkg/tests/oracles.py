"""Brute-force reference implementations used to pin the fast paths.

Everything here is deliberately naive: explicit loops, np.roll, no FFT,
no integral images. Slow is fine; independent is the point.
"""

import numpy as np


def circular_correlation(filt: np.ndarray, feat: np.ndarray) -> np.ndarray:
    """response[dy, dx] = sum_x filt(x) * feat(x + d), wrap-around."""
    h, w = filt.shape
    out = np.zeros((h, w))
    for dy in range(h):
        for dx in range(w):
            out[dy, dx] = np.sum(filt * np.roll(np.roll(feat, -dy, 0), -dx, 1))
    return out


def filter_loss(filters, features, target, lam):
    """Sum of squared response errors plus the quadratic penalty.

    filters/features: lists of equally shaped 2D real arrays (one per
    channel); target: desired response. Computed entirely in the spatial
    domain.
    """
    resp = np.zeros_like(target)
    for flt, feat in zip(filters, features):
        resp += circular_correlation(flt, feat)
    loss = np.sum((resp - target) ** 2)
    loss += lam * sum(np.sum(flt ** 2) for flt in filters)
    return float(loss)


def integral_brute(gray: np.ndarray) -> np.ndarray:
    h, w = gray.shape
    out = np.zeros((h + 1, w + 1), dtype=np.int64)
    for y in range(h):
        for x in range(w):
            out[y + 1, x + 1] = int(gray[: y + 1, : x + 1].astype(np.int64).sum())
    return out


def rect_sum_brute(gray: np.ndarray, x, y, w, h) -> int:
    return int(gray[y : y + h, x : x + w].astype(np.int64).sum())


def hand_window_count(mask_bits, px, py, side):
    """Skin pixels in the side x side window anchored at p - side//2, clipped."""
    h, w = mask_bits.shape
    x0 = px - side // 2
    y0 = py - side // 2
    total = 0
    for y in range(y0, y0 + side):
        for x in range(x0, x0 + side):
            if 0 <= x < w and 0 <= y < h and mask_bits[y, x]:
                total += 1
    return total


def stretched_oracle(outside_bits, region, anchor_uc, side,
                     lateral_bias=0.2, density_weight=0.5, min_pixels=30):
    """Exhaustive Algorithm-1 scoring over the outside split mask.

    outside_bits must already be restricted to pixels outside the user
    box. Returns (kind, (vx, vy)) with ties resolved row-major: first by
    row, then by column.
    """
    h, w = outside_bits.shape
    ux, uy = anchor_uc
    if int(outside_bits.sum()) <= min_pixels:
        return "none", (0, 0)
    best = None
    for y in range(h):
        for x in range(w):
            if not outside_bits[y, x]:
                continue
            fx, fy = region[0] + x, region[1] + y
            dens = hand_window_count(outside_bits, x, y, side)
            score = (abs(fx - ux) + lateral_bias * (uy - fy)
                     + density_weight * dens)
            if best is None or score > best[0]:
                best = (score, fx, fy)
    vec = (best[1] - ux, best[2] - uy)
    if vec == (0, 0):
        return "none", (0, 0)
    return "stretched_out", vec


def front_oracle(inside_bits, region, box, anchor_bc, side,
                 density_weight=0.013, min_density=30):
    """Exhaustive Algorithm-2 scoring over the inside split mask.

    box is (x, y, w, h); only its width matters (center tolerance).
    """
    h, w = inside_bits.shape
    bx, by = anchor_bc
    best = None
    for y in range(h):
        for x in range(w):
            if not inside_bits[y, x]:
                continue
            fx, fy = region[0] + x, region[1] + y
            dens = hand_window_count(inside_bits, x, y, side)
            score = -abs(fx - bx) + density_weight * dens
            if best is None or score > best[0]:
                best = (score, fx, fy, dens)
    if best is None:
        return "none", (0, 0)
    _, fx, fy, dens = best
    if abs(fx - bx) >= box[2] * 0.2:
        return "none", (0, 0)
    if dens <= min_density:
        return "none", (0, 0)
    vec = (fx - bx, fy - by)
    if vec == (0, 0):
        return "none", (0, 0)
    return "front_of_body", vec


def window_pass_direct(cascade, gray, x, y, scale):
    """Cascade window decision computed from raw pixel sums, no integrals.

    Mirrors the production evaluation contract: rects scaled by rounding
    with the first rect's weight recomputed so weighted areas cancel,
    values normalized by window area times pixel standard deviation,
    near-uniform windows rejected.
    """
    win_w = max(1, int(round(cascade.window_w * scale)))
    win_h = max(1, int(round(cascade.window_h * scale)))
    window = gray[y:y + win_h, x:x + win_w].astype(np.float64)
    area = win_w * win_h
    mean = window.sum() / area
    variance = (window ** 2).sum() / area - mean ** 2
    if variance < 1.0:
        return False
    norm = area * np.sqrt(variance)

    scaled = []
    for feat in cascade.features:
        rects = []
        for r in feat.rects:
            rects.append([int(round(r.x * scale)), int(round(r.y * scale)),
                          max(1, int(round(r.w * scale))),
                          max(1, int(round(r.h * scale))), r.weight])
        rest = sum(rw * rh * wt for _, _, rw, rh, wt in rects[1:])
        rects[0][4] = -rest / (rects[0][2] * rects[0][3])
        scaled.append(rects)

    for stage in cascade.stages:
        stage_sum = 0.0
        for stump in stage.stumps:
            value = 0.0
            for rx, ry, rw, rh, wt in scaled[stump.feature]:
                value += wt * float(window[ry:ry + rh, rx:rx + rw].sum())
            value /= norm
            stage_sum += stump.fail_value if value < stump.threshold else stump.pass_value
        if stage_sum < stage.threshold:
            return False
    return True


def dft2x2(m):
    """Hand-expanded 2x2 DFT: basis vectors are (+1,+1) and (+1,-1)."""
    a, b = m[0]
    c, d = m[1]
    return np.array([[a + b + c + d, a - b + c - d],
                     [a + b - c - d, a - b - c + d]], dtype=complex)


def window_counts_naive(bits, side):
    """Per-pixel clipped window counts by explicit shift accumulation.

    Same contract as hand_window_count evaluated at every pixel, but
    batched: one shifted add per window offset instead of a Python loop
    per pixel. Still no cumulative-sum trick.
    """
    h, w = bits.shape
    half = side // 2
    out = np.zeros((h, w), dtype=np.int64)
    src = bits.astype(np.int64)
    for dy in range(-half, side - half):
        for dx in range(-half, side - half):
            y0, y1 = max(0, -dy), min(h, h - dy)
            x0, x1 = max(0, -dx), min(w, w - dx)
            if y0 < y1 and x0 < x1:
                out[y0:y1, x0:x1] += src[y0 + dy:y1 + dy, x0 + dx:x1 + dx]
    return out


def stretched_oracle_bulk(outside_bits, region, anchor_uc, side,
                          lateral_bias=0.2, density_weight=0.5, min_pixels=30):
    """stretched_oracle restated over whole arrays, for big random batches."""
    h, w = outside_bits.shape
    ux, uy = anchor_uc
    if int(outside_bits.sum()) <= min_pixels:
        return "none", (0, 0)
    dens = window_counts_naive(outside_bits, side)
    fx = region[0] + np.arange(w)[None, :]
    fy = region[1] + np.arange(h)[:, None]
    score = np.abs(fx - ux) + lateral_bias * (uy - fy) + density_weight * dens
    idx = int(np.argmax(np.where(outside_bits, score, -np.inf)))
    by, bx = idx // w, idx % w
    vec = (int(region[0] + bx - ux), int(region[1] + by - uy))
    if vec == (0, 0):
        return "none", (0, 0)
    return "stretched_out", vec


def front_oracle_bulk(inside_bits, region, box, anchor_bc, side,
                      density_weight=0.013, min_density=30):
    """front_oracle restated over whole arrays, for big random batches."""
    h, w = inside_bits.shape
    bx, by = anchor_bc
    if not inside_bits.any():
        return "none", (0, 0)
    dens = window_counts_naive(inside_bits, side)
    fx = region[0] + np.arange(w)[None, :]
    fy = region[1] + np.arange(h)[:, None]
    score = -np.abs(fx - bx) + density_weight * dens
    idx = int(np.argmax(np.where(inside_bits, score, -np.inf)))
    py, px = idx // w, idx % w
    best_fx, best_fy = region[0] + px, region[1] + py
    if abs(best_fx - bx) >= box[2] * 0.2:
        return "none", (0, 0)
    if int(dens[py, px]) <= min_density:
        return "none", (0, 0)
    vec = (int(best_fx - bx), int(best_fy - by))
    if vec == (0, 0):
        return "none", (0, 0)
    return "front_of_body", vec
