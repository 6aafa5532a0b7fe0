"""Discriminative correlation-filter tracker with a separate 1-D scale filter.

The filter is trained in the Fourier domain against a Gaussian target
response. With correlation defined as (h corr f)(tau) = sum_x h(x) f(x + tau),
the regularized least-squares filter for a d-channel template f and desired
response g has the closed form, per channel l:

    H^l = conj(G) F^l / (sum_k conj(F^k) F^k + reg)

The model keeps the numerator A^l = conj(G) F^l and the bare denominator
B = sum_k conj(F^k) F^k separately so both can be blended over time with a
learning rate; the regularizer is added back when scoring:

    response = IFFT( sum_l conj(A^l) Z^l / (B + reg) )

Translation runs on a windowed grayscale template around the previous
center; scale runs the same machinery on a 1 x S grid whose columns are
flattened patches sampled at geometrically spaced sizes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractError, TrackingLostError
from .frames import luma_u8
from .geometry import BoundingBox

# Score responses are real up to FFT round-off; anything above this residue
# on the imaginary part indicates a broken model, not noise.
IMAG_RESIDUE_TOL = 1e-6


@dataclass(frozen=True)
class TrackerParams:
    """Knobs for both correlation filters. Defaults follow the reference setup."""

    regularization: float = 0.01
    learning_rate: float = 0.025
    padding: float = 2.0
    response_sigma_factor: float = 1.0 / 16.0
    num_scales: int = 33
    scale_step: float = 1.02
    scale_sigma_bins: float = 1.0
    template_max_side: int = 128
    scale_model_max_area: int = 512
    min_box_side: int = 4

    def __post_init__(self):
        if self.regularization <= 0:
            raise ContractError("regularization must be positive")
        if not 0 < self.learning_rate <= 1:
            raise ContractError("learning rate must lie in (0, 1]")
        if self.num_scales < 1 or self.num_scales % 2 == 0:
            raise ContractError("num_scales must be a positive odd count")
        if self.scale_step <= 1.0:
            raise ContractError("scale_step must exceed 1")


@dataclass(frozen=True)
class FeatureMap:
    """Multi-channel template: channels has shape (d, h, w), float64."""

    channels: np.ndarray

    def __post_init__(self):
        if self.channels.ndim != 3:
            raise ContractError(f"feature channels must be 3-D, got {self.channels.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.channels.shape[1], self.channels.shape[2]


@dataclass(frozen=True)
class FilterModel:
    """Learned correlation filter in the Fourier domain.

    numerator: (d, h, w) complex, one plane per feature channel.
    denominator: (h, w) real, shared across channels, regularizer excluded.
    response_spectrum: FFT of the target response the filter was trained on.
    """

    numerator: np.ndarray
    denominator: np.ndarray
    response_spectrum: np.ndarray
    regularization: float
    learning_rate: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.denominator.shape


def cosine_window(height: int, width: int) -> np.ndarray:
    """Separable Hann window, zero on the borders for sizes above 1."""
    wy = np.hanning(height) if height > 1 else np.ones(1)
    wx = np.hanning(width) if width > 1 else np.ones(1)
    return np.outer(wy, wx)


def gaussian_response(height: int, width: int, sigma: float) -> np.ndarray:
    """Gaussian target response peaking at the grid center (h//2, w//2)."""
    ys = np.arange(height)[:, None] - height // 2
    xs = np.arange(width)[None, :] - width // 2
    return np.exp(-(ys ** 2 + xs ** 2) / (2.0 * sigma ** 2))


def train_init(features: FeatureMap, response: np.ndarray,
               regularization: float, learning_rate: float) -> FilterModel:
    """Train a fresh filter model from one template and its target response."""
    if features.shape != response.shape:
        raise ContractError(
            f"response {response.shape} does not match features {features.shape}")
    spectra = np.fft.fft2(features.channels, axes=(-2, -1))
    g = np.fft.fft2(response)
    numerator = np.conj(g)[None] * spectra
    denominator = np.sum(spectra * np.conj(spectra), axis=0).real
    return FilterModel(numerator, denominator, g, regularization, learning_rate)


def update(model: FilterModel, features: FeatureMap) -> FilterModel:
    """Blend one new template into the model with the stored learning rate.

    new_A = (1 - eta) A + eta conj(G) F
    new_B = (1 - eta) B + eta sum_k conj(F^k) F^k
    """
    if features.shape != model.shape:
        raise ContractError(
            f"features {features.shape} do not match model {model.shape}")
    eta = model.learning_rate
    spectra = np.fft.fft2(features.channels, axes=(-2, -1))
    num = ((1.0 - eta) * model.numerator
           + eta * np.conj(model.response_spectrum)[None] * spectra)
    den = (1.0 - eta) * model.denominator + eta * np.sum(
        spectra * np.conj(spectra), axis=0).real
    return replace(model, numerator=num, denominator=den)


def score(model: FilterModel, features: FeatureMap) -> np.ndarray:
    """Real-valued response map of the model over a candidate template."""
    if features.shape != model.shape:
        raise ContractError(
            f"features {features.shape} do not match model {model.shape}")
    spectra = np.fft.fft2(features.channels, axes=(-2, -1))
    numerator = np.sum(np.conj(model.numerator) * spectra, axis=0)
    response = np.fft.ifft2(numerator / (model.denominator + model.regularization))
    peak = np.abs(response.real).max()
    if peak > 0 and np.abs(response.imag).max() > IMAG_RESIDUE_TOL * max(peak, 1.0):
        raise ContractError("response has non-negligible imaginary part")
    return response.real


def peak_location(response: np.ndarray) -> tuple[int, int]:
    """(row, col) of the maximum; ties break to smallest row, then column."""
    idx = int(np.argmax(response))
    return idx // response.shape[1], idx % response.shape[1]


# --------------------------------------------------------------------------
# Patch sampling

def crop_patch(gray: np.ndarray, center: tuple[float, float],
               size: tuple[int, int]) -> np.ndarray:
    """Crop a size=(w, h) patch centered at (cx, cy), replicating borders."""
    w, h = size
    if w < 1 or h < 1:
        raise ContractError(f"patch size must be positive, got {w}x{h}")
    cx, cy = center
    x0 = int(np.floor(cx)) - w // 2
    y0 = int(np.floor(cy)) - h // 2
    xs = np.clip(np.arange(x0, x0 + w), 0, gray.shape[1] - 1)
    ys = np.clip(np.arange(y0, y0 + h), 0, gray.shape[0] - 1)
    return gray[np.ix_(ys, xs)]


def resample_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resize; exact identity when the size already matches."""
    in_h, in_w = img.shape
    if (in_h, in_w) == (out_h, out_w):
        return img.astype(np.float64, copy=True)
    # Align samples over the pixel grid span [0, in-1].
    ys = np.linspace(0.0, in_h - 1.0, out_h)
    xs = np.linspace(0.0, in_w - 1.0, out_w)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    img = img.astype(np.float64)
    top = img[np.ix_(y0, x0)] * (1 - fx) + img[np.ix_(y0, x1)] * fx
    bot = img[np.ix_(y1, x0)] * (1 - fx) + img[np.ix_(y1, x1)] * fx
    return top * (1 - fy) + bot * fy


def extract_features(gray: np.ndarray, center: tuple[float, float],
                     size: tuple[int, int], out_shape: tuple[int, int],
                     window: np.ndarray | None = None) -> FeatureMap:
    """Grayscale template around center: values shifted to [-0.5, 0.5].

    gray is a float image in [0, 1]. size is the (w, h) patch extent in
    pixels; the patch is resampled to out_shape = (h, w) of the model grid
    and optionally multiplied by a window of that shape.
    """
    patch = crop_patch(gray, center, size)
    patch = resample_bilinear(patch, out_shape[0], out_shape[1])
    patch -= 0.5
    if window is not None:
        patch = patch * window
    return FeatureMap(patch[None])


def gray_image(frame_pixels: np.ndarray) -> np.ndarray:
    """Float grayscale in [0, 1] from RGB8 pixels."""
    return luma_u8(frame_pixels).astype(np.float64) / 255.0


# --------------------------------------------------------------------------
# Full tracker state

@dataclass
class TrackerState:
    """Mutable tracker bookkeeping between frames."""

    params: TrackerParams
    center: tuple[float, float]
    base_size: tuple[float, float]
    scale_factor: float
    model_shape: tuple[int, int]
    window: np.ndarray
    translation: FilterModel
    scale_sizes: tuple[int, int]
    scale_window: np.ndarray
    scale_exponents: np.ndarray
    scale: FilterModel

    def box(self) -> BoundingBox:
        w = self.base_size[0] * self.scale_factor
        h = self.base_size[1] * self.scale_factor
        return BoundingBox(int(round(self.center[0] - w / 2.0)),
                           int(round(self.center[1] - h / 2.0)),
                           max(1, int(round(w))), max(1, int(round(h))))


def _model_shape(box_w: float, box_h: float, params: TrackerParams) -> tuple[int, int]:
    """Padded template size in pixels, capped to keep FFTs cheap."""
    pw = max(4, int(round(box_w * (1.0 + params.padding))))
    ph = max(4, int(round(box_h * (1.0 + params.padding))))
    longest = max(pw, ph)
    if longest > params.template_max_side:
        ratio = params.template_max_side / longest
        pw = max(4, int(round(pw * ratio)))
        ph = max(4, int(round(ph * ratio)))
    return ph, pw


def _scale_sample_shape(box_w: float, box_h: float, params: TrackerParams) -> tuple[int, int]:
    """Patch size used per scale column, area-capped."""
    w, h = max(2.0, box_w), max(2.0, box_h)
    area = w * h
    if area > params.scale_model_max_area:
        ratio = np.sqrt(params.scale_model_max_area / area)
        w, h = w * ratio, h * ratio
    return max(2, int(round(h))), max(2, int(round(w)))


def _scale_features(gray: np.ndarray, center: tuple[float, float],
                    base_size: tuple[float, float], scale_factor: float,
                    state_shape: tuple[int, int], exponents: np.ndarray,
                    step: float, window: np.ndarray) -> FeatureMap:
    """Stack of flattened patches over the scale grid, shape (d, 1, S)."""
    sh, sw = state_shape
    columns = np.empty((sh * sw, 1, exponents.size))
    for i, n in enumerate(exponents):
        factor = scale_factor * step ** float(n)
        pw = max(1, int(round(base_size[0] * factor)))
        ph = max(1, int(round(base_size[1] * factor)))
        patch = resample_bilinear(crop_patch(gray, center, (pw, ph)), sh, sw)
        columns[:, 0, i] = (patch - 0.5).ravel()
    columns *= window[None, :, :]
    return FeatureMap(columns)


def init_tracker(frame_pixels: np.ndarray, box: BoundingBox,
                 params: TrackerParams | None = None) -> TrackerState:
    """Start tracking the contents of box in the given frame."""
    params = params or TrackerParams()
    if box.w < params.min_box_side or box.h < params.min_box_side:
        raise ContractError(f"initial box {box.w}x{box.h} is below the "
                            f"{params.min_box_side}px minimum")
    gray = gray_image(frame_pixels)
    center = (box.x + box.w / 2.0, box.y + box.h / 2.0)
    base_size = (float(box.w), float(box.h))

    model_shape = _model_shape(box.w, box.h, params)
    window = cosine_window(*model_shape)
    sigma = params.response_sigma_factor * np.sqrt(model_shape[0] * model_shape[1])
    response = gaussian_response(*model_shape, sigma=sigma)
    patch_size = _padded_patch_size(base_size, 1.0, params)
    features = extract_features(gray, center, patch_size, model_shape, window)
    translation = train_init(features, response,
                             params.regularization, params.learning_rate)

    s = params.num_scales
    exponents = np.arange(s) - s // 2
    scale_sizes = _scale_sample_shape(box.w, box.h, params)
    scale_window = cosine_window(1, s)
    scale_response = gaussian_response(1, s, sigma=params.scale_sigma_bins)
    scale_feats = _scale_features(gray, center, base_size, 1.0, scale_sizes,
                                  exponents, params.scale_step, scale_window)
    scale = train_init(scale_feats, scale_response,
                       params.regularization, params.learning_rate)

    return TrackerState(params=params, center=center, base_size=base_size,
                        scale_factor=1.0, model_shape=model_shape, window=window,
                        translation=translation, scale_sizes=scale_sizes,
                        scale_window=scale_window, scale_exponents=exponents,
                        scale=scale)


def _padded_patch_size(base_size: tuple[float, float], scale_factor: float,
                       params: TrackerParams) -> tuple[int, int]:
    pw = max(1, int(round(base_size[0] * scale_factor * (1.0 + params.padding))))
    ph = max(1, int(round(base_size[1] * scale_factor * (1.0 + params.padding))))
    return pw, ph


def track(state: TrackerState, frame_pixels: np.ndarray) -> BoundingBox:
    """Advance the tracker by one frame; returns the new box, mutates state.

    Translation is located first on the padded grayscale template, then the
    scale filter refines size around the new center, then both models blend
    in the templates sampled at the final estimate.
    """
    params = state.params
    gray = gray_image(frame_pixels)

    # Translation step.
    patch_size = _padded_patch_size(state.base_size, state.scale_factor, params)
    features = extract_features(gray, state.center, patch_size,
                                state.model_shape, state.window)
    response = score(state.translation, features)
    row, col = peak_location(response)
    mh, mw = state.model_shape
    dy = (row - mh // 2 + mh) % mh
    dx = (col - mw // 2 + mw) % mw
    if dy > mh // 2:
        dy -= mh
    if dx > mw // 2:
        dx -= mw
    stride_x = patch_size[0] / mw
    stride_y = patch_size[1] / mh
    cx = state.center[0] + dx * stride_x
    cy = state.center[1] + dy * stride_y
    cx = min(max(cx, 0.0), gray.shape[1] - 1.0)
    cy = min(max(cy, 0.0), gray.shape[0] - 1.0)
    state.center = (cx, cy)

    # Scale step.
    scale_feats = _scale_features(gray, state.center, state.base_size,
                                  state.scale_factor, state.scale_sizes,
                                  state.scale_exponents, params.scale_step,
                                  state.scale_window)
    scale_response = score(state.scale, scale_feats)
    _, bin_idx = peak_location(scale_response)
    state.scale_factor *= params.scale_step ** float(
        state.scale_exponents[bin_idx])

    if (state.base_size[0] * state.scale_factor < params.min_box_side
            or state.base_size[1] * state.scale_factor < params.min_box_side):
        raise TrackingLostError(
            f"tracked box degenerated below {params.min_box_side}px")

    # Model updates at the refined estimate.
    patch_size = _padded_patch_size(state.base_size, state.scale_factor, params)
    features = extract_features(gray, state.center, patch_size,
                                state.model_shape, state.window)
    state.translation = update(state.translation, features)
    scale_feats = _scale_features(gray, state.center, state.base_size,
                                  state.scale_factor, state.scale_sizes,
                                  state.scale_exponents, params.scale_step,
                                  state.scale_window)
    state.scale = update(state.scale, scale_feats)
    return state.box()
