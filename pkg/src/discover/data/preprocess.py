"""Image preprocessing: trim, resize, grayscale, range normalization.

Every model input in this project is produced by `preprocess`: a square
single-channel grid of floats in [0, 1]. The exact conventions are pinned
here so outputs are bit-stable across runs:

* grayscale uses Rec.601 luminance weights (0.299, 0.587, 0.114),
  evaluated as (299*R + 587*G + 114*B) / 1000 in exact integer-scaled
  arithmetic so a uniform image stays exactly uniform;
* resizing is bilinear with half-pixel sample centers and edge clamping,
  interpolating in lerp form a + t*(b - a), which preserves constant
  images bit-exactly;
* trimming happens before resizing.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from ..errors import DataContractError

GRAY_WEIGHTS = (0.299, 0.587, 0.114)  # Rec.601, applied as integer-scaled /1000


@dataclass(frozen=True)
class PreprocessConfig:
    """How raw images are turned into model inputs.

    trim_px pixels are removed from each of the four sides, then the image
    is resized to target_side x target_side and converted to grayscale in
    [0, 1] (dividing by normalize_divisor).
    """

    trim_px: int = 0
    target_side: int = 64
    to_grayscale: bool = True
    normalize_divisor: float = 255.0

    def __post_init__(self):
        if self.trim_px < 0:
            raise DataContractError(f"trim_px must be >= 0, got {self.trim_px}")
        if self.target_side <= 0:
            raise DataContractError(f"target_side must be > 0, got {self.target_side}")
        if self.normalize_divisor <= 0:
            raise DataContractError("normalize_divisor must be > 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AugmentationPolicy:
    """Training-time augmentation. Only horizontal flipping is supported."""

    horizontal_flip_prob: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.horizontal_flip_prob <= 1.0:
            raise DataContractError(
                f"horizontal_flip_prob must be in [0, 1], got {self.horizontal_flip_prob}"
            )

    def to_dict(self) -> dict:
        return asdict(self)


def ensure_processed_image(img: np.ndarray, side: int | None = None) -> np.ndarray:
    """Validate the processed-image contract: square, 2-D, values in [0, 1]."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DataContractError(f"expected a square 2-D image, got shape {arr.shape}")
    if side is not None and arr.shape[0] != side:
        raise DataContractError(f"expected side {side}, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise DataContractError("image contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise DataContractError(
            f"image values must lie in [0, 1], got range [{arr.min()}, {arr.max()}]"
        )
    return arr


def rgb_to_grayscale(img: np.ndarray) -> np.ndarray:
    """Rec.601 luminance in integer-scaled arithmetic (exact for uniform inputs)."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return img
    if img.ndim == 3 and img.shape[2] == 1:
        return img[:, :, 0]
    if img.ndim == 3 and img.shape[2] == 3:
        return (299.0 * img[:, :, 0] + 587.0 * img[:, :, 1] + 114.0 * img[:, :, 2]) / 1000.0
    raise DataContractError(f"expected HxW, HxWx1 or HxWx3 image, got shape {img.shape}")


def bilinear_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resampling with half-pixel centers and edge clamping.

    Output pixel (i, j) samples the source at
    ``((i + 0.5) * H/out_h - 0.5, (j + 0.5) * W/out_w - 0.5)``, clamped to
    the valid index range, and interpolates in lerp form ``a + t*(b - a)``.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise DataContractError(f"bilinear_resize expects a 2-D array, got {img.shape}")
    in_h, in_w = img.shape
    if in_h == out_h and in_w == out_w:
        return img.copy()

    ys = (np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5
    ys = np.clip(ys, 0.0, in_h - 1.0)
    xs = np.clip(xs, 0.0, in_w - 1.0)

    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]

    p00 = img[np.ix_(y0, x0)]
    p01 = img[np.ix_(y0, x1)]
    p10 = img[np.ix_(y1, x0)]
    p11 = img[np.ix_(y1, x1)]

    top = p00 + fx * (p01 - p00)
    bottom = p10 + fx * (p11 - p10)
    return top + fy * (bottom - top)


def preprocess(raw_image: np.ndarray, config: PreprocessConfig) -> np.ndarray:
    """Trim, resize, grayscale and normalize a raw image into [0, 1].

    Order of operations: trim -> resize -> grayscale -> divide. The result
    is a float32 (target_side, target_side) array.

    Raises DataContractError when the image is too small to trim.
    """
    raw = np.asarray(raw_image)
    if raw.ndim not in (2, 3):
        raise DataContractError(f"expected HxW or HxWxC image, got shape {raw.shape}")
    h, w = raw.shape[0], raw.shape[1]
    t = config.trim_px
    if h <= 2 * t or w <= 2 * t:
        raise DataContractError(
            f"image of size {h}x{w} is too small to trim {t} px from each side"
        )
    trimmed = raw[t : h - t, t : w - t]

    channels = trimmed.astype(np.float64)
    if channels.ndim == 2:
        channels = channels[:, :, None]
    resized = np.stack(
        [
            bilinear_resize(channels[:, :, c], config.target_side, config.target_side)
            for c in range(channels.shape[2])
        ],
        axis=2,
    )

    if config.to_grayscale:
        gray = rgb_to_grayscale(resized)
    else:
        if resized.shape[2] != 1:
            raise DataContractError("multi-channel output requested; only grayscale is supported")
        gray = resized[:, :, 0]

    out = gray / config.normalize_divisor
    out = np.clip(out, 0.0, 1.0)
    return out.astype(np.float32)


def augment(img: np.ndarray, policy: AugmentationPolicy, rng_seed: int) -> np.ndarray:
    """Apply the flip policy; the flip decision is reproducible from the seed."""
    arr = ensure_processed_image(img)
    rng = np.random.default_rng(rng_seed)
    if policy.horizontal_flip_prob > 0 and rng.random() < policy.horizontal_flip_prob:
        return np.ascontiguousarray(arr[:, ::-1])
    return arr.copy()
