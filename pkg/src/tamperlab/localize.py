"""Tamper-mask prediction and mask quality metrics.

The predictor is a transparent baseline: ELA heatmap (auto-max gain),
grayscale, resize to the 128x128 mask canvas, Otsu (or fixed) threshold,
morphological open/close, and small-component removal. Every stage is
deterministic, so predicted masks are bit-stable across runs.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from PIL import Image

from tamperlab import ela, imaging
from tamperlab.errors import IoFailure, ShapeMismatch
from tamperlab.imaging import RasterImage

MASK_SIDE = 128


@dataclass(frozen=True)
class TamperMask:
    """Binary mask; 1 marks a tampered pixel."""

    bits: np.ndarray  # (height, width) uint8 of 0/1

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
        if arr.dtype == np.bool_:
            arr = arr.astype(np.uint8)
        if arr.dtype != np.uint8 or not np.all((arr == 0) | (arr == 1)):
            raise ValueError("mask bits must be 0/1")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def area(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class LocalizeConfig:
    """Settings for the threshold-based mask predictor.

    ``threshold`` of None runs Otsu on the resized heatmap; an integer in
    [0, 255] fixes the cut directly. Foreground is strictly > threshold.
    """

    ela_quality: int = 90
    threshold: int = None
    morph_radius: int = 1
    min_component_area: int = 16

    def __post_init__(self):
        imaging.validate_quality(self.ela_quality)
        if self.threshold is not None and not 0 <= self.threshold <= 255:
            raise ValueError(f"fixed threshold must lie in [0, 255], got {self.threshold}")
        if self.morph_radius < 0:
            raise ValueError(f"morph radius must be >= 0, got {self.morph_radius}")
        if self.min_component_area < 0:
            raise ValueError(f"min component area must be >= 0, got {self.min_component_area}")


def otsu_threshold(gray: RasterImage) -> int:
    """Threshold maximizing between-class variance on the 256-bin
    histogram, exact rational arithmetic, smallest-t tie break.

    A single-valued image returns its own value, so the strict
    foreground rule (> t) yields an empty foreground.
    """
    if gray.channels != 1:
        raise ValueError("otsu_threshold requires a 1-channel raster")
    hist = np.bincount(gray.plane().reshape(-1), minlength=256).astype(np.int64)
    live = np.nonzero(hist)[0]
    if live.shape[0] == 1:
        return int(live[0])
    total = int(hist.sum())
    total_sum = int((hist * np.arange(256, dtype=np.int64)).sum())
    best_t = 0
    best_score = Fraction(-1)
    n0 = 0
    s0 = 0
    for t in range(256):
        n0 += int(hist[t])
        s0 += t * int(hist[t])
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            score = Fraction(0)
        else:
            s1 = total_sum - s0
            gap = s0 * n1 - s1 * n0
            score = Fraction(gap * gap, n0 * n1)
        if score > best_score:
            best_score = score
            best_t = t
    return best_t


def _window_count(bits: np.ndarray, radius: int) -> np.ndarray:
    """Count of set pixels in each (2r+1)² square window, zero-padded."""
    padded = np.pad(bits.astype(np.int64), radius + 1)
    cum = padded.cumsum(axis=0).cumsum(axis=1)
    k = 2 * radius + 1
    h, w = bits.shape
    top = cum[k:k + h, k:k + w]
    bottom = cum[:h, :w]
    left = cum[k:k + h, :w]
    right = cum[:h, k:k + w]
    return top + bottom - left - right


def _erode(bits: np.ndarray, radius: int) -> np.ndarray:
    k = 2 * radius + 1
    return (_window_count(bits, radius) == k * k).astype(np.uint8)


def _dilate(bits: np.ndarray, radius: int) -> np.ndarray:
    return (_window_count(bits, radius) > 0).astype(np.uint8)


def morph_open(mask: TamperMask, radius: int = 1) -> TamperMask:
    """Erosion then dilation with a square element of side 2r+1
    (zero-padded borders); removes specks thinner than the element."""
    if radius == 0:
        return mask
    return TamperMask(_dilate(_erode(mask.bits, radius), radius))


def morph_close(mask: TamperMask, radius: int = 1) -> TamperMask:
    """Dilation then erosion; fills gaps thinner than the element."""
    if radius == 0:
        return mask
    return TamperMask(_erode(_dilate(mask.bits, radius), radius))


def filter_small_components(mask: TamperMask, min_area: int) -> TamperMask:
    """Drop 8-connected components with fewer than min_area pixels."""
    if min_area <= 1:
        return mask
    bits = mask.bits
    h, w = bits.shape
    seen = np.zeros((h, w), dtype=bool)
    out = np.zeros((h, w), dtype=np.uint8)
    for sy in range(h):
        for sx in range(w):
            if not bits[sy, sx] or seen[sy, sx]:
                continue
            queue = deque([(sy, sx)])
            seen[sy, sx] = True
            component = []
            while queue:
                y, x = queue.popleft()
                component.append((y, x))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        ny, nx = y + dy, x + dx
                        if 0 <= ny < h and 0 <= nx < w and bits[ny, nx] and not seen[ny, nx]:
                            seen[ny, nx] = True
                            queue.append((ny, nx))
            if len(component) >= min_area:
                for y, x in component:
                    out[y, x] = 1
    return TamperMask(out)


def predict_mask(img: RasterImage, cfg: LocalizeConfig = None) -> TamperMask:
    """ELA-threshold mask prediction at 128x128.

    compute_ela (auto-max) -> grayscale -> resize -> threshold (strict >)
    -> open -> close -> drop components smaller than min_component_area.
    An all-zero heatmap (bit-exact recompression) yields the empty mask.
    """
    if cfg is None:
        cfg = LocalizeConfig()
    heat = ela.compute_ela(img, ela.ElaConfig(quality=cfg.ela_quality))
    gray = imaging.resize_bilinear(imaging.to_grayscale(heat), MASK_SIDE, MASK_SIDE)
    t = cfg.threshold if cfg.threshold is not None else otsu_threshold(gray)
    mask = TamperMask((gray.plane() > t).astype(np.uint8))
    mask = morph_open(mask, cfg.morph_radius)
    mask = morph_close(mask, cfg.morph_radius)
    return filter_small_components(mask, cfg.min_component_area)


def mask_iou(pred: TamperMask, gt: TamperMask) -> float:
    """Intersection over union; two empty masks score 1.0."""
    if pred.bits.shape != gt.bits.shape:
        raise ShapeMismatch(f"mask shape {pred.bits.shape} vs {gt.bits.shape}")
    inter = int(np.logical_and(pred.bits, gt.bits).sum())
    union = int(np.logical_or(pred.bits, gt.bits).sum())
    if union == 0:
        return 1.0
    return inter / union


def mask_pixel_f1(pred: TamperMask, gt: TamperMask) -> float:
    """Pixel F1 = 2|pred ∧ gt| / (|pred| + |gt|); empty vs empty is 1.0."""
    if pred.bits.shape != gt.bits.shape:
        raise ShapeMismatch(f"mask shape {pred.bits.shape} vs {gt.bits.shape}")
    inter = int(np.logical_and(pred.bits, gt.bits).sum())
    denom = pred.area() + gt.area()
    if denom == 0:
        return 1.0
    return 2.0 * inter / denom


def save_mask(mask: TamperMask, path) -> None:
    """Write as a 1-bit PNG: black = authentic, white = tampered."""
    img = Image.fromarray((mask.bits * 255).astype(np.uint8), "L")
    try:
        img.convert("1", dither=Image.Dither.NONE).save(path, "PNG")
    except OSError as exc:
        raise IoFailure(f"cannot write mask: {exc}") from exc


def load_mask(path) -> TamperMask:
    try:
        with Image.open(path) as im:
            plane = np.asarray(im.convert("L"))
    except OSError as exc:
        raise IoFailure(f"cannot read mask: {exc}") from exc
    return TamperMask((plane > 127).astype(np.uint8))
