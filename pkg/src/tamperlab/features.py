"""Texture features: local binary patterns, blockwise 2-D DCT statistics,
and min/max feature scaling.

The main pipeline (``dct_lbp_features``) summarizes an image by how much
each DCT coefficient of the LBP texture map varies across non-overlapping
tiles; pasted or duplicated regions disturb those per-tile spectra.
"""

from dataclasses import dataclass

import numpy as np

from tamperlab import imaging
from tamperlab.backend import kernels
from tamperlab.errors import EmptySet, LengthMismatch, TooSmall
from tamperlab.imaging import RasterImage

CHANNEL_LUMINANCE = "luminance"
CHANNEL_CHROMA_RED = "chroma-red"


@dataclass(frozen=True)
class FeatureVector:
    """A fixed-length real feature vector plus the id of the pipeline
    that produced it."""

    values: np.ndarray
    pipeline_id: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError(f"feature vector must be 1-D, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("feature vector has non-finite components")
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class ScalingParams:
    """Componentwise min/max fitted on training features only."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.ascontiguousarray(np.asarray(self.lo, dtype=np.float64))
        hi = np.ascontiguousarray(np.asarray(self.hi, dtype=np.float64))
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ValueError("scaling bounds must be 1-D vectors of equal length")
        if np.any(lo > hi):
            raise ValueError("scaling requires lo <= hi componentwise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __len__(self):
        return self.lo.shape[0]


@dataclass(frozen=True)
class DctLbpConfig:
    """Canvas/tiling layout for the DCT-LBP feature pipeline.

    The image is resampled to canvas x canvas, reduced to one channel,
    LBP-coded, and cut into (canvas/block)^2 tiles of block x block pixels.
    """

    canvas: int = 128
    block: int = 16
    channel: str = CHANNEL_LUMINANCE

    def __post_init__(self):
        if self.block not in (8, 16, 32):
            raise ValueError(f"block side must be 8, 16, or 32, got {self.block}")
        if self.canvas < self.block or self.canvas % self.block != 0:
            raise ValueError(f"block {self.block} must divide canvas {self.canvas}")
        if self.channel not in (CHANNEL_LUMINANCE, CHANNEL_CHROMA_RED):
            raise ValueError(f"unknown channel {self.channel!r}")


def lbp_code(window) -> int:
    """8-bit local binary pattern of a 3x3 window.

    Bit i is set iff the i-th neighbor >= center, neighbors taken clockwise
    from the top-left corner, top-left contributing the most significant
    bit. Ties count as >=, so a constant window codes to 255.
    """
    w = np.asarray(window, dtype=np.float64)
    if w.size != 9:
        raise ValueError(f"window must hold 9 samples, got {w.size}")
    w = w.reshape(3, 3)
    center = w[1, 1]
    code = 0
    for (r, c), weight in zip(
        ((0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0)),
        (128, 64, 32, 16, 8, 4, 2, 1),
    ):
        if w[r, c] >= center:
            code |= weight
    return code


def lbp_map(gray: RasterImage) -> RasterImage:
    """Per-pixel LBP codes of a 1-channel raster, same dimensions as the
    input (borders use clamp-to-edge neighbors)."""
    if gray.channels != 1:
        raise ValueError("lbp_map requires a 1-channel raster")
    if gray.width < 3 or gray.height < 3:
        raise TooSmall(f"lbp_map needs at least 3x3 pixels, got {gray.width}x{gray.height}")
    codes = kernels.lbp_map(gray.plane())
    return RasterImage(np.asarray(codes), copy=False)


_BASIS_CACHE: dict = {}


def _dct_basis(n: int) -> np.ndarray:
    """Orthonormal type-II DCT basis matrix: row k holds
    c(k) * cos(pi*(2m+1)*k / 2n) with c(0)=sqrt(1/n), c(k>0)=sqrt(2/n)."""
    basis = _BASIS_CACHE.get(n)
    if basis is None:
        k = np.arange(n, dtype=np.float64)[:, None]
        m = np.arange(n, dtype=np.float64)[None, :]
        basis = np.sqrt(2.0 / n) * np.cos(np.pi * (2.0 * m + 1.0) * k / (2.0 * n))
        basis[0, :] = np.sqrt(1.0 / n)
        basis.setflags(write=False)
        _BASIS_CACHE[n] = basis
    return basis


def dct2(block) -> np.ndarray:
    """Orthonormal 2-D type-II DCT of a square matrix (energy-preserving)."""
    x = np.asarray(block, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] < 1:
        raise ValueError(f"dct2 expects a square matrix, got shape {x.shape}")
    basis = _dct_basis(x.shape[0])
    return basis @ x @ basis.T


def idct2(coeffs) -> np.ndarray:
    """Inverse of dct2 (the transpose of the orthonormal basis)."""
    y = np.asarray(coeffs, dtype=np.float64)
    if y.ndim != 2 or y.shape[0] != y.shape[1] or y.shape[0] < 1:
        raise ValueError(f"idct2 expects a square matrix, got shape {y.shape}")
    basis = _dct_basis(y.shape[0])
    return basis.T @ y @ basis


def chroma_red(img: RasterImage) -> RasterImage:
    """Cr chroma plane (Cr = 128 + 0.5R - 0.418688G - 0.081312B).

    Grayscale input has no chroma and maps to a constant-128 plane.
    """
    if img.channels == 1:
        return RasterImage(np.full((img.height, img.width), 128, dtype=np.uint8), copy=False)
    rgb = img.data.astype(np.float64)
    cr = 128.0 + 0.5 * rgb[:, :, 0] - 0.418688 * rgb[:, :, 1] - 0.081312 * rgb[:, :, 2]
    cr = np.clip(np.floor(cr + 0.5), 0.0, 255.0)
    return RasterImage(cr.astype(np.uint8), copy=False)


def select_channel(img: RasterImage, channel: str) -> RasterImage:
    if channel == CHANNEL_LUMINANCE:
        return imaging.to_grayscale(img)
    if channel == CHANNEL_CHROMA_RED:
        return chroma_red(img)
    raise ValueError(f"unknown channel {channel!r}")


def dct_lbp_features(img: RasterImage, cfg: DctLbpConfig = None) -> FeatureVector:
    """Unscaled DCT-LBP feature vector of length block².

    Channel plane -> resize to canvas x canvas -> LBP map -> non-overlapping
    block x block tiles -> 2-D DCT per tile -> population standard deviation
    of each coefficient position across tiles, flattened row-major.
    """
    if cfg is None:
        cfg = DctLbpConfig()
    plane = select_channel(img, cfg.channel)
    plane = imaging.resize_bilinear(plane, cfg.canvas, cfg.canvas)
    codes = lbp_map(plane).plane().astype(np.float64)
    n_tiles = cfg.canvas // cfg.block
    tiles = (
        codes.reshape(n_tiles, cfg.block, n_tiles, cfg.block)
        .swapaxes(1, 2)
        .reshape(n_tiles * n_tiles, cfg.block, cfg.block)
    )
    basis = _dct_basis(cfg.block)
    coeffs = basis @ tiles @ basis.T
    spread = coeffs.std(axis=0)  # population std (ddof=0)
    return FeatureVector(spread.reshape(-1), pipeline_id="dctlbp")


def fit_scaling(train) -> ScalingParams:
    """Componentwise min/max over a nonempty collection of equal-length
    feature vectors (training data only)."""
    mat = _as_matrix(train)
    return ScalingParams(mat.min(axis=0), mat.max(axis=0))


def apply_scaling(v: FeatureVector, p: ScalingParams) -> FeatureVector:
    """Map component i to (v_i - lo_i)/(hi_i - lo_i), clamped to [0, 1];
    components with hi_i = lo_i map to 0."""
    vals = _values(v)
    if vals.shape[0] != len(p):
        raise LengthMismatch(f"vector length {vals.shape[0]} vs scaling length {len(p)}")
    span = p.hi - p.lo
    out = np.zeros(vals.shape[0], dtype=np.float64)
    live = span > 0
    out[live] = np.clip((vals[live] - p.lo[live]) / span[live], 0.0, 1.0)
    pid = v.pipeline_id if isinstance(v, FeatureVector) else ""
    return FeatureVector(out, pipeline_id=pid)


def _values(v) -> np.ndarray:
    if isinstance(v, FeatureVector):
        return v.values
    return np.asarray(v, dtype=np.float64)


def _as_matrix(vectors) -> np.ndarray:
    rows = [_values(v) for v in vectors]
    if not rows:
        raise EmptySet("cannot fit scaling on an empty collection")
    length = rows[0].shape[0]
    for r in rows[1:]:
        if r.shape[0] != length:
            raise LengthMismatch(f"mixed feature lengths {length} and {r.shape[0]}")
    return np.stack(rows)
