"""NumPy implementations of the per-pixel raster kernels.

These are the fallback for the compiled core in ``_kernels.pyx``. Both
backends must produce bit-identical output: integer kernels use exact
integer arithmetic, float kernels evaluate the same float64 expression in
the same operation order (the extension is compiled with FMA contraction
disabled for this reason).

All kernels take and return plain uint8 arrays: grayscale maps are
``(h, w)``, images are ``(h, w, c)``. Validation lives in the callers.
"""

import numpy as np

BACKEND = "python"

# Neighbor bit weights, clockwise from top-left (top-left = MSB):
# TL, T, TR, R, BR, B, BL, L
_LBP_OFFSETS = (
    (-1, -1, 128),
    (-1, 0, 64),
    (-1, 1, 32),
    (0, 1, 16),
    (1, 1, 8),
    (1, 0, 4),
    (1, -1, 2),
    (0, -1, 1),
)


def lbp_map(gray):
    """Per-pixel 8-neighbor binary pattern, clamp-to-edge borders."""
    h, w = gray.shape
    padded = np.pad(gray, 1, mode="edge")
    code = np.zeros((h, w), dtype=np.uint8)
    for dy, dx, weight in _LBP_OFFSETS:
        neighbor = padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
        code |= (neighbor >= gray).astype(np.uint8) * np.uint8(weight)
    return code


def box_blur(img, k):
    """k x k mean with clamp-to-edge borders, round-half-up, exact ints."""
    h, w, c = img.shape
    r = k // 2
    padded = np.pad(img, ((r, r), (r, r), (0, 0)), mode="edge").astype(np.int64)
    integral = np.zeros((h + 2 * r + 1, w + 2 * r + 1, c), dtype=np.int64)
    integral[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    sums = (
        integral[k:, k:]
        - integral[:-k, k:]
        - integral[k:, :-k]
        + integral[:-k, :-k]
    )
    k2 = k * k
    # floor(s / k2 + 1/2) without leaving integer arithmetic
    return ((2 * sums + k2) // (2 * k2)).astype(np.uint8)


def resize_bilinear(img, out_w, out_h):
    """Corner-aligned bilinear resize, round-half-up to uint8."""
    h, w, c = img.shape
    xs = np.arange(out_w, dtype=np.float64) * ((w - 1) / (out_w - 1)) if out_w > 1 \
        else np.zeros(1, dtype=np.float64)
    ys = np.arange(out_h, dtype=np.float64) * ((h - 1) / (out_h - 1)) if out_h > 1 \
        else np.zeros(1, dtype=np.float64)

    x0 = np.minimum(np.floor(xs).astype(np.int64), w - 1)
    y0 = np.minimum(np.floor(ys).astype(np.int64), h - 1)
    fx = xs - x0
    fy = ys - y0
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)

    data = img.astype(np.float64)
    a = data[y0[:, None], x0[None, :]]
    b = data[y0[:, None], x1[None, :]]
    cc = data[y1[:, None], x0[None, :]]
    d = data[y1[:, None], x1[None, :]]

    wx1 = (1.0 - fx)[None, :, None]
    wx = fx[None, :, None]
    wy1 = (1.0 - fy)[:, None, None]
    wy = fy[:, None, None]
    top = wx1 * a + wx * b
    bottom = wx1 * cc + wx * d
    value = wy1 * top + wy * bottom
    return np.floor(value + 0.5).astype(np.uint8)


def affine_warp(img, matrix):
    """Inverse-mapped bilinear warp; out-of-bounds sources fill with 0.

    ``matrix`` is the flattened 2x3 destination-to-source map
    (m00, m01, m02, m10, m11, m12): src_x = m00*x + m01*y + m02.
    """
    h, w, c = img.shape
    m00, m01, m02, m10, m11, m12 = (float(v) for v in matrix)
    yy, xx = np.meshgrid(
        np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64),
        indexing="ij",
    )
    sx = m00 * xx + m01 * yy + m02
    sy = m10 * xx + m11 * yy + m12
    # tolerance so grid-exact maps (0 or 360 degrees) survive the float
    # noise of cos/sin instead of zeroing border pixels
    eps = 1e-7
    valid = (sx >= -eps) & (sx <= w - 1.0 + eps) & (sy >= -eps) & (sy <= h - 1.0 + eps)
    sx = np.clip(sx, 0.0, w - 1.0)
    sy = np.clip(sy, 0.0, h - 1.0)

    x0 = np.clip(np.floor(sx).astype(np.int64), 0, w - 1)
    y0 = np.clip(np.floor(sy).astype(np.int64), 0, h - 1)
    fx = (sx - x0)[..., None]
    fy = (sy - y0)[..., None]
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)

    data = img.astype(np.float64)
    a = data[y0, x0]
    b = data[y0, x1]
    cc = data[y1, x0]
    d = data[y1, x1]
    top = (1.0 - fx) * a + fx * b
    bottom = (1.0 - fx) * cc + fx * d
    value = (1.0 - fy) * top + fy * bottom
    out = np.floor(value + 0.5).astype(np.uint8)
    out[~valid] = 0
    return out
