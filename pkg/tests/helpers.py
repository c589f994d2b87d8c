"""Shared test utilities: deliberately naive reference implementations
(used as independent oracles) and small fixture builders.

The oracles here trade speed for obviousness — nested loops, exact
rational arithmetic — so that the production code can be checked against
something with no shared machinery.
"""

import math
from fractions import Fraction

import numpy as np

from tamperlab.imaging import RasterImage


def random_image(rng, width, height, channels=1) -> RasterImage:
    data = rng.integers(0, 256, (height, width, channels), dtype=np.uint8)
    return RasterImage(data)


def gray_from_array(arr) -> RasterImage:
    arr = np.asarray(arr, dtype=np.uint8)
    return RasterImage(arr[:, :, None])


def naive_lbp_map(gray) -> np.ndarray:
    """Per-pixel 8-bit codes via explicit loops and clamped indexing.

    Accepts a 2-D array of intensities.  Neighbors are visited clockwise
    from the top-left, most significant bit first; a neighbor >= center
    sets its bit.
    """
    plane = np.asarray(gray, dtype=np.int32)
    h, w = plane.shape
    offsets = [(-1, -1), (-1, 0), (-1, 1), (0, 1),
               (1, 1), (1, 0), (1, -1), (0, -1)]
    out = np.zeros((h, w), dtype=np.uint8)
    for y in range(h):
        for x in range(w):
            code = 0
            for dy, dx in offsets:
                ny = min(max(y + dy, 0), h - 1)
                nx = min(max(x + dx, 0), w - 1)
                code = (code << 1) | (1 if plane[ny, nx] >= plane[y, x] else 0)
            out[y, x] = code
    return out


def naive_dct2(block) -> np.ndarray:
    """Direct O(N^4) orthonormal type-II 2D DCT."""
    x = np.asarray(block, dtype=np.float64)
    n = x.shape[0]
    out = np.zeros((n, n))
    for u in range(n):
        cu = math.sqrt(1.0 / n) if u == 0 else math.sqrt(2.0 / n)
        for v in range(n):
            cv = math.sqrt(1.0 / n) if v == 0 else math.sqrt(2.0 / n)
            acc = 0.0
            for m in range(n):
                for k in range(n):
                    acc += (x[m, k]
                            * math.cos(math.pi * (2 * m + 1) * u / (2 * n))
                            * math.cos(math.pi * (2 * k + 1) * v / (2 * n)))
            out[u, v] = cu * cv * acc
    return out


def naive_otsu(gray) -> int:
    """Exhaustive 256-threshold scan with exact rational scores.

    Accepts a 2-D array of intensities.  Score(t) =
    (s0*n1 - s1*n0)^2 / (n0*n1) over the split at <= t vs > t; thresholds
    leaving either side empty are skipped; smallest t wins ties.  A
    single-valued image returns that value.
    """
    values = np.asarray(gray, dtype=np.uint8).ravel()
    hist = np.bincount(values, minlength=256)
    total = int(values.size)
    if int((hist > 0).sum()) == 1:
        return int(values[0])
    best_t, best_score = 0, Fraction(-1)
    n0 = s0 = 0
    total_sum = int(np.dot(hist, np.arange(256)))
    for t in range(256):
        n0 += int(hist[t])
        s0 += int(hist[t]) * t
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        s1 = total_sum - s0
        score = Fraction((s0 * n1 - s1 * n0) ** 2, n0 * n1)
        if score > best_score:
            best_t, best_score = t, score
    return best_t


def naive_box_blur(img: RasterImage, k: int) -> np.ndarray:
    """Loop-based k x k mean with clamp-to-edge and round-half-up."""
    data = img.data.astype(np.float64)
    h, w, c = data.shape
    r = k // 2
    out = np.zeros_like(data)
    for y in range(h):
        for x in range(w):
            acc = np.zeros(c)
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    ny = min(max(y + dy, 0), h - 1)
                    nx = min(max(x + dx, 0), w - 1)
                    acc += data[ny, nx]
            out[y, x] = np.floor(acc / (k * k) + 0.5)
    return out.astype(np.uint8)


def mask_from_rect(x0, y0, side, canvas=128):
    bits = np.zeros((canvas, canvas), dtype=np.uint8)
    bits[y0:y0 + side, x0:x0 + side] = 1
    return bits
