"""Compare the compiled kernel core against the pure-NumPy fallback.

Runs each low-level kernel (LBP map, box blur, bilinear resize, affine
warp) on both backends over identical inputs, times them, and verifies
the outputs are bit-identical. Usage:

    python3 benchmarks/bench_kernels.py [--side 512] [--repeats 5]
"""

import argparse
import math
import time

import numpy as np

from tamperlab import _kernels_py

try:
    from tamperlab import _kernels
except ImportError:
    _kernels = None


def rotation_matrix(side: int, degrees: float, shear_x: float = 0.0):
    """Flattened 2x3 destination-to-source map about the image center."""
    theta = math.radians(degrees)
    cos, sin = math.cos(theta), math.sin(theta)
    cx = cy = (side - 1) / 2.0
    i00 = cos + shear_x * sin
    i01 = sin - shear_x * cos
    i10, i11 = -sin, cos
    tx = cx - (i00 * cx + i01 * cy)
    ty = cy - (i10 * cx + i11 * cy)
    return np.array([i00, i01, tx, i10, i11, ty], dtype=np.float64)


def make_cases(side: int):
    rng = np.random.default_rng(99)
    gray = rng.integers(0, 256, (side, side), dtype=np.uint8)
    rgb = rng.integers(0, 256, (side, side, 3), dtype=np.uint8)
    matrix = rotation_matrix(side, 15.0, 0.2)
    return [
        ("lbp_map", lambda k: k.lbp_map(gray)),
        ("box_blur k=5", lambda k: k.box_blur(rgb, 5)),
        ("resize 2x", lambda k: k.resize_bilinear(rgb, side * 2, side * 2)),
        ("affine_warp", lambda k: k.affine_warp(rgb, matrix)),
    ]


def best_of(fn, backend, repeats: int) -> tuple:
    out = None
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(backend)
        best = min(best, time.perf_counter() - start)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--side", type=int, default=512,
                        help="square input side length (default 512)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repeats per kernel; best is reported")
    args = parser.parse_args()

    if _kernels is None:
        print("compiled extension not importable; timing the fallback only")

    print(f"input side {args.side}, best of {args.repeats}\n")
    header = f"{'kernel':<14} {'python':>10} {'ext':>10} {'speedup':>9}  identical"
    print(header)
    print("-" * len(header))
    for name, fn in make_cases(args.side):
        t_py, out_py = best_of(fn, _kernels_py, args.repeats)
        if _kernels is None:
            print(f"{name:<14} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>9}  -")
            continue
        t_ext, out_ext = best_of(fn, _kernels, args.repeats)
        same = np.array_equal(np.asarray(out_py), np.asarray(out_ext))
        print(f"{name:<14} {t_py * 1e3:>8.2f}ms {t_ext * 1e3:>8.2f}ms "
              f"{t_py / t_ext:>8.1f}x  {'yes' if same else 'NO'}")
        if not same:
            raise SystemExit(f"backend outputs differ for {name}")


if __name__ == "__main__":
    main()
