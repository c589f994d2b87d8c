# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled raster kernels.

Mirrors tamperlab._kernels_py exactly: integer kernels share the same
exact arithmetic, float kernels evaluate the same float64 expressions in
the same order (built with -ffp-contract=off so no FMA creeps in).
"""

from libc.math cimport floor

import numpy as np

BACKEND = "ext"


def lbp_map(const unsigned char[:, :] gray):
    cdef Py_ssize_t h = gray.shape[0]
    cdef Py_ssize_t w = gray.shape[1]
    out_arr = np.empty((h, w), dtype=np.uint8)
    cdef unsigned char[:, :] out = out_arr
    cdef Py_ssize_t y, x, i, ny, nx
    cdef int center, code
    # clockwise from top-left; top-left is the most significant bit
    cdef int[8] dy = [-1, -1, -1, 0, 1, 1, 1, 0]
    cdef int[8] dx = [-1, 0, 1, 1, 1, 0, -1, -1]
    for y in range(h):
        for x in range(w):
            center = gray[y, x]
            code = 0
            for i in range(8):
                ny = y + dy[i]
                nx = x + dx[i]
                if ny < 0:
                    ny = 0
                elif ny >= h:
                    ny = h - 1
                if nx < 0:
                    nx = 0
                elif nx >= w:
                    nx = w - 1
                code <<= 1
                if gray[ny, nx] >= center:
                    code |= 1
            out[y, x] = <unsigned char> code
    return out_arr


def box_blur(const unsigned char[:, :, :] img, int k):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t c = img.shape[2]
    cdef int r = k // 2
    cdef long long k2 = <long long> k * k
    out_arr = np.empty((h, w, c), dtype=np.uint8)
    cdef unsigned char[:, :, :] out = out_arr
    # column sums of the clamped k-window, updated as the window slides down
    col_arr = np.zeros((w, c), dtype=np.int64)
    cdef long long[:, :] col = col_arr
    cdef Py_ssize_t y, x, ch, yy, xx
    cdef long long s
    cdef Py_ssize_t y_add, y_del

    for x in range(w):
        for ch in range(c):
            s = 0
            for yy in range(-r, r + 1):
                s += img[_clamp(yy, h), x, ch]
            col[x, ch] = s

    for y in range(h):
        if y > 0:
            y_add = _clamp(y + r, h)
            y_del = _clamp(y - 1 - r, h)
            for x in range(w):
                for ch in range(c):
                    col[x, ch] += img[y_add, x, ch] - img[y_del, x, ch]
        for x in range(w):
            for ch in range(c):
                s = 0
                for xx in range(x - r, x + r + 1):
                    s += col[_clamp(xx, w), ch]
                out[y, x, ch] = <unsigned char> ((2 * s + k2) // (2 * k2))
    return out_arr


cdef inline Py_ssize_t _clamp(Py_ssize_t i, Py_ssize_t n):
    if i < 0:
        return 0
    if i >= n:
        return n - 1
    return i


def resize_bilinear(const unsigned char[:, :, :] img, Py_ssize_t out_w, Py_ssize_t out_h):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t c = img.shape[2]
    out_arr = np.empty((out_h, out_w, c), dtype=np.uint8)
    cdef unsigned char[:, :, :] out = out_arr
    cdef double scale_x = (w - 1) / <double> (out_w - 1) if out_w > 1 else 0.0
    cdef double scale_y = (h - 1) / <double> (out_h - 1) if out_h > 1 else 0.0
    cdef Py_ssize_t y, x, ch, x0, y0, x1, y1
    cdef double sx, sy, fx, fy, top, bottom, value

    for y in range(out_h):
        sy = y * scale_y
        y0 = <Py_ssize_t> floor(sy)
        if y0 > h - 1:
            y0 = h - 1
        fy = sy - y0
        y1 = y0 + 1
        if y1 > h - 1:
            y1 = h - 1
        for x in range(out_w):
            sx = x * scale_x
            x0 = <Py_ssize_t> floor(sx)
            if x0 > w - 1:
                x0 = w - 1
            fx = sx - x0
            x1 = x0 + 1
            if x1 > w - 1:
                x1 = w - 1
            for ch in range(c):
                top = (1.0 - fx) * img[y0, x0, ch] + fx * img[y0, x1, ch]
                bottom = (1.0 - fx) * img[y1, x0, ch] + fx * img[y1, x1, ch]
                value = (1.0 - fy) * top + fy * bottom
                out[y, x, ch] = <unsigned char> floor(value + 0.5)
    return out_arr


def affine_warp(const unsigned char[:, :, :] img, matrix):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t c = img.shape[2]
    cdef double m00 = matrix[0]
    cdef double m01 = matrix[1]
    cdef double m02 = matrix[2]
    cdef double m10 = matrix[3]
    cdef double m11 = matrix[4]
    cdef double m12 = matrix[5]
    out_arr = np.empty((h, w, c), dtype=np.uint8)
    cdef unsigned char[:, :, :] out = out_arr
    cdef Py_ssize_t y, x, ch, x0, y0, x1, y1
    cdef double sx, sy, fx, fy, top, bottom, value

    # tolerance so grid-exact maps (0 or 360 degrees) survive the float
    # noise of cos/sin instead of zeroing border pixels
    cdef double eps = 1e-7

    for y in range(h):
        for x in range(w):
            sx = m00 * x + m01 * y + m02
            sy = m10 * x + m11 * y + m12
            if sx < -eps or sx > w - 1.0 + eps or sy < -eps or sy > h - 1.0 + eps:
                for ch in range(c):
                    out[y, x, ch] = 0
                continue
            if sx < 0.0:
                sx = 0.0
            elif sx > w - 1.0:
                sx = w - 1.0
            if sy < 0.0:
                sy = 0.0
            elif sy > h - 1.0:
                sy = h - 1.0
            x0 = <Py_ssize_t> floor(sx)
            y0 = <Py_ssize_t> floor(sy)
            fx = sx - x0
            fy = sy - y0
            x1 = x0 + 1
            if x1 > w - 1:
                x1 = w - 1
            y1 = y0 + 1
            if y1 > h - 1:
                y1 = h - 1
            for ch in range(c):
                top = (1.0 - fx) * img[y0, x0, ch] + fx * img[y0, x1, ch]
                bottom = (1.0 - fx) * img[y1, x0, ch] + fx * img[y1, x1, ch]
                value = (1.0 - fy) * top + fy * bottom
                out[y, x, ch] = <unsigned char> floor(value + 0.5)
    return out_arr
