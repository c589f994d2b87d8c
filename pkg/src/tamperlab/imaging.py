"""8-bit raster type, codec boundary, and the basic image transforms.

Conventions fixed here and relied on everywhere else:

* samples are uint8, rasters are (height, width, channels) with channels
  1 or 3, row-major and channel-interleaved;
* real-valued results are rounded half-up when converted back to uint8;
* bilinear interpolation with corner-aligned sampling for resize;
* blur borders clamp to the edge, affine warps fill out-of-bounds with 0.
"""

import io
import math

import numpy as np
from PIL import Image, UnidentifiedImageError

from tamperlab.backend import kernels
from tamperlab.errors import (
    CorruptStream,
    EncodeFailure,
    InvalidKernel,
    InvalidQuality,
    ShapeMismatch,
    UnsupportedFormat,
)

READ_FORMATS = {"JPEG", "PNG", "TIFF", "BMP"}

# Pillow modes we can map onto a 1- or 3-channel 8-bit raster.
_GRAY_MODES = {"1", "L", "LA"}
_COLOR_MODES = {"P", "RGB", "RGBA", "CMYK", "YCbCr"}


class RasterImage:
    """Immutable 8-bit raster.

    ``data`` is a read-only C-contiguous uint8 array of shape
    (height, width, channels), channels 1 or 3.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray, *, copy: bool = True):
        arr = np.asarray(data)
        if arr.dtype != np.uint8:
            raise ValueError(f"raster samples must be uint8, got {arr.dtype}")
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ValueError(f"raster shape must be (h, w) or (h, w, 1|3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("raster must have at least one pixel")
        arr = np.ascontiguousarray(arr)
        if copy and arr is data:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("RasterImage is immutable")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def plane(self) -> np.ndarray:
        """The (h, w) view of a 1-channel raster."""
        if self.channels != 1:
            raise ValueError("plane() requires a 1-channel raster")
        return self.data[:, :, 0]

    def __repr__(self):
        return f"RasterImage({self.width}x{self.height}x{self.channels})"


def validate_quality(quality: int) -> int:
    """Check a JPEG quality setting; 100 means least quantization."""
    if not isinstance(quality, (int, np.integer)) or isinstance(quality, bool):
        raise InvalidQuality(f"quality must be an integer, got {quality!r}")
    if not 1 <= quality <= 100:
        raise InvalidQuality(f"quality must be in [1, 100], got {quality}")
    return int(quality)


def decode_image(data: bytes) -> RasterImage:
    """Decode a JPEG/PNG/TIFF/BMP stream into an 8-bit raster.

    Color sources yield 3 channels, grayscale sources 1 channel.
    """
    try:
        im = Image.open(io.BytesIO(data))
    except UnidentifiedImageError as exc:
        raise UnsupportedFormat("not a recognizable image stream") from exc
    except OSError as exc:
        # A recognized format can still fail header parsing (e.g. a stream
        # truncated mid-marker); the bytes are already in hand, so this is
        # a decode failure, not an I/O failure.
        raise CorruptStream(f"cannot decode image: {exc}") from exc
    if im.format not in READ_FORMATS:
        raise UnsupportedFormat(f"unsupported format {im.format!r}")
    try:
        im.load()
    except OSError as exc:
        raise CorruptStream(f"cannot decode image: {exc}") from exc
    if im.mode in _GRAY_MODES:
        if im.mode != "L":
            im = im.convert("L")
    elif im.mode in _COLOR_MODES:
        if im.mode != "RGB":
            im = im.convert("RGB")
    else:
        raise UnsupportedFormat(f"unsupported pixel mode {im.mode!r}")
    return RasterImage(np.asarray(im), copy=False)


def read_image(path) -> RasterImage:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def encode_jpeg(img: RasterImage, quality: int = 90) -> bytes:
    """Encode as baseline JPEG at the given quality."""
    quality = validate_quality(quality)
    mode = "L" if img.channels == 1 else "RGB"
    arr = img.plane() if img.channels == 1 else img.data
    buf = io.BytesIO()
    try:
        Image.fromarray(arr, mode).save(buf, "JPEG", quality=quality)
    except (OSError, ValueError, MemoryError) as exc:
        raise EncodeFailure(f"JPEG encode failed: {exc}") from exc
    return buf.getvalue()


def write_png(img: RasterImage, path) -> None:
    mode = "L" if img.channels == 1 else "RGB"
    arr = img.plane() if img.channels == 1 else img.data
    Image.fromarray(arr, mode).save(path, "PNG")


def to_grayscale(img: RasterImage) -> RasterImage:
    """Rec.601 luma; 1-channel input is returned unchanged."""
    if img.channels == 1:
        return img
    rgb = img.data.astype(np.float64)
    y = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return RasterImage(np.floor(y + 0.5).astype(np.uint8), copy=False)


def box_blur(img: RasterImage, k: int = 3) -> RasterImage:
    """Mean over a k x k window, clamp-to-edge; k odd and >= 3."""
    if not isinstance(k, (int, np.integer)) or k < 3 or k % 2 == 0:
        raise InvalidKernel(f"window size must be odd and >= 3, got {k}")
    return RasterImage(kernels.box_blur(img.data, int(k)), copy=False)


def affine_warp(img: RasterImage, rotation: float = 0.0, shear_x: float = 0.0) -> RasterImage:
    """Rotate (degrees) and shear about the image center.

    Inverse-mapped bilinear resampling; source coordinates falling outside
    the image fill with 0. Output dimensions equal input dimensions.
    """
    theta = math.radians(rotation)
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    # forward map: p' = C + R(theta) @ Shear(shear_x) @ (p - C)
    # inverse map: p  = C + Shear(-shear_x) @ R(-theta) @ (p' - C)
    i00 = cos_t + shear_x * sin_t
    i01 = sin_t - shear_x * cos_t
    i10 = -sin_t
    i11 = cos_t
    cx = (img.width - 1) / 2.0
    cy = (img.height - 1) / 2.0
    m02 = cx - (i00 * cx + i01 * cy)
    m12 = cy - (i10 * cx + i11 * cy)
    matrix = (i00, i01, m02, i10, i11, m12)
    return RasterImage(kernels.affine_warp(img.data, matrix), copy=False)


def resize_bilinear(img: RasterImage, width: int, height: int) -> RasterImage:
    """Corner-aligned bilinear resize; same-size resize is the identity."""
    if width < 1 or height < 1:
        raise ValueError(f"target size must be positive, got {width}x{height}")
    if width == img.width and height == img.height:
        return img
    return RasterImage(kernels.resize_bilinear(img.data, int(width), int(height)), copy=False)


def abs_diff(a: RasterImage, b: RasterImage) -> RasterImage:
    """Per-sample absolute difference; shapes must match."""
    if a.data.shape != b.data.shape:
        raise ShapeMismatch(f"shape {a.data.shape} vs {b.data.shape}")
    diff = np.abs(a.data.astype(np.int16) - b.data.astype(np.int16))
    return RasterImage(diff.astype(np.uint8), copy=False)


def flip(img: RasterImage, axis: str) -> RasterImage:
    """Mirror along "horizontal" (left-right) or "vertical" (top-bottom)."""
    if axis == "horizontal":
        return RasterImage(np.ascontiguousarray(img.data[:, ::-1]), copy=False)
    if axis == "vertical":
        return RasterImage(np.ascontiguousarray(img.data[::-1]), copy=False)
    raise ValueError(f"axis must be 'horizontal' or 'vertical', got {axis!r}")
