"""Error Level Analysis: recompress as JPEG, difference against the
original, amplify.

Regions saved with a different compression history than their surroundings
show a different error level after one more recompression, which is the
signal both the heatmap and the feature vector expose.
"""

from dataclasses import dataclass

import numpy as np

from tamperlab import imaging
from tamperlab.features import FeatureVector
from tamperlab.imaging import RasterImage


@dataclass(frozen=True)
class ElaConfig:
    """Recompression quality and amplification for ELA.

    ``gain`` of None selects auto-max amplification (scale so the largest
    sample becomes 255 — best for viewing); a positive value selects fixed
    gain with saturation, which keeps magnitudes comparable across images
    and is the default for feature vectors.
    """

    quality: int = 90
    gain: float = None
    feature_grid: int = 32

    def __post_init__(self):
        imaging.validate_quality(self.quality)
        if self.gain is not None and not 0.0 < self.gain <= 64.0:
            raise ValueError(f"fixed gain must lie in (0, 64], got {self.gain}")
        if self.feature_grid < 1:
            raise ValueError(f"feature grid must be >= 1, got {self.feature_grid}")


FEATURE_GAIN = 10.0  # fixed amplification used when building feature vectors


def compute_ela(img: RasterImage, cfg: ElaConfig = None) -> RasterImage:
    """ELA heatmap with the same dimensions/channels as the input.

    amplify(|img - decode(encode_jpeg(img, quality))|). Auto-max mode
    returns all zeros when the recompression is bit-exact.
    """
    if cfg is None:
        cfg = ElaConfig()
    recompressed = imaging.decode_image(imaging.encode_jpeg(img, cfg.quality))
    diff = imaging.abs_diff(img, recompressed)
    return _amplify(diff, cfg.gain)


def ela_feature_vector(img: RasterImage, cfg: ElaConfig = None) -> FeatureVector:
    """Flattened ELA feature vector of length feature_grid².

    Heatmap (fixed gain by default) -> grayscale -> resize to
    feature_grid x feature_grid -> row-major flatten -> divide by 255.
    """
    if cfg is None:
        cfg = ElaConfig(gain=FEATURE_GAIN)
    heat = compute_ela(img, cfg)
    gray = imaging.to_grayscale(heat)
    small = imaging.resize_bilinear(gray, cfg.feature_grid, cfg.feature_grid)
    vec = small.plane().astype(np.float64).reshape(-1) / 255.0
    return FeatureVector(vec, pipeline_id="ela")


def _amplify(diff: RasterImage, gain) -> RasterImage:
    raw = diff.data.astype(np.float64)
    if gain is None:
        peak = raw.max()
        if peak == 0.0:
            return diff
        scaled = raw * 255.0 / peak
    else:
        scaled = np.minimum(raw * float(gain), 255.0)
    return RasterImage(np.floor(scaled + 0.5).astype(np.uint8), copy=False)
