import numpy as np
import pytest

from helpers import naive_dct2, naive_lbp_map
from tamperlab import features, imaging
from tamperlab.errors import EmptySet, LengthMismatch, TooSmall
from tamperlab.features import DctLbpConfig, FeatureVector
from tamperlab.imaging import RasterImage


def gray(arr):
    a = np.asarray(arr, dtype=np.uint8)
    return RasterImage(a[:, :, None] if a.ndim == 2 else a)


# --- lbp_code / lbp_map -----------------------------------------------------

def test_lbp_code_all_neighbors_ge_center():
    assert features.lbp_code(np.full((3, 3), 7, dtype=np.uint8)) == 255


def test_lbp_code_all_neighbors_below_center():
    w = np.zeros((3, 3), dtype=np.uint8)
    w[1, 1] = 9
    assert features.lbp_code(w) == 0


def test_lbp_code_mixed_window():
    # clockwise from top-left: 6,2,9,5,1,7,3,8 vs center 5 -> 10110101
    w = np.array([[6, 2, 9], [8, 5, 5], [3, 7, 1]], dtype=np.uint8)
    assert features.lbp_code(w) == 181


def test_lbp_map_matches_naive_oracle(rng):
    for _ in range(5):
        g = rng.integers(0, 256, (8, 8), dtype=np.uint8)
        out = features.lbp_map(gray(g))
        assert np.array_equal(out.data[:, :, 0], naive_lbp_map(g))


def test_lbp_map_constant_image_all_255():
    out = features.lbp_map(gray(np.full((6, 6), 40)))
    assert np.all(out.data == 255)


def test_lbp_map_requires_min_size():
    with pytest.raises(TooSmall):
        features.lbp_map(gray(np.zeros((2, 5))))


def test_lbp_map_rejects_multichannel(rng):
    img = RasterImage(rng.integers(0, 256, (8, 8, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        features.lbp_map(img)


# --- dct2 / idct2 -----------------------------------------------------------

def test_dct2_matches_naive_oracle(rng):
    for n in (8, 16):
        block = rng.random((n, n)) * 255
        assert np.allclose(features.dct2(block), naive_dct2(block), atol=1e-9)


def test_dct_roundtrip_and_parseval(rng):
    for n in (8, 16):
        block = rng.random((n, n)) * 255
        coeffs = features.dct2(block)
        assert np.allclose(features.idct2(coeffs), block, atol=1e-9)
        assert abs(np.sum(block * block) - np.sum(coeffs * coeffs)) < 1e-6


def test_dct2_constant_block_has_only_dc():
    coeffs = features.dct2(np.full((8, 8), 16.0))
    assert coeffs[0, 0] == pytest.approx(16.0 * 8, abs=1e-9)
    rest = coeffs.copy()
    rest[0, 0] = 0.0
    assert np.allclose(rest, 0.0, atol=1e-9)


def test_idct2_dc_only_gives_constant_block():
    coeffs = np.zeros((8, 8))
    coeffs[0, 0] = 8.0
    assert np.allclose(features.idct2(coeffs), 1.0, atol=1e-12)


def test_dct2_rejects_non_square():
    with pytest.raises(ValueError):
        features.dct2(np.zeros((4, 8)))


# --- channel selection ------------------------------------------------------

def test_chroma_red_of_gray_is_neutral():
    img = RasterImage(np.full((4, 4, 3), 77, dtype=np.uint8))
    assert np.all(features.chroma_red(img).data == 128)


def test_chroma_red_golden_pure_red():
    img = np.zeros((1, 1, 3), dtype=np.uint8)
    img[0, 0, 0] = 255
    # Cr = 128 + 0.5*255 rounded
    assert features.chroma_red(RasterImage(img)).data[0, 0, 0] == 255


def test_select_channel_dispatch(rng):
    img = RasterImage(rng.integers(0, 256, (8, 8, 3), dtype=np.uint8))
    lum = features.select_channel(img, "luminance")
    assert np.array_equal(lum.data, imaging.to_grayscale(img).data)
    cr = features.select_channel(img, "chroma-red")
    assert np.array_equal(cr.data, features.chroma_red(img).data)
    with pytest.raises(ValueError):
        features.select_channel(img, "hue")


# --- dct_lbp_features -------------------------------------------------------

def brute_force_dct_lbp(img, canvas=128, block=16):
    g = imaging.to_grayscale(imaging.resize_bilinear(img, canvas, canvas))
    codes = naive_lbp_map(g.data[:, :, 0]).astype(np.float64)
    tiles = []
    for y in range(0, canvas, block):
        for x in range(0, canvas, block):
            tiles.append(naive_dct2(codes[y:y + block, x:x + block]))
    stack = np.stack(tiles)
    return np.std(stack, axis=0, ddof=0).reshape(-1)


def test_dct_lbp_features_match_brute_force(rng):
    img = RasterImage(rng.integers(0, 256, (128, 128, 3), dtype=np.uint8))
    vec = features.dct_lbp_features(img)
    assert vec.values.shape == (256,)
    assert vec.pipeline_id == "dctlbp"
    assert np.allclose(vec.values, brute_force_dct_lbp(img), atol=1e-9)


def test_dct_lbp_resizes_odd_input(rng):
    img = RasterImage(rng.integers(0, 256, (97, 211, 3), dtype=np.uint8))
    vec = features.dct_lbp_features(img)
    assert vec.values.shape == (256,)
    assert np.all(np.isfinite(vec.values))


def test_dct_lbp_constant_image_is_zero_vector():
    img = RasterImage(np.full((128, 128, 3), 90, dtype=np.uint8))
    assert np.all(features.dct_lbp_features(img).values == 0.0)


def test_dct_lbp_brightness_shift_invariance(rng):
    base = rng.integers(40, 200, (128, 128), dtype=np.uint8)
    a = features.dct_lbp_features(gray(base))
    b = features.dct_lbp_features(gray(base + 10))
    assert np.allclose(a.values, b.values, atol=1e-9)


def test_dct_lbp_custom_block_changes_dim(rng):
    img = RasterImage(rng.integers(0, 256, (128, 128, 3), dtype=np.uint8))
    vec = features.dct_lbp_features(img, DctLbpConfig(block=8))
    assert vec.values.shape == (64,)


def test_dct_lbp_config_validated():
    with pytest.raises(ValueError):
        DctLbpConfig(canvas=100, block=16)  # not divisible


# --- scaling ----------------------------------------------------------------

def vec(vals):
    return FeatureVector(np.asarray(vals, dtype=np.float64))


def test_fit_scaling_golden_ranges():
    p = features.fit_scaling([vec([0.0, 5.0]), vec([10.0, 20.0])])
    assert np.array_equal(p.lo, [0.0, 5.0])
    assert np.array_equal(p.hi, [10.0, 20.0])


def test_apply_scaling_midpoint():
    p = features.fit_scaling([vec([5.0]), vec([10.0])])
    assert features.apply_scaling(vec([7.5]), p).values[0] == pytest.approx(0.5)


def test_apply_scaling_clamps_outside_range():
    p = features.fit_scaling([vec([5.0]), vec([10.0])])
    assert features.apply_scaling(vec([0.0]), p).values[0] == 0.0
    assert features.apply_scaling(vec([99.0]), p).values[0] == 1.0


def test_constant_feature_maps_to_zero():
    p = features.fit_scaling([vec([3.0]), vec([3.0])])
    assert features.apply_scaling(vec([3.0]), p).values[0] == 0.0


def test_fit_scaling_permutation_invariant(rng):
    vs = [vec(rng.random(6)) for _ in range(10)]
    a = features.fit_scaling(vs)
    order = rng.permutation(len(vs))
    b = features.fit_scaling([vs[i] for i in order])
    assert np.array_equal(a.lo, b.lo) and np.array_equal(a.hi, b.hi)


def test_fit_scaling_rejects_empty_and_mismatch():
    with pytest.raises(EmptySet):
        features.fit_scaling([])
    with pytest.raises(LengthMismatch):
        features.fit_scaling([vec([1.0]), vec([1.0, 2.0])])


def test_apply_scaling_length_checked():
    p = features.fit_scaling([vec([0.0, 1.0]), vec([1.0, 2.0])])
    with pytest.raises(LengthMismatch):
        features.apply_scaling(vec([0.5]), p)
