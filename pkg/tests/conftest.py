import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

import tamperlab as tl
from tamperlab import dataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A 40-image synthetic corpus (20 authentic / 20 tampered) shared by
    dataset/pipeline/CLI tests. Session-scoped: built once."""
    base = tmp_path_factory.mktemp("smallcorpus")
    srcdir = base / "sources"
    srcdir.mkdir()
    for i in range(3):
        tl.write_png(tl.synthetic_photo(256, 256, seed=500 + i, detail=0.02),
                     srcdir / f"src_{i}.png")
    paths = sorted(str(p) for p in srcdir.iterdir())
    corpus = dataset.generate_corpus(
        paths, 20, base / "corpus",
        dataset.ForgeryParams(patch_min=16, patch_max=32, seed=9), crop=128)
    return corpus


@pytest.fixture(scope="session")
def source_dir(tmp_path_factory):
    """Directory of three source PNGs for synth-oriented tests."""
    srcdir = tmp_path_factory.mktemp("synthsources")
    for i in range(3):
        tl.write_png(tl.synthetic_photo(256, 256, seed=700 + i, detail=0.02),
                     srcdir / f"src_{i}.png")
    return srcdir
