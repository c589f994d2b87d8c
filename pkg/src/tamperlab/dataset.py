"""Corpus handling: directory scanning (Au/ + Tp/ + masks/ layout),
deterministic train/validation splitting, augmentation and ablation
variants, and seeded synthetic forgery generation with exact ground-truth
masks.

Records carry a provenance chain such as ``real+augmented(rotate(-15))``
or ``synth-splice+ablated(blur(3))``. Augment/ablate never materialize
image files; the loaders apply the recorded transforms on the fly, which
keeps variant corpora byte-free and perfectly reproducible.
"""

import csv
import io
import math
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from tamperlab import imaging, localize
from tamperlab.errors import (
    DegenerateSplit,
    EmptyCorpus,
    ImageTooSmall,
    IoFailure,
    MissingRoot,
)
from tamperlab.imaging import RasterImage
from tamperlab.localize import MASK_SIDE, TamperMask

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png", ".tif", ".tiff", ".bmp"}

PROVENANCE_REAL = "real"
PROVENANCE_COPY_MOVE = "synth-copy-move"
PROVENANCE_SPLICE = "synth-splice"

AUGMENT_OPS = ("flip_h", "flip_v", "rotate", "shear")
ROTATE_DEGREES = 15
SHEAR_RATIO = 0.2

FINAL_JPEG_QUALITY = 90
HISTORY_QUALITY_RANGE = (82, 88)


@dataclass(frozen=True)
class SampleRecord:
    """One corpus entry; image_path/mask_path are root-relative POSIX
    paths so manifests compare byte-identical across machines."""

    image_path: str
    label: int
    mask_path: str = None
    provenance: str = PROVENANCE_REAL


@dataclass(frozen=True)
class CorpusIndex:
    """Ordered set of records under one root directory.

    Records sort by (image_path, provenance); augmented variants share a
    path with their original, so provenance is the tie-break.
    """

    records: tuple
    root: str
    unresolved_masks: tuple = ()

    def __len__(self):
        return len(self.records)

    def labels(self):
        return [r.label for r in self.records]


@dataclass(frozen=True)
class ForgeryParams:
    """Patch-size range and seam handling for synthetic forgeries.

    ``seam_blur`` of an odd k >= 3 box-blurs a 2-pixel band around the
    pasted rectangle's boundary; None leaves hard seams.
    """

    patch_min: int = 16
    patch_max: int = 48
    seam_blur: int = None
    seed: int = 0

    def __post_init__(self):
        if not 4 <= self.patch_min <= self.patch_max:
            raise ValueError(
                f"need 4 <= patch_min <= patch_max, got {self.patch_min}, {self.patch_max}"
            )
        if self.seam_blur is not None and (self.seam_blur < 3 or self.seam_blur % 2 == 0):
            raise ValueError(f"seam blur k must be odd and >= 3, got {self.seam_blur}")


def _make_index(records, root, unresolved=()) -> CorpusIndex:
    ordered = tuple(sorted(records, key=lambda r: (r.image_path, r.provenance)))
    return CorpusIndex(records=ordered, root=str(root), unresolved_masks=tuple(unresolved))


def scan_corpus(root) -> CorpusIndex:
    """Index a CASIA-style layout: Au/ = authentic, Tp/ = tampered with
    masks resolved as masks/<name>_gt.png. Tampered files without a mask
    stay in the index (mask_path None) and are listed in
    ``unresolved_masks``."""
    rootp = Path(root)
    if not rootp.is_dir():
        raise MissingRoot(f"corpus root {root} does not exist")
    records = []
    unresolved = []
    for sub, label in (("Au", 0), ("Tp", 1)):
        subdir = rootp / sub
        if not subdir.is_dir():
            continue
        for path in sorted(subdir.iterdir()):
            if not path.is_file() or path.suffix.lower() not in IMAGE_EXTENSIONS:
                continue
            rel = f"{sub}/{path.name}"
            mask_rel = None
            if label == 1:
                candidate = rootp / "masks" / f"{path.stem}_gt.png"
                if candidate.is_file():
                    mask_rel = f"masks/{candidate.name}"
                else:
                    unresolved.append(rel)
            records.append(SampleRecord(rel, label, mask_rel, PROVENANCE_REAL))
    if not records:
        raise EmptyCorpus(f"no images under {root}/Au or {root}/Tp")
    return _make_index(records, rootp, unresolved)


def empty_mask(width: int = MASK_SIDE, height: int = MASK_SIDE) -> TamperMask:
    """The all-zero mask every authentic sample implies."""
    if width < 1 or height < 1:
        raise ValueError(f"mask dims must be >= 1, got {width}x{height}")
    return TamperMask(np.zeros((height, width), dtype=np.uint8))


# ---------------------------------------------------------------------------
# synthetic forgeries


def _check_patch_fit(img: RasterImage, p: ForgeryParams, what: str) -> None:
    if min(img.width, img.height) < 2 * p.patch_max:
        raise ImageTooSmall(
            f"{what} is {img.width}x{img.height}; patch_max {p.patch_max} "
            f"needs at least {2 * p.patch_max} pixels per side"
        )


def _rect_mask(h: int, w: int, x: int, y: int, side: int) -> TamperMask:
    plane = np.zeros((h, w), dtype=np.uint8)
    plane[y:y + side, x:x + side] = 1
    if (h, w) == (MASK_SIDE, MASK_SIDE):
        return TamperMask(plane)
    scaled = imaging.resize_bilinear(
        RasterImage(plane * np.uint8(255)), MASK_SIDE, MASK_SIDE
    )
    return TamperMask((scaled.plane() > 127).astype(np.uint8))


def _blur_seam(arr: np.ndarray, x: int, y: int, side: int, k: int) -> np.ndarray:
    blurred = imaging.box_blur(RasterImage(arr), k).data
    h, w = arr.shape[:2]
    band = np.zeros((h, w), dtype=bool)
    band[max(0, y - 2):min(h, y + side + 2), max(0, x - 2):min(w, x + side + 2)] = True
    band[y + 2:y + side - 2, x + 2:x + side - 2] = False
    out = arr.copy()
    out[band] = blurred[band]
    return out


def synth_copy_move(img: RasterImage, p: ForgeryParams):
    """Copy a seeded square patch to a non-overlapping spot in the same
    image. Returns (forged image, 128x128 ground-truth mask).

    Draw order from default_rng(seed): patch side, then (source x,
    source y, destination x, destination y) tuples rejected until the
    rectangles are disjoint (a central source can leave no room for a
    disjoint destination, so the source is part of the rejection loop).
    If the patch is so large that disjoint draws are vanishingly rare,
    the rectangles are pinned to opposite corners, which the size
    precondition guarantees do not overlap.
    """
    _check_patch_fit(img, p, "image")
    rng = np.random.default_rng(p.seed)
    w, h = img.width, img.height
    side = int(rng.integers(p.patch_min, p.patch_max + 1))
    for _ in range(1000):
        sx = int(rng.integers(0, w - side + 1))
        sy = int(rng.integers(0, h - side + 1))
        dx = int(rng.integers(0, w - side + 1))
        dy = int(rng.integers(0, h - side + 1))
        if abs(dx - sx) >= side or abs(dy - sy) >= side:
            break
    else:
        sx, sy = 0, 0
        dx, dy = w - side, h - side
    out = img.data.copy()
    out[dy:dy + side, dx:dx + side] = img.data[sy:sy + side, sx:sx + side]
    if p.seam_blur is not None:
        out = _blur_seam(out, dx, dy, side, p.seam_blur)
    return RasterImage(out, copy=False), _rect_mask(h, w, dx, dy, side)


def synth_splice(base: RasterImage, donor: RasterImage, p: ForgeryParams):
    """Paste a seeded patch cropped from ``donor`` into ``base``.

    Draw order: patch side, donor x, donor y, base x, base y. Returns
    (forged image, 128x128 mask). Donor is converted to the base's
    channel count when they differ.
    """
    _check_patch_fit(base, p, "base image")
    _check_patch_fit(donor, p, "donor image")
    rng = np.random.default_rng(p.seed)
    side = int(rng.integers(p.patch_min, p.patch_max + 1))
    ux = int(rng.integers(0, donor.width - side + 1))
    uy = int(rng.integers(0, donor.height - side + 1))
    dx = int(rng.integers(0, base.width - side + 1))
    dy = int(rng.integers(0, base.height - side + 1))
    patch = donor.data[uy:uy + side, ux:ux + side]
    if donor.channels != base.channels:
        if base.channels == 1:
            patch = imaging.to_grayscale(RasterImage(patch)).data
        else:
            patch = np.repeat(patch, 3, axis=2)
    out = base.data.copy()
    out[dy:dy + side, dx:dx + side] = patch
    if p.seam_blur is not None:
        out = _blur_seam(out, dx, dy, side, p.seam_blur)
    return RasterImage(out, copy=False), _rect_mask(base.height, base.width, dx, dy, side)


# ---------------------------------------------------------------------------
# splitting, augmentation, ablation


def split(corpus: CorpusIndex, val_fraction: float, seed: int):
    """Stratified split: per class, a seeded shuffle sends the first
    ceil(n_class * val_fraction) records to validation. Returns
    (train, validation) as disjoint, exhaustive CorpusIndexes."""
    if not 0.0 < val_fraction < 1.0:
        raise ValueError(f"val_fraction must lie in (0, 1), got {val_fraction}")
    rng = np.random.default_rng(seed)
    train, val = [], []
    for label in (0, 1):
        members = [r for r in corpus.records if r.label == label]
        n = len(members)
        if n == 0:
            raise DegenerateSplit(f"class {label} has no records")
        n_val = math.ceil(round(n * val_fraction, 9))
        if n_val >= n:
            raise DegenerateSplit(f"class {label} would have an empty train side")
        order = rng.permutation(n)
        val.extend(members[i] for i in order[:n_val])
        train.extend(members[i] for i in order[n_val:])
    return (
        _make_index(train, corpus.root),
        _make_index(val, corpus.root),
    )


def augment(corpus: CorpusIndex, ops, seed: int = 0) -> CorpusIndex:
    """Add one transformed variant per (record, op); labels kept, masks
    transformed at load time. ops ⊆ {flip_h, flip_v, rotate, shear}; the
    rotate op draws its sign (±15°) per record from the seeded generator.
    """
    requested = [op for op in AUGMENT_OPS if op in set(ops)]
    unknown = set(ops) - set(AUGMENT_OPS)
    if unknown:
        raise ValueError(f"unknown augment ops: {sorted(unknown)}")
    if not requested:
        raise ValueError("augment needs at least one op")
    rng = np.random.default_rng(seed)
    out = list(corpus.records)
    for record in corpus.records:
        for op in requested:
            if op == "rotate":
                degrees = ROTATE_DEGREES if int(rng.integers(0, 2)) else -ROTATE_DEGREES
                tag = f"augmented(rotate({degrees}))"
            elif op == "shear":
                tag = f"augmented(shear({SHEAR_RATIO}))"
            else:
                tag = f"augmented({op})"
            out.append(replace(record, provenance=f"{record.provenance}+{tag}"))
    return _make_index(out, corpus.root, corpus.unresolved_masks)


def ablate(corpus: CorpusIndex, op: str) -> CorpusIndex:
    """Replace every image with its blurred or grayscale variant (applied
    at load time); record count, labels, and masks are unchanged."""
    tag = _normalize_ablate_op(op)
    out = [replace(r, provenance=f"{r.provenance}+ablated({tag})") for r in corpus.records]
    return _make_index(out, corpus.root, corpus.unresolved_masks)


def _normalize_ablate_op(op: str) -> str:
    if op == "grayscale":
        return op
    if op == "blur":
        return "blur(3)"
    m = re.fullmatch(r"blur\((\d+)\)", op)
    if m:
        k = int(m.group(1))
        if k >= 3 and k % 2 == 1:
            return f"blur({k})"
    raise ValueError(f"unknown ablation op {op!r}")


# ---------------------------------------------------------------------------
# record loading (provenance-aware)

_MODIFIER_RE = re.compile(r"^(augmented|ablated)\((.+)\)$")


def _provenance_chain(provenance: str):
    parts = provenance.split("+")
    base, modifiers = parts[0], parts[1:]
    for mod in modifiers:
        if not _MODIFIER_RE.match(mod):
            raise ValueError(f"bad provenance segment {mod!r} in {provenance!r}")
    return base, modifiers


def _apply_image_modifier(img: RasterImage, mod: str) -> RasterImage:
    kind, inner = _MODIFIER_RE.match(mod).groups()
    if kind == "augmented":
        if inner == "flip_h":
            return imaging.flip(img, "horizontal")
        if inner == "flip_v":
            return imaging.flip(img, "vertical")
        m = re.fullmatch(r"rotate\((-?\d+(?:\.\d+)?)\)", inner)
        if m:
            return imaging.affine_warp(img, rotation=float(m.group(1)))
        m = re.fullmatch(r"shear\((-?\d+(?:\.\d+)?)\)", inner)
        if m:
            return imaging.affine_warp(img, shear_x=float(m.group(1)))
    else:
        m = re.fullmatch(r"blur\((\d+)\)", inner)
        if m:
            return imaging.box_blur(img, int(m.group(1)))
        if inner == "grayscale":
            return imaging.to_grayscale(img)
    raise ValueError(f"unknown provenance modifier {mod!r}")


def _apply_mask_modifier(mask: TamperMask, mod: str) -> TamperMask:
    kind, inner = _MODIFIER_RE.match(mod).groups()
    if kind == "ablated":
        return mask  # photometric ops leave geometry alone
    plane = RasterImage((mask.bits * np.uint8(255)))
    if inner == "flip_h":
        warped = imaging.flip(plane, "horizontal")
    elif inner == "flip_v":
        warped = imaging.flip(plane, "vertical")
    else:
        m = re.fullmatch(r"rotate\((-?\d+(?:\.\d+)?)\)", inner)
        if m:
            warped = imaging.affine_warp(plane, rotation=float(m.group(1)))
        else:
            m = re.fullmatch(r"shear\((-?\d+(?:\.\d+)?)\)", inner)
            if not m:
                raise ValueError(f"unknown provenance modifier {mod!r}")
            warped = imaging.affine_warp(plane, shear_x=float(m.group(1)))
    return TamperMask((warped.plane() > 127).astype(np.uint8))  # re-binarize at 0.5


def load_sample_image(root, record: SampleRecord) -> RasterImage:
    """Read a record's image and apply its provenance modifiers in order."""
    img = imaging.read_image(Path(root) / record.image_path)
    _, modifiers = _provenance_chain(record.provenance)
    for mod in modifiers:
        img = _apply_image_modifier(img, mod)
    return img


def load_sample_mask(root, record: SampleRecord) -> TamperMask:
    """The record's effective 128x128 ground truth: stored mask for
    tampered records (warped like the image when augmented), empty for
    authentic ones."""
    if record.mask_path is None:
        return empty_mask()
    mask = localize.load_mask(Path(root) / record.mask_path)
    _, modifiers = _provenance_chain(record.provenance)
    for mod in modifiers:
        mask = _apply_mask_modifier(mask, mod)
    return mask


# ---------------------------------------------------------------------------
# manifest I/O

MANIFEST_FIELDS = ("image_path", "label", "mask_path", "provenance")


def write_manifest(corpus: CorpusIndex, path) -> None:
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(MANIFEST_FIELDS)
            for r in corpus.records:
                writer.writerow([r.image_path, r.label, r.mask_path or "", r.provenance])
    except OSError as exc:
        raise IoFailure(f"cannot write manifest: {exc}") from exc


def read_manifest(path) -> CorpusIndex:
    p = Path(path)
    try:
        with open(p, "r", encoding="ascii", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise IoFailure(f"cannot read manifest: {exc}") from exc
    records = [
        SampleRecord(
            row["image_path"],
            int(row["label"]),
            row["mask_path"] or None,
            row["provenance"],
        )
        for row in rows
    ]
    return _make_index(records, p.parent)


# ---------------------------------------------------------------------------
# procedural source photos + corpus generation


def synthetic_photo(width: int, height: int, seed: int, detail: float = 0.3) -> RasterImage:
    """Procedural test photograph: a smooth low-frequency color field, a
    horizontal banded texture (scanline-like, period 8 rows), and seeded
    per-pixel noise whose strength is set by ``detail`` in [0, 1].

    The banding is deterministic and identical across seeds, so pasted
    regions betray themselves by breaking its phase; the color field and
    noise are seeded and vary per image.
    """
    if not 0.0 <= detail <= 1.0:
        raise ValueError(f"detail must lie in [0, 1], got {detail}")
    rng = np.random.default_rng(seed)
    grid = rng.integers(0, 256, (5, 5, 3), dtype=np.uint8)
    base = imaging.resize_bilinear(RasterImage(grid, copy=False), width, height)
    field = base.data.astype(np.float64)
    bands = 20.0 * np.sin(np.arange(height) * (2.0 * np.pi / 8.0))
    texture = rng.normal(0.0, 1.0, (height, width))[:, :, None] * (60.0 * detail)
    mixed = np.clip(field + bands[:, None, None] + texture, 0.0, 255.0)
    return RasterImage(np.floor(mixed + 0.5).astype(np.uint8), copy=False)


def _reencode(img: RasterImage, quality: int) -> RasterImage:
    return imaging.decode_image(imaging.encode_jpeg(img, quality))


def generate_corpus(source_paths, count: int, out_root, params: ForgeryParams,
                    crop: int = 128):
    """Build a forgery corpus under ``out_root``: ``count`` authentic
    crops in Au/, ``count`` forgeries in Tp/ (first half copy-move, rest
    spliced), masks in masks/, plus manifest.csv.

    Every crop passes through a seeded intermediate JPEG quality drawn
    from HISTORY_QUALITY_RANGE (its simulated camera history) and all
    output images are saved at FINAL_JPEG_QUALITY, so class separation
    comes from the manipulation itself rather than the final encode.
    Fully deterministic given (sorted sources, count, params).

    Returns the CorpusIndex of the written corpus.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if crop < 2 * params.patch_max:
        raise ValueError(
            f"crop {crop} cannot host patches up to {params.patch_max} "
            f"(needs >= {2 * params.patch_max})"
        )
    paths = sorted(str(p) for p in source_paths)
    if not paths:
        raise EmptyCorpus("no source images supplied")
    out_rootp = Path(out_root)
    records = []
    pending = []  # (relative path, bytes) written only after full success

    if count > 0:
        sources = []
        for path in paths:
            img = imaging.read_image(path)
            if min(img.width, img.height) >= crop:
                sources.append(img)
        if not sources:
            raise ImageTooSmall(f"no source image can host a {crop}x{crop} crop")
        n_splice = count // 2
        if n_splice > 0 and len(sources) < 2:
            raise ImageTooSmall("splicing needs at least 2 usable source images")
        rng = np.random.default_rng(params.seed)
        q_lo, q_hi = HISTORY_QUALITY_RANGE

        def seeded_crop():
            src = sources[int(rng.integers(0, len(sources)))]
            x = int(rng.integers(0, src.width - crop + 1))
            y = int(rng.integers(0, src.height - crop + 1))
            q = int(rng.integers(q_lo, q_hi + 1))
            tile = RasterImage(np.ascontiguousarray(src.data[y:y + crop, x:x + crop]))
            return _reencode(tile, q), src

        for i in range(count):
            image, _ = seeded_crop()
            rel = f"Au/au_{i:04d}.jpg"
            pending.append((rel, imaging.encode_jpeg(image, FINAL_JPEG_QUALITY)))
            records.append(SampleRecord(rel, 0, None, PROVENANCE_REAL))

        n_copy_move = count - n_splice
        for j in range(count):
            base, base_src = seeded_crop()
            child = replace(params, seed=int(rng.integers(0, 2**63)))
            if j < n_copy_move:
                forged, mask = synth_copy_move(base, child)
                stem = f"cm_{j:04d}"
                provenance = PROVENANCE_COPY_MOVE
            else:
                donor = None
                for _ in range(100):
                    candidate, donor_src = seeded_crop()
                    if donor_src is not base_src or len(sources) == 1:
                        donor = candidate
                        break
                if donor is None:
                    donor = candidate
                forged, mask = synth_splice(base, donor, child)
                stem = f"sp_{j:04d}"
                provenance = PROVENANCE_SPLICE
            image_rel = f"Tp/{stem}.jpg"
            mask_rel = f"masks/{stem}_gt.png"
            pending.append((image_rel, imaging.encode_jpeg(forged, FINAL_JPEG_QUALITY)))
            buf = io.BytesIO()
            localize.save_mask(mask, buf)
            pending.append((mask_rel, buf.getvalue()))
            records.append(SampleRecord(image_rel, 1, mask_rel, provenance))

    index = _make_index(records, out_rootp)
    for sub in ("Au", "Tp", "masks"):
        (out_rootp / sub).mkdir(parents=True, exist_ok=True)
    for rel, data in pending:
        with open(out_rootp / rel, "wb") as fh:
            fh.write(data)
    write_manifest(index, out_rootp / "manifest.csv")
    return index
