"""Command-line front end.

Subcommands: ela, extract, train, predict, evaluate, localize, synth.
Exit codes: 0 ok, 2 I/O, 3 decode, 4 corpus, 5 model, 6 mask shape,
7 synthesis. Commands compute everything before writing, so nothing is
left on disk after a nonzero exit; errors go to standard error.
"""

import csv
import functools
from pathlib import Path

import click

from tamperlab import classify, dataset, ela, imaging, localize, pipelines
from tamperlab import eval as evalmod
from tamperlab.errors import (
    ChecksumMismatch,
    CorruptStream,
    DegenerateSplit,
    DimMismatch,
    EmptyCorpus,
    FormatVersionMismatch,
    ImageTooSmall,
    InvalidQuality,
    IoFailure,
    MissingRoot,
    ShapeMismatch,
    TamperlabError,
    UnsupportedFormat,
)

_EXIT_TABLE = (
    ((IoFailure,), 2),
    ((UnsupportedFormat, CorruptStream, InvalidQuality), 3),
    ((MissingRoot, EmptyCorpus, DegenerateSplit), 4),
    ((FormatVersionMismatch, ChecksumMismatch, DimMismatch), 5),
    ((ShapeMismatch,), 6),
    ((ImageTooSmall,), 7),
)


def _exit_code(exc: Exception) -> int:
    for types, code in _EXIT_TABLE:
        if isinstance(exc, types):
            return code
    return 1


def forensic_command(fn):
    """Translate toolkit errors into the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TamperlabError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(_exit_code(exc))
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)

    return wrapper


@click.group()
def cli():
    """Image-forensics toolkit: forgery detection and tamper localization."""


@cli.command("ela")
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.option("--quality", type=click.IntRange(1, 100), default=90, show_default=True,
              help="JPEG recompression quality.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output heatmap PNG.")
@forensic_command
def cmd_ela(image, quality, out):
    """Write the error-level heatmap of IMAGE as PNG."""
    img = imaging.read_image(image)
    heat = ela.compute_ela(img, ela.ElaConfig(quality=quality))
    imaging.write_png(heat, out)


@cli.command("extract")
@click.argument("corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--features", "family", type=click.Choice(pipelines.FEATURE_FAMILIES),
              default="dctlbp", show_default=True, help="Feature family to extract.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output CSV (sample id, then vector components).")
@forensic_command
def cmd_extract(corpus, family, out):
    """Extract unscaled feature vectors for every image in CORPUS."""
    index = dataset.scan_corpus(corpus)
    _warn_unresolved(index)
    ids, vectors, _ = pipelines.extract_corpus(index, family)
    with open(out, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        dim = len(vectors[0]) if vectors else 0
        writer.writerow(["id"] + [f"x{i}" for i in range(dim)])
        for sample_id, vec in zip(ids, vectors):
            writer.writerow([sample_id] + [format(x, ".17g") for x in vec.values])


@cli.command("train")
@click.argument("corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--pipeline", "pipeline_id", type=click.Choice(pipelines.PIPELINES),
              required=True, help="Feature family + classifier.")
@click.option("--epochs", type=click.IntRange(min=1), default=30, show_default=True)
@click.option("--lr", type=float, default=0.1, show_default=True, help="Learning rate.")
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True,
              help="L2 coefficient (SVM only).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--val-fraction", type=float, default=0.2, show_default=True)
@click.option("--ablation", type=click.Choice(pipelines.ABLATIONS), default="none",
              show_default=True, help="Corpus variant to train on.")
@click.option("--hidden", type=click.IntRange(min=1), default=64, show_default=True,
              help="MLP hidden width.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output model file.")
@forensic_command
def cmd_train(corpus, pipeline_id, epochs, lr, lam, seed, val_fraction, ablation,
              hidden, out):
    """Train a detector on CORPUS and save the model file."""
    index = dataset.scan_corpus(corpus)
    _warn_unresolved(index)
    cfg = classify.TrainConfig(epochs=epochs, learning_rate=lr, lam=lam, seed=seed)
    mf, train_report, val_report, _ = pipelines.train_run(
        index, pipeline_id, cfg, val_fraction=val_fraction, ablation=ablation,
        hidden_dim=hidden,
    )
    classify.save_model(mf, out)
    click.echo(evalmod.format_report_table([train_report, val_report]))


@cli.command("predict")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@forensic_command
def cmd_predict(model, image):
    """Classify IMAGE with a saved model; prints label,score."""
    mf = classify.load_model(model)
    img = imaging.read_image(image)
    vector = pipelines.extract_features(img, pipelines.feature_family(mf.pipeline_id))
    label, score = classify.model_predict(mf, vector)
    click.echo("label,score")
    click.echo(f"{label},{score:.9g}")


@cli.command("evaluate")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--ablation", type=click.Choice(pipelines.ABLATIONS), default="none",
              show_default=True, help="Corpus variant to evaluate on.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for seeded corpus variants.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output report CSV.")
@forensic_command
def cmd_evaluate(model, corpus, ablation, seed, out):
    """Score a saved model over every image in CORPUS."""
    mf = classify.load_model(model)
    index = dataset.scan_corpus(corpus)
    _warn_unresolved(index)
    report, _, _ = pipelines.evaluate_model(mf, index, ablation=ablation, seed=seed)
    evalmod.report_csv([report], out)
    click.echo(evalmod.format_report_table([report]))


@cli.command("localize")
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.option("--gt", type=click.Path(exists=True, dir_okay=False),
              help="Ground-truth mask PNG (128x128); prints iou,f1 when given.")
@click.option("--quality", type=click.IntRange(1, 100), default=90, show_default=True,
              help="ELA recompression quality.")
@click.option("--threshold", type=click.IntRange(0, 255), default=None,
              help="Fixed threshold; omit for Otsu.")
@click.option("--morph-radius", type=click.IntRange(min=0), default=1, show_default=True)
@click.option("--min-area", type=click.IntRange(min=0), default=16, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output mask PNG.")
@forensic_command
def cmd_localize(image, gt, quality, threshold, morph_radius, min_area, out):
    """Predict the 128x128 tamper mask of IMAGE."""
    img = imaging.read_image(image)
    cfg = localize.LocalizeConfig(
        ela_quality=quality,
        threshold=threshold,
        morph_radius=morph_radius,
        min_component_area=min_area,
    )
    mask = localize.predict_mask(img, cfg)
    lines = []
    if gt is not None:
        truth = localize.load_mask(gt)
        iou = localize.mask_iou(mask, truth)
        f1 = localize.mask_pixel_f1(mask, truth)
        lines = ["iou,f1", f"{iou:.4f},{f1:.4f}"]
    localize.save_mask(mask, out)
    for line in lines:
        click.echo(line)


@cli.command("synth")
@click.option("--sources", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory of source images.")
@click.option("--count", type=click.IntRange(min=0), required=True,
              help="Number of forgeries (an equal number of authentic crops is emitted).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--crop", type=click.IntRange(min=32), default=128, show_default=True,
              help="Side of the square crops the corpus is built from.")
@click.option("--patch-min", type=click.IntRange(min=4), default=16, show_default=True)
@click.option("--patch-max", type=click.IntRange(min=4), default=48, show_default=True)
@click.option("--seam-blur", type=int, default=None,
              help="Odd box-blur size for pasted-seam smoothing (off by default).")
@click.option("--out", "out_root", required=True, type=click.Path(file_okay=False),
              help="Corpus root to create (Au/, Tp/, masks/, manifest.csv).")
@forensic_command
def cmd_synth(sources, count, seed, crop, patch_min, patch_max, seam_blur, out_root):
    """Synthesize a forgery corpus with ground-truth masks."""
    paths = [
        p for p in sorted(Path(sources).iterdir())
        if p.is_file() and p.suffix.lower() in dataset.IMAGE_EXTENSIONS
    ]
    if not paths:
        raise EmptyCorpus(f"no source images under {sources}")
    params = dataset.ForgeryParams(
        patch_min=patch_min, patch_max=patch_max, seam_blur=seam_blur, seed=seed
    )
    index = dataset.generate_corpus(paths, count, out_root, params, crop=crop)
    click.echo(f"wrote {len(index)} records under {out_root}")


def _warn_unresolved(index) -> None:
    if index.unresolved_masks:
        click.echo(
            f"warning: {len(index.unresolved_masks)} tampered image(s) without a "
            f"ground-truth mask", err=True,
        )


def main():
    cli()


if __name__ == "__main__":
    main()
