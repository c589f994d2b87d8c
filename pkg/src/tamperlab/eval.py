"""Binary classification metrics and experiment reports: accuracy,
per-class F-scores, and their support-weighted mean, with CSV and
plain-table renderings."""

import csv
from dataclasses import dataclass

from tamperlab.errors import EmptySet, IoFailure, LengthMismatch


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with class 1 (tampered) as the positive class."""

    tn: int
    fp: int
    fn: int
    tp: int

    def __post_init__(self):
        if min(self.tn, self.fp, self.fn, self.tp) < 0:
            raise ValueError("confusion counts must be >= 0")

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp


@dataclass(frozen=True)
class EvalReport:
    """One experiment row: accuracy, per-class F-scores, their
    support-weighted mean, and the class supports."""

    accuracy: float
    f_class0: float
    f_class1: float
    weighted_f: float
    support0: int
    support1: int
    pipeline_id: str = ""
    ablation: str = "none"


def confusion(preds, truth) -> ConfusionMatrix:
    """Tally 0/1 predictions against 0/1 ground truth."""
    preds = list(preds)
    truth = list(truth)
    if len(preds) != len(truth):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(truth)} labels")
    if not preds:
        raise EmptySet("nothing to score")
    tn = fp = fn = tp = 0
    for p, t in zip(preds, truth):
        if p not in (0, 1) or t not in (0, 1):
            raise ValueError(f"labels must be 0/1, got prediction {p!r}, truth {t!r}")
        if t == 1:
            if p == 1:
                tp += 1
            else:
                fn += 1
        else:
            if p == 1:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tn=tn, fp=fp, fn=fn, tp=tp)


def scores(cm: ConfusionMatrix, pipeline_id: str = "", ablation: str = "none") -> EvalReport:
    """accuracy = (tp+tn)/total; F1 per class (0 when the denominator is
    0); weighted F = support-weighted mean of the two F-scores."""
    total = cm.total
    if total == 0:
        raise EmptySet("empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / total
    denom1 = 2 * cm.tp + cm.fp + cm.fn
    f1 = 2 * cm.tp / denom1 if denom1 > 0 else 0.0
    denom0 = 2 * cm.tn + cm.fn + cm.fp
    f0 = 2 * cm.tn / denom0 if denom0 > 0 else 0.0
    support0 = cm.tn + cm.fp
    support1 = cm.tp + cm.fn
    weighted = (support0 * f0 + support1 * f1) / total
    return EvalReport(
        accuracy=accuracy,
        f_class0=f0,
        f_class1=f1,
        weighted_f=weighted,
        support0=support0,
        support1=support1,
        pipeline_id=pipeline_id,
        ablation=ablation,
    )


REPORT_FIELDS = ("pipeline", "ablation", "accuracy", "f0", "f1", "weighted",
                 "support0", "support1")


def report_csv(reports, path) -> None:
    """Write reports as CSV, scores at 4 decimal places."""
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(REPORT_FIELDS)
            for r in reports:
                writer.writerow([
                    r.pipeline_id,
                    r.ablation,
                    f"{r.accuracy:.4f}",
                    f"{r.f_class0:.4f}",
                    f"{r.f_class1:.4f}",
                    f"{r.weighted_f:.4f}",
                    r.support0,
                    r.support1,
                ])
    except OSError as exc:
        raise IoFailure(f"cannot write report: {exc}") from exc


def format_report_table(reports) -> str:
    """Human-readable fixed-width table of the same rows."""
    header = f"{'pipeline':<14} {'ablation':<12} {'acc':>7} {'f0':>7} {'f1':>7} {'wf':>7} {'n0':>5} {'n1':>5}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.pipeline_id:<14} {r.ablation:<12} {r.accuracy:>7.4f} "
            f"{r.f_class0:>7.4f} {r.f_class1:>7.4f} {r.weighted_f:>7.4f} "
            f"{r.support0:>5d} {r.support1:>5d}"
        )
    return "\n".join(lines)
