"""Confusion counts, per-class metrics, ROC/AUC and threshold sweeps.

A prediction is positive when ``p >= threshold``. Metrics with a zero
denominator are reported as 0 and listed in ``EvalReport.degenerate``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import EmptyEvaluation, SingleClassEvaluation

Pred = Tuple[float, int]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def flipped(self) -> "ConfusionCounts":
        """Counts with the roles of the two classes exchanged."""
        return ConfusionCounts(tp=self.tn, fn=self.fp, fp=self.fn, tn=self.tp)


def confusion(preds: Sequence[Pred], threshold: float = 0.5) -> ConfusionCounts:
    tp = fn = fp = tn = 0
    for p, y in preds:
        hit = p >= threshold
        if y:
            if hit:
                tp += 1
            else:
                fn += 1
        elif hit:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fn, fp, tn)


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass
class EvalReport:
    counts: ConfusionCounts
    accuracy: float
    positive: ClassMetrics
    negative: ClassMetrics
    threshold: Optional[float] = None
    degenerate: List[str] = field(default_factory=list)
    roc: Optional[List[Tuple[float, float, float]]] = None
    auc: Optional[float] = None

    def to_kv(self) -> str:
        c = self.counts
        rows = [
            ("threshold", self.threshold), ("total", c.total),
            ("tp", c.tp), ("fn", c.fn), ("fp", c.fp), ("tn", c.tn),
            ("accuracy", self.accuracy),
            ("positive.precision", self.positive.precision),
            ("positive.recall", self.positive.recall),
            ("positive.f1", self.positive.f1),
            ("negative.precision", self.negative.precision),
            ("negative.recall", self.negative.recall),
            ("negative.f1", self.negative.f1),
            ("degenerate", ",".join(self.degenerate)),
        ]
        if self.auc is not None:
            rows.append(("auc", self.auc))
        return "".join(f"{k}={'' if v is None else v}\n" for k, v in rows)


def _ratio(num: int, den: int, name: str, flags: List[str]) -> float:
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def _class_metrics(tp: int, fn: int, fp: int, prefix: str, flags: List[str]) -> ClassMetrics:
    p = _ratio(tp, tp + fp, f"{prefix}.precision", flags)
    r = _ratio(tp, tp + fn, f"{prefix}.recall", flags)
    if p + r == 0:
        flags.append(f"{prefix}.f1")
        f1 = 0.0
    else:
        f1 = 2 * p * r / (p + r)
    return ClassMetrics(p, r, f1)


def metrics(c: ConfusionCounts, threshold: Optional[float] = None) -> EvalReport:
    if c.total == 0:
        raise EmptyEvaluation("no records to evaluate")
    flags: List[str] = []
    pos = _class_metrics(c.tp, c.fn, c.fp, "positive", flags)
    neg = _class_metrics(c.tn, c.fp, c.fn, "negative", flags)
    return EvalReport(c, (c.tp + c.tn) / c.total, pos, neg, threshold, flags)


def evaluate(preds: Sequence[Pred], threshold: float = 0.5) -> EvalReport:
    return metrics(confusion(preds, threshold), threshold)


def roc_auc(preds: Sequence[Pred]) -> Tuple[List[Tuple[float, float, float]], float]:
    """ROC points ``(threshold, fpr, tpr)`` from high to low score, and trapezoid AUC.

    Equal scores move the curve in a single diagonal step.
    """
    n_pos = sum(1 for _, y in preds if y)
    n_neg = len(preds) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassEvaluation("ROC needs both positive and negative labels")
    ordered = sorted(preds, key=lambda py: -py[0])
    points = [(float("inf"), 0.0, 0.0)]
    tp = fp = 0
    auc = 0.0
    i = 0
    while i < len(ordered):
        score = ordered[i][0]
        while i < len(ordered) and ordered[i][0] == score:
            if ordered[i][1]:
                tp += 1
            else:
                fp += 1
            i += 1
        prev_fpr, prev_tpr = points[-1][1], points[-1][2]
        fpr, tpr = fp / n_neg, tp / n_pos
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0
        points.append((score, fpr, tpr))
    return points, auc


@dataclass
class SweepResult:
    reports: List[EvalReport]
    best_threshold: float
    best_accuracy: float

    def to_tsv(self) -> str:
        head = "threshold\taccuracy\tpositive_precision\tpositive_recall\tpositive_f1\t" \
               "negative_precision\tnegative_recall\tnegative_f1\ttp\tfn\tfp\ttn\n"
        lines = []
        for r in self.reports:
            c = r.counts
            lines.append("\t".join(str(v) for v in (
                r.threshold, r.accuracy, r.positive.precision, r.positive.recall, r.positive.f1,
                r.negative.precision, r.negative.recall, r.negative.f1, c.tp, c.fn, c.fp, c.tn)))
        return head + "\n".join(lines) + "\n"


def sweep_thresholds(steps: int = 10) -> List[float]:
    if steps < 2:
        raise ValueError("a sweep needs at least 2 thresholds")
    return [round(k / steps, 12) for k in range(1, steps + 1)]


def threshold_sweep(preds: Sequence[Pred], steps: int = 10) -> SweepResult:
    """Reports at thresholds 1/steps, 2/steps, ..., 1; best accuracy wins, ties to the lowest."""
    reports = [evaluate(preds, t) for t in sweep_thresholds(steps)]
    best = max(reports, key=lambda r: (r.accuracy, -r.threshold))
    return SweepResult(reports, best.threshold, best.accuracy)


def roc_to_tsv(points) -> str:
    return "threshold\tfpr\ttpr\n" + "".join(f"{t}\t{f}\t{p}\n" for t, f, p in points)


def write_report(directory, report: EvalReport, sweep: Optional[SweepResult] = None) -> Dict[str, str]:
    """Write ``metrics.kv`` (+ ``roc.tsv`` / ``sweep.tsv`` when available) under ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files = {"metrics": str(d / "metrics.kv")}
    (d / "metrics.kv").write_text(report.to_kv(), encoding="utf-8")
    if report.roc is not None:
        (d / "roc.tsv").write_text(roc_to_tsv(report.roc), encoding="utf-8")
        files["roc"] = str(d / "roc.tsv")
    if sweep is not None:
        (d / "sweep.tsv").write_text(sweep.to_tsv(), encoding="utf-8")
        files["sweep"] = str(d / "sweep.tsv")
    return files


def full_report(preds: Sequence[Pred], threshold: float = 0.5) -> EvalReport:
    """Metrics at ``threshold`` plus ROC/AUC when both classes are present."""
    rep = evaluate(preds, threshold)
    labels = {y for _, y in preds}
    if len(labels) == 2:
        rep.roc, rep.auc = roc_auc(preds)
    return rep
