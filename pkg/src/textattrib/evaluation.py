"""Classification metrics and evaluation reports.

Macro F1 is the unweighted mean of per-class F1 scores.  Any ratio with
a zero denominator (precision, recall, or F1 on an absent class) is
defined as 0, so a class never predicted and never present contributes
0 to the mean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


def _check_labels(gold, pred, classes) -> tuple[list, list, list]:
    gold = list(gold)
    pred = list(pred)
    classes = list(classes)
    if len(gold) != len(pred):
        raise DataError(
            f"length mismatch: {len(gold)} gold labels vs {len(pred)} predictions"
        )
    if not gold:
        raise DataError("empty label lists")
    if len(set(classes)) != len(classes):
        raise DataError("duplicate class name")
    known = set(classes)
    for value in gold:
        if value not in known:
            raise DataError(f"unknown label {value!r} in gold")
    for value in pred:
        if value not in known:
            raise DataError(f"unknown label {value!r} in predictions")
    return gold, pred, classes


def confusion_matrix(gold, pred, classes) -> np.ndarray:
    """C x C counts; rows are gold classes, columns predictions."""
    gold, pred, classes = _check_labels(gold, pred, classes)
    index = {c: i for i, c in enumerate(classes)}
    out = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(gold, pred):
        out[index[g], index[p]] += 1
    return out


def _f1_from_confusion(confusion: np.ndarray) -> list[dict[str, float]]:
    stats = []
    for c in range(confusion.shape[0]):
        tp = int(confusion[c, c])
        fp = int(confusion[:, c].sum()) - tp
        fn = int(confusion[c, :].sum()) - tp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        stats.append(
            {
                "precision": precision,
                "recall": recall,
                "f1": f1,
                "support": tp + fn,
            }
        )
    return stats


def macro_f1(gold, pred, classes) -> float:
    confusion = confusion_matrix(gold, pred, classes)
    stats = _f1_from_confusion(confusion)
    return sum(s["f1"] for s in stats) / len(stats)


@dataclass(frozen=True)
class EvalReport:
    classes: tuple[str, ...]
    macro_f1: float
    per_class: dict[str, dict[str, float]]
    confusion: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def accuracy(self) -> float:
        total = int(self.confusion.sum())
        return float(np.trace(self.confusion)) / total if total else 0.0

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "per_class": self.per_class,
            "confusion": [[int(v) for v in row] for row in self.confusion],
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def format_text(self) -> str:
        width = max(len(c) for c in self.classes)
        width = max(width, len("class"))
        lines = [
            f"macro F1: {self.macro_f1:.6f}",
            f"accuracy: {self.accuracy:.6f}",
            "",
            f"{'class':<{width}}  precision  recall  f1      support",
        ]
        for c in self.classes:
            s = self.per_class[c]
            lines.append(
                f"{c:<{width}}  {s['precision']:9.4f}  {s['recall']:6.4f}"
                f"  {s['f1']:6.4f}  {int(s['support']):7d}"
            )
        lines.append("")
        lines.append("confusion (rows gold, columns predicted):")
        cell = max(width, 6)
        header = " " * (width + 2) + "  ".join(f"{c:>{cell}}" for c in self.classes)
        lines.append(header)
        for i, c in enumerate(self.classes):
            row = "  ".join(f"{int(v):>{cell}}" for v in self.confusion[i])
            lines.append(f"{c:<{width}}  {row}")
        return "\n".join(lines) + "\n"


def evaluate(gold, pred, classes, metadata=None) -> EvalReport:
    confusion = confusion_matrix(gold, pred, classes)
    stats = _f1_from_confusion(confusion)
    per_class = {c: stats[i] for i, c in enumerate(classes)}
    score = sum(s["f1"] for s in stats) / len(stats)
    return EvalReport(
        classes=tuple(classes),
        macro_f1=score,
        per_class=per_class,
        confusion=confusion,
        metadata=dict(metadata or {}),
    )
