"""Evaluation metrics for the regression and classification tasks."""
from __future__ import annotations

import numpy as np

from .errors import DomainError


def _paired(y_true, y_pred):
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or len(y_true) == 0:
        raise DomainError("inputs must be equal-length nonempty vectors")
    return y_true, y_pred


def rmse(y_true, y_pred) -> float:
    y_true, y_pred = _paired(y_true, y_pred)
    return float(np.sqrt(np.mean((y_true - y_pred) ** 2)))


def r2(y_true, y_pred) -> float:
    """Coefficient of determination 1 - SS_res/SS_tot."""
    y_true, y_pred = _paired(y_true, y_pred)
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        raise DomainError("r2 is undefined for a constant target")
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - ss_res / ss_tot


def roc_and_auc(y_true, scores) -> tuple[list[tuple[float, float, float]], float]:
    """ROC points (fpr, tpr, threshold) and trapezoidal AUC.

    Thresholds sweep the distinct score values from high to low; tied
    scores advance the curve in a single step, which keeps the AUC
    invariant under any strictly increasing transform of the scores.
    """
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=float)
    if y_true.shape != scores.shape or y_true.ndim != 1:
        raise DomainError("labels and scores must be equal-length vectors")
    n_pos = int(np.sum(y_true == 1))
    n_neg = int(np.sum(y_true == 0))
    if n_pos == 0 or n_neg == 0:
        raise DomainError("ROC needs both classes present")
    order = np.argsort(-scores, kind="stable")
    ys = np.asarray(y_true)[order]
    ss = scores[order]
    points = [(0.0, 0.0, float("inf"))]
    tp = fp = 0
    i = 0
    while i < len(ss):
        j = i
        while j + 1 < len(ss) and ss[j + 1] == ss[i]:
            j += 1
        tp += int(np.sum(ys[i:j + 1] == 1))
        fp += int(np.sum(ys[i:j + 1] == 0))
        points.append((fp / n_neg, tp / n_pos, float(ss[i])))
        i = j + 1
    auc = 0.0
    for (f0, t0, _), (f1, t1, _) in zip(points[:-1], points[1:]):
        auc += (f1 - f0) * (t1 + t0) / 2.0
    return points, float(auc)


def confusion(y_true, y_pred, n_classes: int) -> np.ndarray:
    """counts[i, j] = occurrences of (true class i, predicted class j)."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise DomainError("labels must be equal-length vectors")
    for arr in (y_true, y_pred):
        if np.any(arr < 0) or np.any(arr >= n_classes):
            raise DomainError("label outside 0..n_classes-1")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return counts


def classification_summary(y_true, y_pred) -> dict:
    """Binary accuracy / precision / recall (class 1) plus the 2x2 counts.

    Precision and recall default to 0 when their denominator is empty.
    """
    counts = confusion(y_true, y_pred, 2)
    total = int(counts.sum())
    tp = int(counts[1, 1])
    fp = int(counts[0, 1])
    fn = int(counts[1, 0])
    return {
        "accuracy": (int(counts[0, 0]) + tp) / total,
        "precision": tp / (tp + fp) if tp + fp else 0.0,
        "recall": tp / (tp + fn) if tp + fn else 0.0,
        "confusion": counts,
    }


def write_roc_csv(path, roc_points) -> None:
    """CSV with header fpr,tpr,threshold."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("fpr,tpr,threshold\n")
        for fpr, tpr, thr in roc_points:
            fh.write(f"{fpr:.17g},{tpr:.17g},{thr:.17g}\n")
