"""ROC curves and ranking-based AUC.

AUC is computed as the probability-of-correct-ranking statistic
P(score_pos > score_neg) + 0.5 * P(tie), evaluated through tie-averaged
ranks so it is exact (no trapezoid approximation).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DataContractError
from ..data.ingest import ImageArchive
from ..data.records import DatasetManifest
from .training import TrainedClassifier


@dataclass
class RocCurve:
    thresholds: np.ndarray  # descending
    tpr: np.ndarray
    fpr: np.ndarray
    auc: float

    def save_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", "fpr", "tpr"])
            for t, f, p in zip(self.thresholds, self.fpr, self.tpr):
                writer.writerow([repr(float(t)), repr(float(f)), repr(float(p))])


def auc_rank_statistic(scores: np.ndarray, labels: np.ndarray) -> float:
    """Tie-averaged rank AUC over 1-labeled positives and 0-labeled negatives."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataContractError("AUC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank of the tie group
        i = j + 1
    pos_rank_sum = ranks[labels == 1].sum()
    return float((pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_from_scores(scores: np.ndarray, labels: np.ndarray) -> RocCurve:
    """Full ROC polyline over unique score thresholds, endpoints included."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataContractError("ROC needs both classes present")

    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    # collapse ties: one curve point per unique threshold
    distinct = np.r_[np.where(np.diff(sorted_scores))[0], len(sorted_scores) - 1]
    tp_cum = np.cumsum(sorted_labels == 1)[distinct]
    fp_cum = np.cumsum(sorted_labels == 0)[distinct]

    thresholds = np.r_[np.inf, sorted_scores[distinct]]
    tpr = np.r_[0.0, tp_cum / n_pos]
    fpr = np.r_[0.0, fp_cum / n_neg]
    return RocCurve(
        thresholds=thresholds,
        tpr=tpr,
        fpr=fpr,
        auc=auc_rank_statistic(scores, labels),
    )


def evaluate_roc(
    clf: TrainedClassifier,
    manifest: DatasetManifest,
    archive: ImageArchive,
    split: str = "test",
) -> RocCurve:
    records = manifest.split_records(split)
    if not records:
        raise DataContractError(f"manifest has no {split!r} records")
    labels = np.array([r.label for r in records])
    if len(set(labels.tolist())) < 2:
        raise DataContractError(f"{split} set contains a single class; AUC is undefined")
    scores = clf.score_batch(archive.stack([r.id for r in records]))
    return roc_from_scores(scores, labels)
