"""Evaluation report with long-tail shot groups.

Classes are grouped by their training-set frequency: many-shot above 100
training samples, medium-shot in (20, 100], few-shot at most 20. Group
accuracy is the unweighted mean of per-class accuracies, so rare classes
count as much as common ones inside a group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ImbalanceProfile

MANY_SHOT_MIN = 100  # exclusive lower bound
FEW_SHOT_MAX = 20  # inclusive upper bound

_GROUP_ORDER = ("many_shot", "medium_shot", "few_shot")


def shot_group(train_count: int) -> str:
    if train_count > MANY_SHOT_MIN:
        return "many_shot"
    if train_count > FEW_SHOT_MAX:
        return "medium_shot"
    return "few_shot"


@dataclass(frozen=True)
class MetricsReport:
    """Evaluation summary.

    per_class_accuracy holds None for classes absent from the test labels;
    shot_groups omits groups whose classes have no test samples. macro_f1
    averages F1 over classes that appear in labels or predictions.
    """

    overall_accuracy: float
    per_class_accuracy: tuple
    shot_groups: dict
    macro_f1: float
    sample_count: int

    def to_json_dict(self) -> dict:
        return {
            "overall_accuracy": self.overall_accuracy,
            "per_class_accuracy": list(self.per_class_accuracy),
            "shot_groups": dict(self.shot_groups),
            "macro_f1": self.macro_f1,
            "sample_count": self.sample_count,
        }


def _as_counts(train_counts) -> tuple[int, ...]:
    if isinstance(train_counts, ImbalanceProfile):
        return train_counts.counts
    counts = tuple(int(c) for c in np.asarray(train_counts).tolist())
    if len(counts) < 1 or any(c < 0 for c in counts):
        raise ValueError("train counts must be non-negative integers")
    return counts


def score(predictions, labels, train_counts) -> MetricsReport:
    """Score class predictions against labels.

    train_counts (an ImbalanceProfile or a per-class count sequence) defines
    the number of classes and the shot grouping; its length must cover every
    label and prediction.
    """
    counts = _as_counts(train_counts)
    num_classes = len(counts)
    preds = np.asarray(predictions)
    labs = np.asarray(labels)
    if preds.ndim != 1 or labs.ndim != 1 or preds.shape != labs.shape:
        raise ValueError(
            f"predictions and labels must be equal-length vectors, got {preds.shape} and {labs.shape}"
        )
    if preds.shape[0] < 1:
        raise ValueError("need at least one sample")
    for name, arr in (("predictions", preds), ("labels", labs)):
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"{name} must be integers, got dtype {arr.dtype}")
        if arr.min() < 0 or arr.max() >= num_classes:
            raise ValueError(f"{name} must lie in [0, {num_classes})")
    preds = preds.astype(np.int64)
    labs = labs.astype(np.int64)

    n = preds.shape[0]
    overall = float(np.mean(preds == labs))

    per_class = []
    for c in range(num_classes):
        mask = labs == c
        total = int(mask.sum())
        if total == 0:
            per_class.append(None)
        else:
            per_class.append(float(np.mean(preds[mask] == c)))

    groups: dict[str, list[float]] = {name: [] for name in _GROUP_ORDER}
    for c, acc in enumerate(per_class):
        if acc is not None:
            groups[shot_group(counts[c])].append(acc)
    shot_groups = {
        name: float(np.mean(values)) for name, values in groups.items() if values
    }

    f1s = []
    for c in range(num_classes):
        tp = int(np.sum((preds == c) & (labs == c)))
        fp = int(np.sum((preds == c) & (labs != c)))
        fn = int(np.sum((preds != c) & (labs == c)))
        if tp + fp + fn == 0:
            continue
        f1s.append(2.0 * tp / (2.0 * tp + fp + fn))
    macro_f1 = float(np.mean(f1s))

    return MetricsReport(
        overall_accuracy=overall,
        per_class_accuracy=tuple(per_class),
        shot_groups=shot_groups,
        macro_f1=macro_f1,
        sample_count=n,
    )
