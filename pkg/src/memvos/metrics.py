"""Region (Jaccard) and boundary (F-score) evaluation, per frame and per
sequence, following the common video-segmentation benchmark conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatchError
from .tensors import MaskMap, as_mask

BOUNDARY_TOLERANCE_FACTOR = 0.008  # fraction of the image diagonal


@dataclass
class FrameScore:
    frame: int
    object: int
    jaccard: float
    boundary_f: float

    def to_json(self) -> dict:
        return {
            "frame": self.frame,
            "object": self.object,
            "J": self.jaccard,
            "F": self.boundary_f,
        }


@dataclass
class EvalReport:
    per_frame: list[FrameScore]
    mean_j: float
    mean_f: float
    j_and_f: float
    convention: str = "uniform mean over evaluated (frame, object) pairs"

    def to_json(self) -> dict:
        return {
            "per_frame": [s.to_json() for s in self.per_frame],
            "mean_J": self.mean_j,
            "mean_F": self.mean_f,
            "J_and_F": self.j_and_f,
            "convention": self.convention,
        }

    def summary_table(self) -> str:
        lines = [f"{'frame':>6} {'object':>6} {'J':>8} {'F':>8}"]
        for s in self.per_frame:
            lines.append(
                f"{s.frame:>6} {s.object:>6} {s.jaccard:>8.4f} {s.boundary_f:>8.4f}"
            )
        lines.append("-" * 31)
        lines.append(
            f"mean J={self.mean_j:.4f}  F={self.mean_f:.4f}  J&F={self.j_and_f:.4f}"
        )
        return "\n".join(lines)


def _check_shapes(pred: np.ndarray, gt: np.ndarray) -> None:
    if pred.shape != gt.shape:
        raise DimensionMismatchError(
            f"prediction {pred.shape} does not match ground truth {gt.shape}"
        )


def jaccard(pred: MaskMap, gt: MaskMap, object_id: int) -> float:
    """Intersection over union of one label; 1.0 when both masks lack it."""
    p = as_mask(pred) == object_id
    g = as_mask(gt) == object_id
    _check_shapes(p, g)
    union = np.count_nonzero(p | g)
    if union == 0:
        return 1.0
    return float(np.count_nonzero(p & g) / union)


def boundary_tolerance(height: int, width: int) -> int:
    """Match radius in pixels: ceil of 0.8% of the image diagonal."""
    return math.ceil(BOUNDARY_TOLERANCE_FACTOR * math.hypot(height, width))


def _boundary(obj: np.ndarray) -> np.ndarray:
    """Object pixels with a 4-neighbor outside the object (image border counts
    as outside)."""
    padded = np.pad(obj, 1, mode="constant", constant_values=False)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    return obj & ~interior


def boundary_f(
    pred: MaskMap, gt: MaskMap, object_id: int, tolerance: int | None = None
) -> float:
    """Boundary F-score of one label under a diagonal-scaled match radius.

    Precision is the fraction of predicted boundary pixels within the radius
    of any ground-truth boundary pixel, recall the symmetric fraction;
    F = 2PR/(P+R), zero when P+R is zero, 1.0 when both boundaries are empty.
    """
    p = as_mask(pred) == object_id
    g = as_mask(gt) == object_id
    _check_shapes(p, g)
    radius = boundary_tolerance(*p.shape) if tolerance is None else tolerance
    pred_b = _boundary(p)
    gt_b = _boundary(g)
    n_pred = int(np.count_nonzero(pred_b))
    n_gt = int(np.count_nonzero(gt_b))
    if n_pred == 0 and n_gt == 0:
        return 1.0
    if n_pred == 0 or n_gt == 0:
        return 0.0
    dist_to_gt = ndimage.distance_transform_edt(~gt_b)
    dist_to_pred = ndimage.distance_transform_edt(~pred_b)
    precision = float(np.count_nonzero(dist_to_gt[pred_b] <= radius) / n_pred)
    recall = float(np.count_nonzero(dist_to_pred[gt_b] <= radius) / n_gt)
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate_sequence(
    preds: list[MaskMap],
    gts: list[MaskMap],
    objects: list[int],
    exclude: set[int] | None = None,
) -> EvalReport:
    """Score every (frame, object) pair and aggregate uniform means.

    Frames listed in `exclude` (typically the annotated references) are left
    out of both the per-frame list and the means.
    """
    if len(preds) != len(gts):
        raise ValueError(
            f"prediction count {len(preds)} does not match ground truth {len(gts)}"
        )
    if not objects:
        raise ValueError("no object labels to evaluate")
    exclude = exclude or set()
    scores = []
    for i, (pred, gt) in enumerate(zip(preds, gts)):
        if i in exclude:
            continue
        for obj in objects:
            scores.append(
                FrameScore(
                    frame=i,
                    object=int(obj),
                    jaccard=jaccard(pred, gt, obj),
                    boundary_f=boundary_f(pred, gt, obj),
                )
            )
    if not scores:
        raise ValueError("no (frame, object) pairs left to evaluate")
    mean_j = float(np.mean([s.jaccard for s in scores]))
    mean_f = float(np.mean([s.boundary_f for s in scores]))
    return EvalReport(
        per_frame=scores,
        mean_j=mean_j,
        mean_f=mean_f,
        j_and_f=(mean_j + mean_f) / 2.0,
    )
