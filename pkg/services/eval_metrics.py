"""
Evaluation Metrics

Region similarity J (Jaccard) and contour similarity F (boundary F-measure
under a pixel tolerance), per frame and as sequence means.
"""
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from models.masks import BinaryMask, FrameDims
from models.metrics import FrameScore, SequenceReport
from services.exceptions import DimensionMismatchError
from services.mask_core import boundary, dilate, iou, union_all

logger = logging.getLogger(__name__)

__all__ = [
    "jaccard", "boundary", "f_measure", "default_tolerance",
    "merge_instances", "score_frame", "sequence_report", "report_to_dict",
]

TOLERANCE_FRACTION = 0.008


def jaccard(pred: BinaryMask, gt: BinaryMask) -> float:
    """|P ∩ G| / |P ∪ G|; two empty masks agree perfectly"""
    if pred.shape != gt.shape:
        raise DimensionMismatchError(f"prediction is {pred.width}x{pred.height}, ground truth is {gt.width}x{gt.height}")
    if pred.is_empty() and gt.is_empty():
        return 1.0
    return iou(pred, gt)


def f_measure(pred: BinaryMask, gt: BinaryMask, tol: int) -> float:
    """
    Boundary F-measure

    A boundary pixel of one mask is matched when the other mask's boundary,
    dilated by a disk of radius tol, covers it.

    Args:
        pred: Predicted mask
        gt: Ground-truth mask
        tol: Match tolerance in pixels

    Returns:
        2PR / (P + R); 1.0 when both boundaries are empty, 0.0 when P + R = 0
    """
    if pred.shape != gt.shape:
        raise DimensionMismatchError(f"prediction is {pred.width}x{pred.height}, ground truth is {gt.width}x{gt.height}")
    if tol < 0:
        raise ValueError(f"tol must be >= 0, got {tol}")
    b_pred, b_gt = boundary(pred), boundary(gt)
    n_pred, n_gt = b_pred.area, b_gt.area
    if n_pred == 0 and n_gt == 0:
        return 1.0
    if n_pred == 0 or n_gt == 0:
        return 0.0

    precision = np.count_nonzero(b_pred.bits & dilate(b_gt, tol).bits) / n_pred
    recall = np.count_nonzero(b_gt.bits & dilate(b_pred, tol).bits) / n_gt
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def default_tolerance(dims: FrameDims) -> int:
    """max(1, round(0.008 * frame diagonal))"""
    return max(1, int(round(TOLERANCE_FRACTION * dims.diagonal)))


def merge_instances(instances: Sequence[BinaryMask]) -> BinaryMask:
    """One binary ground-truth mask from per-instance masks"""
    return union_all(instances)


def score_frame(pred: BinaryMask, gt: BinaryMask, tol: int, frame_index: int) -> FrameScore:
    return FrameScore(frame_index=frame_index, j=jaccard(pred, gt), f=f_measure(pred, gt, tol))


def sequence_report(
    preds: Sequence[BinaryMask],
    gts: Sequence[BinaryMask],
    tol: Optional[int] = None,
    exclude_endpoints: bool = True,
    indices: Optional[Sequence[int]] = None,
    sequence: str = "",
) -> SequenceReport:
    """
    Per-frame J/F and sequence means

    Args:
        preds: Predicted masks, aligned with gts
        gts: Ground-truth masks
        tol: Boundary tolerance; defaults to default_tolerance of the frame size
        exclude_endpoints: Leave the first and last frame out of the means
        indices: Frame index of each pair; defaults to 0..n-1
        sequence: Name recorded on the report

    Raises:
        ValueError: misaligned inputs, or fewer than 3 frames with exclude_endpoints
    """
    if len(preds) != len(gts):
        raise ValueError(f"{len(preds)} predictions for {len(gts)} ground-truth frames")
    if indices is None:
        indices = list(range(len(preds)))
    if len(indices) != len(preds):
        raise ValueError("indices must align with the masks")
    if not preds:
        raise ValueError("nothing to evaluate")
    if exclude_endpoints and len(preds) < 3:
        raise ValueError("excluding endpoints needs at least 3 frames")

    if tol is None:
        tol = default_tolerance(FrameDims(width=gts[0].width, height=gts[0].height))

    frames: List[FrameScore] = [
        score_frame(pred, gt, tol, index) for pred, gt, index in zip(preds, gts, indices)
    ]
    counted = frames[1:-1] if exclude_endpoints else frames
    j_mean = float(np.mean([s.j for s in counted]))
    f_mean = float(np.mean([s.f for s in counted]))
    logger.info("Sequence %s: J=%.4f F=%.4f over %d frames", sequence or "?", j_mean, f_mean, len(counted))
    return SequenceReport(sequence=sequence, frames=frames, j_mean=j_mean, f_mean=f_mean)


def report_to_dict(report: SequenceReport) -> Dict:
    """metrics.json form: {sequence, j_mean, f_mean, frames: [{index, j, f}]}"""
    return report.model_dump(mode="json", by_alias=True, exclude_none=True)
