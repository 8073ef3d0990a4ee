"""
Adaptation

Loss arithmetic of the distractor-aware objective over probability maps and
label maps, its analytic gradient, and the per-frame AdaptationPlan consumed
by an external trainer.

Losses are per-class mean binary cross-entropy:

    L_curr  = lambda * L_hn + (1 - lambda) * L_n + L_pos
    L_total = alpha * L_ff + (1 - alpha) * L_curr
"""
import logging
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from models.adaptation import (
    AdaptationPlan, FramePlan, LossBreakdown, LossGradient, PixelLoss, ProbMap
)
from models.config import PipelineConfig
from models.masks import BinaryMask
from models.selection import Label, LabelMap, LabelMode
from services.exceptions import DimensionMismatchError, SelectionError

logger = logging.getLogger(__name__)


def _check_shape(p: ProbMap, shape) -> None:
    if p.p.shape != tuple(shape):
        raise DimensionMismatchError(f"probability map is {p.p.shape}, labels are {tuple(shape)}")


# ============================================================================
# LOSSES
# ============================================================================

def pixel_loss(p: ProbMap, region: BinaryMask, positive: bool) -> PixelLoss:
    """
    Mean cross-entropy over the region's pixels

    Args:
        p: Foreground probabilities
        region: Pixels to average over
        positive: Target y = 1 when true, y = 0 otherwise

    Returns:
        PixelLoss; an empty region gives value 0 with empty=True
    """
    _check_shape(p, region.shape)
    count = region.area
    if count == 0:
        return PixelLoss(value=0.0, empty=True, count=0)
    values = p.p[region.bits]
    nll = -np.log(values) if positive else -np.log1p(-values)
    return PixelLoss(value=float(nll.sum() / count), empty=False, count=count)


def first_frame_loss(p_ff: ProbMap, first_frame_mask: BinaryMask) -> float:
    """Per-class mean cross-entropy of the first frame against its supervision mask"""
    fg = pixel_loss(p_ff, first_frame_mask, positive=True)
    bg = pixel_loss(p_ff, BinaryMask(bits=~first_frame_mask.bits), positive=False)
    return fg.value + bg.value


def current_frame_loss(p: ProbMap, labels: LabelMap, lambda_: float) -> LossBreakdown:
    """
    Current-frame loss L_curr

    Raises:
        SelectionError: labels are in one_shot mode
    """
    if not 0.0 <= lambda_ <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lambda_}")
    if labels.mode != LabelMode.ADAPT:
        raise SelectionError("one_shot frames have no current-frame loss")
    _check_shape(p, labels.labels.shape)

    hn = pixel_loss(p, labels.region(Label.HARD_NEGATIVE), positive=False)
    n = pixel_loss(p, labels.region(Label.NEGATIVE), positive=False)
    pos = pixel_loss(p, labels.region(Label.POSITIVE), positive=True)
    empty = [name for name, term in (("hard_negative", hn), ("negative", n), ("positive", pos)) if term.empty]
    if empty:
        logger.debug("Empty label classes: %s", empty)

    return LossBreakdown(
        L_hn=hn.value,
        L_n=n.value,
        L_pos=pos.value,
        L_curr=lambda_ * hn.value + (1.0 - lambda_) * n.value + pos.value,
        lambda_=lambda_,
        pixel_counts=labels.counts(),
        empty_classes=empty,
    )


def total_loss(curr: LossBreakdown, ff_loss: float, alpha: float) -> float:
    """alpha * L_ff + (1 - alpha) * L_curr"""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha * ff_loss + (1.0 - alpha) * curr.L_curr


def joint_loss(
    p: ProbMap,
    labels: LabelMap,
    lambda_: float,
    alpha: float,
    p_ff: ProbMap,
    first_frame_mask: BinaryMask,
) -> LossBreakdown:
    """Full breakdown including L_ff and L_total"""
    curr = current_frame_loss(p, labels, lambda_)
    ff = first_frame_loss(p_ff, first_frame_mask)
    return curr.model_copy(update={"L_ff": ff, "L_total": total_loss(curr, ff, alpha)})


# ============================================================================
# GRADIENT
# ============================================================================

def _class_gradient(p: np.ndarray, region: np.ndarray, positive: bool, weight: float) -> np.ndarray:
    grad = np.zeros_like(p)
    count = int(np.count_nonzero(region))
    if count == 0 or weight == 0.0:
        return grad
    values = p[region]
    per_pixel = -1.0 / values if positive else 1.0 / (1.0 - values)
    grad[region] = weight * per_pixel / count
    return grad


def loss_gradient(
    p: ProbMap,
    labels: LabelMap,
    lambda_: float,
    alpha: float,
    p_ff: Optional[ProbMap] = None,
    first_frame_mask: Optional[BinaryMask] = None,
) -> LossGradient:
    """
    Analytic dL_total/dp

    Unlabeled pixels get 0. The first-frame gradient is returned when both
    p_ff and first_frame_mask are given.

    Raises:
        SelectionError: labels are in one_shot mode
    """
    if labels.mode != LabelMode.ADAPT:
        raise SelectionError("one_shot frames have no current-frame gradient")
    _check_shape(p, labels.labels.shape)
    w_curr = 1.0 - alpha
    current = (
        _class_gradient(p.p, labels.labels == int(Label.HARD_NEGATIVE), False, w_curr * lambda_)
        + _class_gradient(p.p, labels.labels == int(Label.NEGATIVE), False, w_curr * (1.0 - lambda_))
        + _class_gradient(p.p, labels.labels == int(Label.POSITIVE), True, w_curr)
    )

    first_frame = None
    if p_ff is not None and first_frame_mask is not None:
        _check_shape(p_ff, first_frame_mask.shape)
        first_frame = (
            _class_gradient(p_ff.p, first_frame_mask.bits, True, alpha)
            + _class_gradient(p_ff.p, ~first_frame_mask.bits, False, alpha)
        )
    return LossGradient(current=current, first_frame=first_frame)


# ============================================================================
# PLAN
# ============================================================================

class FrameSelection(BaseModel):
    """What the selection stage produced for one frame, as the planner sees it"""
    frame_index: int
    mode: LabelMode
    has_hard_negatives: bool
    label_map_path: str


def build_plan(
    selections: Sequence[FrameSelection],
    cfg: PipelineConfig,
    pseudo_gt_path: str,
    sequence: str = "",
) -> AdaptationPlan:
    """
    One training directive per frame >= 1

    lambda is cfg.lambda only where hard negatives exist, else 0; one_shot
    frames carry no label map path.
    """
    records: List[FramePlan] = []
    for sel in sorted(selections, key=lambda s: s.frame_index):
        adapt = sel.mode == LabelMode.ADAPT
        records.append(FramePlan(
            frame_index=sel.frame_index,
            mode=sel.mode,
            lambda_=cfg.lambda_ if (adapt and sel.has_hard_negatives) else 0.0,
            alpha=cfg.alpha,
            iterations=cfg.iterations,
            first_frame_sample_prob=cfg.first_frame_sample_prob,
            label_map_path=sel.label_map_path if adapt else None,
            pseudo_gt_path=pseudo_gt_path,
        ))
    return AdaptationPlan(sequence=sequence, alpha=cfg.alpha, frames=records)


def plan_to_dict(plan: AdaptationPlan) -> dict:
    return plan.model_dump(mode="json", by_alias=True, exclude_none=True)


def plan_from_dict(data: dict) -> AdaptationPlan:
    return AdaptationPlan.model_validate(data)
