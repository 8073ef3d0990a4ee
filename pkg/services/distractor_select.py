"""
Distractor Selection

Per-frame training examples: hard negatives (consistent, static detections),
negatives (far from every positive) and motion-gated positives, assembled
into one LabelMap.
"""
import logging
from typing import Sequence, Tuple

import numpy as np

from models.config import SelectionConfig
from models.flow import MotionMask
from models.masks import BinaryMask
from models.proposals import FrameProposals
from models.selection import ConsistencyVerdict, Label, LabelMap, LabelMode
from services.exceptions import DimensionMismatchError, SelectionError
from services.mask_core import erode, overlap_ratio, squared_distance_transform

logger = logging.getLogger(__name__)


def _check_dims(*masks: BinaryMask) -> None:
    shapes = {m.shape for m in masks}
    if len(shapes) > 1:
        raise DimensionMismatchError(f"masks disagree on frame size: {sorted(shapes)}")


def select_hard_negatives(
    fp: FrameProposals,
    motion: MotionMask,
    verdicts: Sequence[ConsistencyVerdict],
    cfg: SelectionConfig,
) -> BinaryMask:
    """
    Union of consistent proposals barely covered by motion

    Args:
        fp: Score-filtered proposals of the current frame
        motion: Current-frame motion mask
        verdicts: One ConsistencyVerdict per proposal, same order
        cfg: Uses T1 (strict upper bound on overlap_ratio with motion)

    Raises:
        SelectionError: verdicts and proposals are misaligned
    """
    if len(verdicts) != len(fp.proposals):
        raise SelectionError(
            f"frame {fp.frame_index}: {len(verdicts)} verdicts for {len(fp.proposals)} proposals"
        )
    bits = np.zeros(motion.mask.shape, dtype=bool)
    for i, (proposal, verdict) in enumerate(zip(fp.proposals, verdicts)):
        _check_dims(proposal.mask, motion.mask)
        if not verdict.consistent:
            continue
        ratio = overlap_ratio(proposal.mask, motion.mask)
        if ratio < cfg.t1:
            logger.debug("Frame %d proposal %d: hard negative (motion overlap %.3f)", fp.frame_index, i, ratio)
            bits |= proposal.mask.bits
    return BinaryMask(bits=bits)


def select_negatives(pos: BinaryMask, d: float) -> BinaryMask:
    """Pixels farther than d from every positive; empty when there are no positives"""
    if d <= 0:
        raise ValueError(f"d must be > 0, got {d}")
    if pos.is_empty():
        return BinaryMask.empty(pos.width, pos.height)
    # integer squared distances against d²; no sqrt
    return BinaryMask(bits=squared_distance_transform(pos) > d * d)


def select_positives(
    prev_pred: BinaryMask,
    motion: MotionMask,
    erosion_radius: int,
    fuse_motion: bool = True,
) -> Tuple[BinaryMask, LabelMode]:
    """
    Motion-gated eroded previous prediction

    Args:
        prev_pred: Prediction (or stand-in) of frame t-1
        motion: Motion mask of frame t
        erosion_radius: Disk radius for the erosion
        fuse_motion: When false, the eroded prediction alone is used

    Returns:
        (positives, mode); an empty result switches the frame to one_shot
    """
    _check_dims(prev_pred, motion.mask)
    eroded = erode(prev_pred, erosion_radius)
    bits = eroded.bits & motion.mask.bits if fuse_motion else eroded.bits
    if not bits.any():
        return BinaryMask.empty(prev_pred.width, prev_pred.height), LabelMode.ONE_SHOT
    return BinaryMask(bits=bits), LabelMode.ADAPT


def assemble_labels(
    pos: BinaryMask,
    neg: BinaryMask,
    hardneg: BinaryMask,
    mode: LabelMode,
) -> LabelMap:
    """Priority positive > hard_negative > negative > unlabeled; one_shot frames are entirely unlabeled"""
    _check_dims(pos, neg, hardneg)
    labels = np.full(pos.shape, int(Label.UNLABELED), dtype=np.uint8)
    if mode == LabelMode.ADAPT:
        labels[neg.bits] = int(Label.NEGATIVE)
        labels[hardneg.bits] = int(Label.HARD_NEGATIVE)
        labels[pos.bits] = int(Label.POSITIVE)
    return LabelMap(labels=labels, mode=mode)
