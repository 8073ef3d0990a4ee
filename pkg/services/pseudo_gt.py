"""
Pseudo Ground Truth

Fuses first-frame proposals with the motion mask: every proposal whose
overlap ratio with M strictly exceeds T joins one foreground mask.
"""
import logging
from typing import List

from models.flow import MotionMask
from models.proposals import FrameProposals
from models.selection import PseudoGroundTruth
from services.exceptions import DimensionMismatchError, NoForegroundFound
from services.mask_core import overlap_ratio, union_all

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


def generate_pseudo_gt(
    fp: FrameProposals,
    motion: MotionMask,
    T: float = DEFAULT_THRESHOLD,
) -> PseudoGroundTruth:
    """
    Select and group moving proposals

    Args:
        fp: Score-filtered, class-agnostic first-frame proposals
        motion: First-frame motion mask
        T: Overlap threshold in [0, 1); the comparison is strict

    Raises:
        NoForegroundFound: no proposal passes T (or there are no proposals)
        DimensionMismatchError: proposal and motion sizes differ
    """
    if not 0.0 <= T < 1.0:
        raise ValueError(f"T must lie in [0, 1), got {T}")
    if not fp.proposals:
        raise NoForegroundFound(f"frame {fp.frame_index}: no proposals survive score filtering")

    selected: List[int] = []
    for i, proposal in enumerate(fp.proposals):
        if proposal.mask.shape != motion.mask.shape:
            raise DimensionMismatchError(
                f"frame {fp.frame_index}: proposal {i} is {proposal.mask.width}x{proposal.mask.height}, "
                f"motion mask is {motion.width}x{motion.height}"
            )
        ratio = overlap_ratio(proposal.mask, motion.mask)
        logger.debug("Frame %d proposal %d: motion overlap %.4f (T=%.3f)", fp.frame_index, i, ratio, T)
        if ratio > T:
            selected.append(i)

    if not selected:
        raise NoForegroundFound(
            f"frame {fp.frame_index}: no proposal overlaps the motion mask by more than T={T}"
        )

    mask = union_all([fp.proposals[i].mask for i in selected])
    logger.info(
        "Pseudo-GT frame %d: %d of %d proposals selected, %d px",
        fp.frame_index, len(selected), len(fp.proposals), mask.area,
    )
    return PseudoGroundTruth(mask=mask, selected_indices=selected, threshold_used=T)
