"""
Tracklet

Exhaustive block matching of detection boxes into previous frames and the
consistent-object test used to qualify hard negatives.
"""
import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from models.masks import BBox, FrameDims
from models.proposals import FrameProposals, InstanceProposal
from models.selection import ConsistencyVerdict, GrayFrame, MatchResult
from services.exceptions import DimensionMismatchError, SelectionError
from services.mask_core import iou

logger = logging.getLogger(__name__)

GROWTH_PER_FRAME = 20

History = Sequence[Tuple[GrayFrame, FrameProposals]]


def enlarge_box(b: BBox, k_back: int, frame_dims: Union[FrameDims, Tuple[int, int]]) -> BBox:
    """Grow by 20 * k_back pixels on every side, clamped to the frame"""
    if k_back < 1:
        raise ValueError(f"k_back must be >= 1, got {k_back}")
    dims = FrameDims.model_validate(frame_dims)
    grow = GROWTH_PER_FRAME * k_back
    x0, y0 = max(0, b.x - grow), max(0, b.y - grow)
    x1, y1 = min(dims.width, b.x2 + grow), min(dims.height, b.y2 + grow)
    return BBox(x=x0, y=y0, w=x1 - x0, h=y1 - y0)


def block_match(
    query_box: BBox,
    query_frame: GrayFrame,
    target_frame: GrayFrame,
    search_window: BBox,
) -> MatchResult:
    """
    Minimum mean-absolute-difference placement of the query block inside the window

    Every integer placement of a query-box-sized block that lies fully inside
    search_window is scored. Equal costs resolve to the smaller squared
    displacement, then to the earlier placement in row-major order.

    Raises:
        SelectionError: box outside its frame, window outside the target frame,
            or window smaller than the block
    """
    if not query_box.fits(query_frame.width, query_frame.height):
        raise SelectionError(f"query box {query_box.to_list()} lies outside the query frame")
    if not search_window.fits(target_frame.width, target_frame.height):
        raise SelectionError(f"search window {search_window.to_list()} lies outside the target frame")
    if search_window.w < query_box.w or search_window.h < query_box.h:
        raise SelectionError(
            f"search window {search_window.w}x{search_window.h} is smaller than the "
            f"{query_box.w}x{query_box.h} block"
        )

    block = query_frame.intensity[query_box.y:query_box.y2, query_box.x:query_box.x2].astype(np.int32)
    region = target_frame.intensity[search_window.y:search_window.y2, search_window.x:search_window.x2].astype(np.int32)
    h, w = block.shape
    ny, nx = region.shape[0] - h + 1, region.shape[1] - w + 1

    sad = np.empty((ny, nx), dtype=np.int64)
    for row in range(ny):
        windows = sliding_window_view(region[row:row + h], (h, w))[0]
        sad[row] = np.abs(windows - block).sum(axis=(1, 2))

    best = sad.min()
    rows, cols = np.nonzero(sad == best)
    dx = search_window.x + cols - query_box.x
    dy = search_window.y + rows - query_box.y
    # lexsort keys: last is primary
    pick = np.lexsort((cols, rows, dx * dx + dy * dy))[0]

    matched = BBox(x=search_window.x + int(cols[pick]), y=search_window.y + int(rows[pick]), w=w, h=h)
    return MatchResult(
        matched_box=matched,
        displacement=(int(dx[pick]), int(dy[pick])),
        cost=float(best) / (h * w),
    )


def check_consistency(
    det: InstanceProposal,
    history: History,
    current: GrayFrame,
    T2: float,
) -> ConsistencyVerdict:
    """
    Test whether a detection is re-found in each previous frame

    Args:
        det: Detection in the current frame
        history: (frame, proposals) for frames t-1, t-2, ..., t-k in that order
        current: The current frame
        T2: IoU floor; consistent iff the minimum per-frame IoU reaches it

    Raises:
        SelectionError: empty history
    """
    if not history:
        raise SelectionError("consistency check needs at least one previous frame")
    if not 0.0 < T2 <= 1.0:
        raise ValueError(f"T2 must lie in (0, 1], got {T2}")

    dims = FrameDims(width=current.width, height=current.height)
    per_frame: List[float] = []
    for j, (frame, proposals) in enumerate(history, start=1):
        if (frame.width, frame.height) != (dims.width, dims.height):
            raise DimensionMismatchError(f"history frame t-{j} differs in size from the current frame")
        window = enlarge_box(det.box, j, dims)
        match = block_match(det.box, current, frame, window)
        best = max((iou(match.matched_box, p.box) for p in proposals.proposals), default=0.0)
        per_frame.append(best)

    consistent = min(per_frame) >= T2
    logger.debug("Detection %s: per-frame IoU %s -> consistent=%s", det.box.to_list(), per_frame, consistent)
    return ConsistencyVerdict(consistent=consistent, per_frame_iou=per_frame)
