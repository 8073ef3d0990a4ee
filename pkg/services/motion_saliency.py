"""
Motion Saliency

Turns optical-flow fields into the binary motion mask M: camera-motion
compensation by the per-frame median flow vector, normalization, and Otsu
binarization on a 256-bin histogram.
"""
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from models.flow import FlowField, MotionMask
from models.masks import BinaryMask
from services.exceptions import DimensionMismatchError, FormatError
from storage.codecs import decode_flo, encode_flo

logger = logging.getLogger(__name__)

OTSU_BINS = 256
DEFAULT_MIN_AREA_RATIO = 0.001


# ============================================================================
# .FLO I/O
# ============================================================================

def read_flo(path: Union[str, Path]) -> FlowField:
    """
    Read a Middlebury .flo file

    Raises:
        FormatError: missing file, bad magic, truncated payload, non-finite values
    """
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise FormatError(f"missing input: {path}")
    return FlowField(vectors=decode_flo(data))


def write_flo(path: Union[str, Path], flow: FlowField) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(encode_flo(flow.vectors))


# ============================================================================
# OTSU
# ============================================================================

def otsu_threshold(bins: np.ndarray, n_bins: int = OTSU_BINS) -> Optional[int]:
    """
    Otsu threshold over integer bin indices

    Classes are {b <= t} and {b > t} for t in [0, n_bins - 2]; the smallest t
    maximizing the between-class variance wins. Returns None when every
    threshold leaves one class empty.
    """
    hist = np.bincount(bins.ravel(), minlength=n_bins).astype(np.float64)
    total = hist.sum()
    levels = np.arange(n_bins, dtype=np.float64)
    w0 = np.cumsum(hist)[:-1]
    w1 = total - w0
    s0 = np.cumsum(hist * levels)[:-1]
    s1 = (hist * levels).sum() - s0
    valid = (w0 > 0) & (w1 > 0)
    if not valid.any():
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        between = w0 * w1 * (s1 / w1 - s0 / w0) ** 2
    between = np.where(valid, between, -1.0)
    return int(np.argmax(between))


def _residual_magnitude(flow: FlowField) -> np.ndarray:
    median = np.median(flow.vectors.reshape(-1, 2), axis=0)
    residual = flow.vectors - median
    return np.hypot(residual[..., 0], residual[..., 1])


def flow_saliency(
    flow: FlowField,
    min_area_ratio: float = DEFAULT_MIN_AREA_RATIO,
    frame_index: Optional[int] = None,
) -> MotionMask:
    """
    Binary motion mask of one flow field

    Camera motion is removed by subtracting the component-wise median flow
    vector, so a uniform pan yields no foreground.

    Args:
        flow: Forward flow of the frame
        min_area_ratio: Masks covering less than this fraction of the frame are emptied
        frame_index: Recorded on the result

    Returns:
        MotionMask; empty for uniform or zero flow
    """
    if not 0.0 <= min_area_ratio < 1.0:
        raise ValueError(f"min_area_ratio must lie in [0, 1), got {min_area_ratio}")
    empty = MotionMask(mask=BinaryMask.empty(flow.width, flow.height), threshold_used=0.0, frame_index=frame_index)

    residual = _residual_magnitude(flow)
    peak = float(residual.max())
    if peak <= 0.0:
        logger.debug("Frame %s: zero residual motion", frame_index)
        return empty

    normalized = residual / peak
    bins = np.minimum(np.floor(normalized * OTSU_BINS), OTSU_BINS - 1).astype(np.int64)
    t = otsu_threshold(bins)
    if t is None:
        return empty
    bits = bins > t
    threshold = (t + 1) / OTSU_BINS

    area = int(np.count_nonzero(bits))
    if area < min_area_ratio * bits.size:
        logger.info(
            "Frame %s: motion mask of %d px below min_area_ratio %.4f, discarded",
            frame_index, area, min_area_ratio,
        )
        return MotionMask(mask=empty.mask, threshold_used=threshold, frame_index=frame_index)
    return MotionMask(mask=BinaryMask(bits=bits), threshold_used=threshold, frame_index=frame_index)


# ============================================================================
# PROPAGATION
# ============================================================================

def propagate_mask(mask: BinaryMask, flow: FlowField) -> BinaryMask:
    """Forward-warp foreground pixels by their rounded flow vectors; pixels leaving the frame are dropped"""
    if (flow.height, flow.width) != mask.shape:
        raise DimensionMismatchError(
            f"flow is {flow.width}x{flow.height}, mask is {mask.width}x{mask.height}"
        )
    ys, xs = np.nonzero(mask.bits)
    dx = np.rint(flow.u[ys, xs]).astype(np.int64)
    dy = np.rint(flow.v[ys, xs]).astype(np.int64)
    nx, ny = xs + dx, ys + dy
    inside = (nx >= 0) & (nx < mask.width) & (ny >= 0) & (ny < mask.height)
    bits = np.zeros(mask.shape, dtype=bool)
    bits[ny[inside], nx[inside]] = True
    return BinaryMask(bits=bits)

