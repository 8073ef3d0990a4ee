"""
Mask Core

Binary-mask algebra and geometry: set operations, overlap statistics,
disk morphology, exact Euclidean distance transform and the run-length codec.
All functions are pure; inputs are never modified.
"""
from functools import lru_cache
from typing import Iterable, List, Sequence, Union

import numpy as np
from pycocotools import mask as coco_mask
from scipy import ndimage

from models.masks import BBox, BinaryMask
from services.exceptions import DimensionMismatchError, EmptyMaskError, FormatError

Region = Union[BinaryMask, BBox]


def _check_same(a: BinaryMask, b: BinaryMask) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"mask sizes differ: {a.width}x{a.height} vs {b.width}x{b.height}")


# ============================================================================
# OVERLAP STATISTICS
# ============================================================================

def iou(a: Region, b: Region) -> float:
    """
    Intersection over union of two masks or two boxes

    Returns 0.0 when the union is empty.
    """
    if isinstance(a, BBox) and isinstance(b, BBox):
        iw = min(a.x2, b.x2) - max(a.x, b.x)
        ih = min(a.y2, b.y2) - max(a.y, b.y)
        inter = max(0, iw) * max(0, ih)
        union = a.area + b.area - inter
        return inter / union if union else 0.0
    if isinstance(a, BinaryMask) and isinstance(b, BinaryMask):
        _check_same(a, b)
        inter = np.count_nonzero(a.bits & b.bits)
        union = np.count_nonzero(a.bits | b.bits)
        return inter / union if union else 0.0
    raise TypeError("iou needs two masks or two boxes")


def overlap_ratio(inner: BinaryMask, cover: BinaryMask) -> float:
    """|inner ∩ cover| / |inner|"""
    _check_same(inner, cover)
    area = inner.area
    if area == 0:
        raise EmptyMaskError("overlap_ratio needs a non-empty inner mask")
    return np.count_nonzero(inner.bits & cover.bits) / area


def union_all(masks: Sequence[BinaryMask]) -> BinaryMask:
    """Pixel-wise OR of a non-empty list of equally sized masks"""
    masks = list(masks)
    if not masks:
        raise EmptyMaskError("union_all needs at least one mask")
    first = masks[0]
    bits = first.bits.copy()
    for m in masks[1:]:
        _check_same(first, m)
        bits |= m.bits
    return BinaryMask(bits=bits)


def is_subset(a: BinaryMask, b: BinaryMask) -> bool:
    _check_same(a, b)
    return not np.any(a.bits & ~b.bits)


# ============================================================================
# MORPHOLOGY
# ============================================================================

@lru_cache(maxsize=64)
def disk(radius: int) -> np.ndarray:
    """Euclidean disk {dx² + dy² <= r²} as a (2r+1)² boolean structuring element"""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    r = np.arange(-radius, radius + 1)
    element = (r[:, None] ** 2 + r[None, :] ** 2) <= radius * radius
    element.flags.writeable = False
    return element


def erode(m: BinaryMask, radius: int) -> BinaryMask:
    """Keep a pixel iff every disk neighbour is foreground; outside the frame counts as background"""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return m
    bits = ndimage.binary_erosion(m.bits, structure=disk(radius), border_value=0)
    return BinaryMask(bits=bits)


def dilate(m: BinaryMask, radius: int) -> BinaryMask:
    """Dual of erode"""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return m
    bits = ndimage.binary_dilation(m.bits, structure=disk(radius))
    return BinaryMask(bits=bits)


# ============================================================================
# DISTANCE TRANSFORM
# ============================================================================

def squared_distance_transform(pos: BinaryMask) -> np.ndarray:
    """Exact squared Euclidean distance to the nearest foreground pixel (integers, inf when pos is empty)"""
    if not pos.bits.any():
        return np.full(pos.bits.shape, np.inf)
    nearest_y, nearest_x = ndimage.distance_transform_edt(~pos.bits, return_distances=False, return_indices=True)
    ys, xs = np.indices(pos.bits.shape)
    # from the nearest-site indices, so the squares stay exact integers
    return ((nearest_y - ys) ** 2 + (nearest_x - xs) ** 2).astype(np.float64)


def distance_transform(pos: BinaryMask) -> np.ndarray:
    """
    Exact Euclidean distance from every pixel to the nearest foreground pixel of pos

    Foreground pixels are 0. An empty pos yields an all-inf map.
    """
    return np.sqrt(squared_distance_transform(pos))


# ============================================================================
# RUN-LENGTH CODEC
# ============================================================================

def rle_encode(m: BinaryMask) -> List[int]:
    """Column-major alternating run lengths, starting with a (possibly empty) background run"""
    flat = m.bits.ravel(order="F").astype(np.int8)
    changes = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate(([0], changes, [flat.size]))
    counts = np.diff(bounds).tolist()
    if flat.size and flat[0] == 1:
        counts.insert(0, 0)
    return [int(c) for c in counts]


def rle_decode(counts: Iterable[int], width: int, height: int) -> BinaryMask:
    """Inverse of rle_encode; counts are COCO uncompressed RLE"""
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise FormatError("run lengths must be non-negative")
    if sum(counts) != width * height:
        raise FormatError(f"run lengths sum to {sum(counts)}, expected {width * height}")
    rle = coco_mask.frPyObjects({"counts": counts, "size": [height, width]}, height, width)
    return BinaryMask(bits=coco_mask.decode(rle).astype(bool))


def bbox_of(m: BinaryMask) -> BBox:
    """Tightest box enclosing the foreground"""
    ys, xs = np.nonzero(m.bits)
    if ys.size == 0:
        raise EmptyMaskError("bbox_of needs a non-empty mask")
    x0, y0 = int(xs.min()), int(ys.min())
    return BBox(x=x0, y=y0, w=int(xs.max()) - x0 + 1, h=int(ys.max()) - y0 + 1)


def boundary(m: BinaryMask) -> BinaryMask:
    """Foreground pixels with a background 4-neighbour or on the frame edge"""
    padded = np.pad(m.bits, 1, constant_values=False)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    return BinaryMask(bits=m.bits & ~interior)
