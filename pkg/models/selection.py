"""
Selection Models

Pseudo ground truth, tracklet matching results and per-frame label maps
"""
from typing import List, Tuple

from enum import Enum, IntEnum
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .masks import BinaryMask, BBox


# ============================================================================
# PSEUDO GROUND TRUTH
# ============================================================================

class PseudoGroundTruth(BaseModel):
    """First-frame foreground fused from proposals and motion"""
    model_config = ConfigDict(frozen=True)

    mask: BinaryMask
    selected_indices: List[int] = Field(default_factory=list)
    threshold_used: float = Field(..., ge=0.0, lt=1.0, description="Overlap threshold T")


# ============================================================================
# TRACKLETS
# ============================================================================

class GrayFrame(BaseModel):
    """8-bit luminance image, shape (height, width)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    intensity: np.ndarray

    @field_validator("intensity", mode="before")
    @classmethod
    def _check_intensity(cls, value):
        arr = np.asarray(value)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"frame must be a non-empty 2-D raster, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("luminance must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = arr.copy()
        arr.flags.writeable = False
        return arr

    @property
    def width(self) -> int:
        return int(self.intensity.shape[1])

    @property
    def height(self) -> int:
        return int(self.intensity.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayFrame):
            return NotImplemented
        return bool(np.array_equal(self.intensity, other.intensity))

    def __hash__(self) -> int:
        return hash((self.intensity.shape, self.intensity.tobytes()))


class MatchResult(BaseModel):
    """Best placement of a query block inside a search window"""
    model_config = ConfigDict(frozen=True)

    matched_box: BBox
    displacement: Tuple[int, int]
    cost: float = Field(..., ge=0.0, description="Mean absolute intensity difference")


class ConsistencyVerdict(BaseModel):
    """Whether a detection is re-found in every one of the previous k frames"""
    model_config = ConfigDict(frozen=True)

    consistent: bool
    per_frame_iou: List[float] = Field(default_factory=list)


# ============================================================================
# LABEL MAPS
# ============================================================================

class Label(IntEnum):
    """Per-pixel training label; values double as PGM codes"""
    UNLABELED = 0
    NEGATIVE = 64
    HARD_NEGATIVE = 128
    POSITIVE = 255


class LabelMode(str, Enum):
    """adapt: online adaptation on this frame; one_shot: first-frame-only finetuning"""
    ADAPT = "adapt"
    ONE_SHOT = "one_shot"


class LabelMap(BaseModel):
    """Training labels of one frame"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    labels: np.ndarray = Field(..., description="uint8 raster of Label codes")
    mode: LabelMode = LabelMode.ADAPT

    @field_validator("labels", mode="before")
    @classmethod
    def _check_labels(cls, value):
        arr = np.asarray(value)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"label map must be a non-empty 2-D raster, got shape {arr.shape}")
        valid = np.isin(arr, [int(label) for label in Label])
        if not valid.all():
            raise ValueError("label map contains codes outside {0, 64, 128, 255}")
        arr = arr.astype(np.uint8, copy=True)
        arr.flags.writeable = False
        return arr

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])

    def region(self, label: Label) -> BinaryMask:
        return BinaryMask(bits=self.labels == int(label))

    def counts(self) -> dict:
        return {label.name.lower(): int(np.count_nonzero(self.labels == int(label))) for label in Label}

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelMap):
            return NotImplemented
        return self.mode == other.mode and bool(np.array_equal(self.labels, other.labels))

    def __hash__(self) -> int:
        return hash((self.mode, self.labels.tobytes()))
