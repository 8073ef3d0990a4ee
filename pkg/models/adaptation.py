"""
Adaptation Models

Probability maps, loss breakdowns and the per-frame plan handed to a trainer
"""
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .selection import LabelMode

PROB_EPS = 1e-7


class ProbMap(BaseModel):
    """Foreground probabilities, clamped to [eps, 1 - eps] on construction"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: np.ndarray

    @field_validator("p", mode="before")
    @classmethod
    def _clamp(cls, value):
        arr = np.array(value, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"probability map must be a non-empty 2-D raster, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("probability map contains non-finite values")
        arr = np.clip(arr, PROB_EPS, 1.0 - PROB_EPS)
        arr.flags.writeable = False
        return arr

    @property
    def width(self) -> int:
        return int(self.p.shape[1])

    @property
    def height(self) -> int:
        return int(self.p.shape[0])


class PixelLoss(BaseModel):
    """Mean cross-entropy over a region; empty regions are 0 and flagged"""
    value: float = Field(..., ge=0.0)
    empty: bool = False
    count: int = Field(0, ge=0)


class LossBreakdown(BaseModel):
    """Loss terms of the current-frame and joint objectives"""
    L_hn: float = 0.0
    L_n: float = 0.0
    L_pos: float = 0.0
    L_curr: float = 0.0
    L_ff: Optional[float] = None
    L_total: Optional[float] = None
    lambda_: float = Field(0.0, alias="lambda")
    pixel_counts: Dict[str, int] = Field(default_factory=dict)
    empty_classes: List[str] = Field(default_factory=list)

    model_config = ConfigDict(populate_by_name=True)


class LossGradient(BaseModel):
    """dL_total/dp for the current frame and, when supplied, the first frame"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    current: np.ndarray
    first_frame: Optional[np.ndarray] = None


# ============================================================================
# ADAPTATION PLAN
# ============================================================================

class FramePlan(BaseModel):
    """Training directive for one frame"""
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    frame_index: int = Field(..., ge=1)
    mode: LabelMode
    lambda_: float = Field(..., ge=0.0, le=1.0, alias="lambda")
    alpha: float = Field(..., ge=0.0, le=1.0)
    iterations: int = Field(..., ge=1)
    first_frame_sample_prob: float = Field(..., ge=0.0, le=1.0)
    label_map_path: Optional[str] = None
    pseudo_gt_path: str

    @model_validator(mode="after")
    def _check_mode(self):
        if self.mode == LabelMode.ONE_SHOT and self.label_map_path is not None:
            raise ValueError("one_shot frames carry no label map")
        return self


class AdaptationPlan(BaseModel):
    """Sequence-level plan; one record per frame >= 1"""
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    sequence: str
    alpha: float = Field(..., ge=0.0, le=1.0)
    frames: List[FramePlan] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_alpha(self):
        if any(record.alpha != self.alpha for record in self.frames):
            raise ValueError("alpha must be fixed across frames")
        return self
