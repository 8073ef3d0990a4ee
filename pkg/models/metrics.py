"""
Metric Models

Region similarity J and contour similarity F reports
"""
from typing import List, Optional

from pydantic import BaseModel, Field


class FrameScore(BaseModel):
    """J and F of one frame"""
    frame_index: int = Field(..., ge=0, serialization_alias="index")
    j: float = Field(..., ge=0.0, le=1.0)
    f: float = Field(..., ge=0.0, le=1.0)


class SequenceReport(BaseModel):
    """Per-frame scores and sequence means"""
    sequence: str = ""
    frames: List[FrameScore] = Field(default_factory=list)
    j_mean: float = Field(..., ge=0.0, le=1.0)
    f_mean: float = Field(..., ge=0.0, le=1.0)
    pseudo_gt_j: Optional[float] = Field(None, ge=0.0, le=1.0, description="J of the pseudo-GT against frame-0 ground truth")
