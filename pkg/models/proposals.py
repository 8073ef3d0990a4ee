"""
Proposal Models

Detector outputs (instance or semantic) for one frame
"""
from typing import List

from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .masks import BinaryMask, BBox


class ProposalSource(str, Enum):
    """Which segmentation network produced the masks"""
    INSTANCE = "instance"
    SEMANTIC = "semantic"


FOREGROUND_CATEGORY = 1


class InstanceProposal(BaseModel):
    """One detection: mask, box, confidence and category"""
    model_config = ConfigDict(frozen=True)

    mask: BinaryMask
    box: BBox
    score: float = Field(..., ge=0.0, le=1.0, description="Detector confidence")
    category: int = Field(..., description="Detector category id")


class FrameProposals(BaseModel):
    """All proposals of one frame"""
    model_config = ConfigDict(frozen=True)

    frame_index: int = Field(..., ge=0)
    proposals: List[InstanceProposal] = Field(default_factory=list)
    source: ProposalSource = ProposalSource.INSTANCE

    @model_validator(mode="after")
    def _check_dims(self):
        shapes = {p.mask.shape for p in self.proposals}
        if len(shapes) > 1:
            raise ValueError(f"proposal masks disagree on frame size: {sorted(shapes)}")
        return self

    def __len__(self) -> int:
        return len(self.proposals)


# ============================================================================
# WIRE FORMAT
# ============================================================================

class ProposalRecord(BaseModel):
    """One JSON line of a proposals/<frame>.jsonl file"""
    model_config = ConfigDict(extra="forbid")

    category: int
    score: float = Field(..., ge=0.0, le=1.0)
    bbox: List[int] = Field(..., min_length=4, max_length=4)
    rle: List[int]
    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)
