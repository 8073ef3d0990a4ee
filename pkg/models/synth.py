"""
Synthetic Scene Models

Scene descriptions for the generator and the manifest it writes
"""
from typing import List, Optional, Tuple

from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .masks import FrameDims


class Shape(str, Enum):
    RECT = "rect"
    ELLIPSE = "ellipse"


class ObjectKind(str, Enum):
    TARGET = "target"
    DISTRACTOR = "distractor"
    FALSE_POSITIVE = "false_positive"


class TargetSpec(BaseModel):
    """The primary moving object"""
    model_config = ConfigDict(extra="forbid")

    shape: Shape = Shape.RECT
    size: Tuple[int, int] = Field((20, 20), description="(w, h) in pixels")
    start: Tuple[int, int] = Field((8, 8), description="(x, y) of the top-left corner in frame 0")
    velocity: Tuple[int, int] = Field((3, 0), description="Integer (dx, dy) per frame")
    category: int = 1
    texture_seed: int = 7


class DistractorSpec(BaseModel):
    """A background object; static ones are the planted hard negatives"""
    model_config = ConfigDict(extra="forbid")

    shape: Shape = Shape.RECT
    size: Tuple[int, int] = (24, 24)
    position: Tuple[int, int] = Field(..., description="(x, y) of the top-left corner in frame 0")
    static: bool = Field(True, description="A moving distractor is foreground: it is drawn into gt/ alongside the target")
    velocity: Tuple[int, int] = Field((0, 0), description="Used only when static is false")
    category: int = 2
    similar_appearance: bool = Field(False, description="Reuse the target's texture")
    texture_seed: Optional[int] = None


class DetectorNoise(BaseModel):
    """How synthetic proposals deviate from the true object masks"""
    model_config = ConfigDict(extra="forbid")

    boundary_jitter: int = Field(2, ge=0, description="Width in px of the band where boundary pixels flip")
    score_range: Tuple[float, float] = (0.85, 1.0)
    false_positive_rate: float = Field(0.2, ge=0.0, le=1.0, description="Probability of one spurious proposal per frame")

    @model_validator(mode="after")
    def _check_scores(self):
        lo, hi = self.score_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"score_range must satisfy 0 <= lo <= hi <= 1, got {self.score_range}")
        return self


class SceneSpec(BaseModel):
    """A complete synthetic sequence description; seed fixes every output byte"""
    model_config = ConfigDict(extra="forbid")

    name: str = "synthetic"
    frame_dims: FrameDims = Field(default_factory=lambda: FrameDims(width=128, height=96))
    n_frames: int = Field(8, ge=2)
    target: TargetSpec = Field(default_factory=TargetSpec)
    distractors: List[DistractorSpec] = Field(default_factory=list)
    noise: DetectorNoise = Field(default_factory=DetectorNoise)
    seed: int = 0

    @model_validator(mode="after")
    def _check_inside(self):
        width, height = self.frame_dims.width, self.frame_dims.height
        movers = [("target", self.target.start, self.target.size, self.target.velocity)]
        for i, d in enumerate(self.distractors):
            velocity = (0, 0) if d.static else d.velocity
            movers.append((f"distractor {i}", d.position, d.size, velocity))
        for name, (x, y), (w, h), (vx, vy) in movers:
            for t in (0, self.n_frames - 1):
                px, py = x + vx * t, y + vy * t
                if px < 0 or py < 0 or px + w > width or py + h > height:
                    raise ValueError(f"{name} leaves the frame by frame {t}")
        return self


# ============================================================================
# MANIFEST
# ============================================================================

class ObjectPlacement(BaseModel):
    """Where one object sits in one frame"""
    id: int
    kind: ObjectKind
    shape: Shape
    bbox: List[int] = Field(..., min_length=4, max_length=4)


class FrameManifest(BaseModel):
    index: int
    objects: List[ObjectPlacement] = Field(default_factory=list)
    hard_negatives: List[int] = Field(default_factory=list, description="Ids of planted static distractors")


class SceneManifest(BaseModel):
    """Everything the generator planted, keyed by frame"""
    name: str
    seed: int
    frame_dims: FrameDims
    n_frames: int
    frames: List[FrameManifest] = Field(default_factory=list)


class SelectionScore(BaseModel):
    """Identity-level precision and recall of hard-negative selection"""
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    true_positives: int = 0
    selected: int = 0
    planted: int = 0
