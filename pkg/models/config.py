"""
Configuration Models

Selection thresholds, adaptation weights and evaluation settings.
Aliases follow the method's symbols (T1, T2, T, d, lambda) so config files
can use either spelling.
"""
from typing import Optional

from enum import Enum
from pydantic import BaseModel, ConfigDict, Field


class SelectionConfig(BaseModel):
    """Thresholds for pseudo-GT, hard-negative, negative and positive selection"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)

    t1: float = Field(0.2, ge=0.0, le=1.0, alias="T1", description="Motion-overlap ceiling for hard negatives")
    t2: float = Field(0.7, gt=0.0, le=1.0, alias="T2", description="Tracklet IoU floor for consistency")
    k: int = Field(3, ge=1, description="Number of previous frames matched")
    score_min: float = Field(0.8, ge=0.0, le=1.0, description="Detection confidence floor for hard-negative candidates")
    erosion_radius: int = Field(5, ge=0, description="Disk radius applied to the previous prediction")
    neg_distance: Optional[float] = Field(
        None, gt=0.0, alias="d",
        description="Negative distance threshold; defaults to round(0.15 * frame diagonal)",
    )
    pgt_threshold: float = Field(0.5, ge=0.0, lt=1.0, alias="T", description="Pseudo-GT overlap threshold")

    def negative_distance(self, width: int, height: int) -> float:
        """Resolved d for a frame of the given size"""
        if self.neg_distance is not None:
            return float(self.neg_distance)
        return float(max(1, round(0.15 * float((width ** 2 + height ** 2) ** 0.5))))


class EvalConfig(BaseModel):
    """Region/contour evaluation settings"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    enabled: bool = True
    tol: Optional[int] = Field(None, ge=0, description="Boundary tolerance override in pixels")
    exclude_endpoints: bool = Field(True, description="Drop first and last frame from sequence means")


class FirstFrameMask(str, Enum):
    """Supervision mask used for the first-frame loss"""
    PSEUDO_GT = "pseudo_gt"
    ERODED = "eroded"
    DILATED = "dilated"
    GROUND_TRUTH = "ground_truth"


class PipelineConfig(SelectionConfig):
    """Everything `doa run` reads from its config file"""

    lambda_: float = Field(0.8, ge=0.0, le=1.0, alias="lambda", description="Hard-negative weight when hard negatives exist")
    alpha: float = Field(0.95, ge=0.0, le=1.0, description="First-frame loss weight")
    iterations: int = Field(15, ge=1, description="Finetuning iterations per frame")
    first_frame_sample_prob: float = Field(0.95, ge=0.0, le=1.0)
    min_area_ratio: float = Field(0.001, ge=0.0, lt=1.0, description="Motion masks smaller than this fraction are discarded")
    pseudo_gt_score_min: float = Field(0.8, ge=0.0, le=1.0, description="Confidence floor applied before pseudo-GT fusion")

    use_negatives: bool = True
    use_hard_negatives: bool = True
    fuse_motion_positives: bool = True

    first_frame_mask: FirstFrameMask = FirstFrameMask.PSEUDO_GT
    first_frame_radius: int = Field(5, ge=0)

    workers: int = Field(1, ge=1, description="Threads for per-detection consistency checks")
    eval: EvalConfig = Field(default_factory=EvalConfig)

    @property
    def selection(self) -> SelectionConfig:
        """The SelectionConfig view of this config"""
        return SelectionConfig(**self.model_dump(include=set(SelectionConfig.model_fields)))
