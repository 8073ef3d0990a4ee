"""
Pipeline Models

Sequence directory layout and run summaries
"""
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from .config import PipelineConfig
from .masks import FrameDims
from .synth import SceneSpec


class SequenceLayout(BaseModel):
    """Resolved input files of one sequence directory"""
    root: Path
    frames: List[Path] = Field(..., min_length=2)
    flows: List[Path] = Field(..., min_length=1)
    proposals: List[Path]
    semantic: Dict[int, Path] = Field(default_factory=dict)
    gt: Dict[int, List[Path]] = Field(default_factory=dict, description="Frame index -> one or more instance files")
    predictions: Optional[Dict[int, Path]] = None
    dims: FrameDims

    @property
    def name(self) -> str:
        return self.root.name

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    def flow_for(self, frame_index: int) -> Path:
        """Forward flow (t -> t+1); the last frame reuses the last available field"""
        return self.flows[min(frame_index, len(self.flows) - 1)]


class RunSummary(BaseModel):
    """What run_sequence produced"""
    sequence: str
    out_dir: Path
    n_frames: int
    selected_indices: List[int]
    one_shot_frames: List[int] = Field(default_factory=list)
    hard_negative_frames: List[int] = Field(default_factory=list)
    artifacts: List[str] = Field(default_factory=list)
    j_mean: Optional[float] = None
    f_mean: Optional[float] = None


# ============================================================================
# API REQUESTS
# ============================================================================

class RunRequest(BaseModel):
    """POST /runs body"""
    sequence_dir: Path
    out_dir: Optional[Path] = Field(None, description="Defaults to <DOA_OUTPUT_ROOT>/<sequence name>")
    config: PipelineConfig = Field(default_factory=PipelineConfig)
    evaluate: Optional[bool] = None


class EvaluationRequest(BaseModel):
    """POST /evaluations body"""
    pred_dir: Path
    gt_dir: Path
    tol: Optional[int] = Field(None, ge=0)
    exclude_endpoints: bool = True


class SynthRequest(BaseModel):
    """POST /synth body; exactly one of spec and seed"""
    spec: Optional[SceneSpec] = None
    seed: Optional[int] = None
    out_dir: Optional[Path] = Field(None, description="Defaults to <DOA_OUTPUT_ROOT>/<scene name>")

    @model_validator(mode="after")
    def _one_source(self):
        if (self.spec is None) == (self.seed is None):
            raise ValueError("give exactly one of spec and seed")
        return self
