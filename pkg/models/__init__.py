"""
DOA - Pydantic Models

Data models for every pipeline stage
"""
from .masks import BinaryMask, BBox, FrameDims
from .flow import FlowField, MotionMask
from .proposals import FrameProposals, InstanceProposal, ProposalSource
from .selection import (
    ConsistencyVerdict,
    GrayFrame,
    Label,
    LabelMap,
    LabelMode,
    MatchResult,
    PseudoGroundTruth
)
from .config import EvalConfig, FirstFrameMask, PipelineConfig, SelectionConfig
from .adaptation import AdaptationPlan, FramePlan, LossBreakdown, ProbMap
from .metrics import FrameScore, SequenceReport
from .synth import SceneManifest, SceneSpec, SelectionScore
from .pipeline import RunSummary, SequenceLayout

__all__ = [
    # Masks
    "BinaryMask",
    "BBox",
    "FrameDims",
    # Flow
    "FlowField",
    "MotionMask",
    # Proposals
    "FrameProposals",
    "InstanceProposal",
    "ProposalSource",
    # Selection
    "ConsistencyVerdict",
    "GrayFrame",
    "Label",
    "LabelMap",
    "LabelMode",
    "MatchResult",
    "PseudoGroundTruth",
    # Config
    "EvalConfig",
    "FirstFrameMask",
    "PipelineConfig",
    "SelectionConfig",
    # Adaptation
    "AdaptationPlan",
    "FramePlan",
    "LossBreakdown",
    "ProbMap",
    # Metrics
    "FrameScore",
    "SequenceReport",
    # Synthetic scenes
    "SceneManifest",
    "SceneSpec",
    "SelectionScore",
    # Pipeline
    "RunSummary",
    "SequenceLayout",
]
