"""
Pipeline Service

Orchestrates one sequence end to end: pseudo-GT on frame 0, per-frame
hard-negative/negative/positive selection, label maps and overlays, the
adaptation plan, and optional evaluation against ground truth.
"""
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
from pydantic import ValidationError

from models.config import FirstFrameMask, PipelineConfig
from models.flow import FlowField, MotionMask
from models.masks import BinaryMask
from models.metrics import SequenceReport
from models.pipeline import RunSummary, SequenceLayout
from models.proposals import FrameProposals, ProposalSource
from models.selection import ConsistencyVerdict, GrayFrame, Label, LabelMap, LabelMode, PseudoGroundTruth
from services.adaptation import FrameSelection, build_plan, plan_to_dict
from services.distractor_select import (
    assemble_labels, select_hard_negatives, select_negatives, select_positives
)
from services.eval_metrics import jaccard, merge_instances, report_to_dict, sequence_report
from services.exceptions import ConfigError, DimensionMismatchError, FormatError
from services.mask_core import boundary, dilate, erode
from services.motion_saliency import flow_saliency, propagate_mask
from services.proposal_io import filter_by_score, parse_proposals, select_source, to_class_agnostic
from services.pseudo_gt import generate_pseudo_gt
from services.tracklet import check_consistency
from storage.file_storage import FileStorage

logger = logging.getLogger(__name__)

POSITIVE_TINT = np.array([0, 160, 0])
HARD_NEGATIVE_OUTLINE = (255, 0, 0)
NEGATIVE_STIPPLE = (0, 0, 255)
STIPPLE_PERIOD = 4


# ============================================================================
# CONFIGURATION
# ============================================================================

def load_config(path: Optional[Union[str, Path]] = None) -> PipelineConfig:
    """
    Load a flat key = value TOML config; dotted keys (eval.tol) fill the eval block

    Args:
        path: Config file; None gives the defaults

    Raises:
        ConfigError: unreadable file, unknown key or out-of-range value
    """
    if path is None:
        return PipelineConfig()
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"missing input: {path}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}")
    try:
        return PipelineConfig.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"{path}: {problems}")


# ============================================================================
# OVERLAYS
# ============================================================================

def render_overlay(frame: GrayFrame, labels: LabelMap) -> np.ndarray:
    """Frame with positives tinted, hard negatives outlined and negatives stippled"""
    gray = frame.intensity.astype(np.int32)
    rgb = np.repeat(gray[..., None], 3, axis=2)

    positive = labels.region(Label.POSITIVE).bits
    rgb[positive] = rgb[positive] // 2 + POSITIVE_TINT

    ys, xs = np.mgrid[0:labels.height, 0:labels.width]
    stipple = labels.region(Label.NEGATIVE).bits & ((xs + ys) % STIPPLE_PERIOD == 0)
    rgb[stipple] = NEGATIVE_STIPPLE

    rgb[boundary(labels.region(Label.HARD_NEGATIVE)).bits] = HARD_NEGATIVE_OUTLINE
    return np.clip(rgb, 0, 255).astype(np.uint8)


# ============================================================================
# PIPELINE
# ============================================================================

class PipelineService:
    """Runs the selection pipeline over one sequence directory"""

    def __init__(self, source: FileStorage, output: FileStorage, config: PipelineConfig):
        """
        Initialize the pipeline

        Args:
            source: Storage rooted at the sequence directory
            output: Storage rooted at the output directory
            config: Validated pipeline configuration
        """
        self.source = source
        self.output = output
        self.config = config
        self._flows: Dict[Path, FlowField] = {}
        self._frames: Dict[int, GrayFrame] = {}
        self._proposals: Dict[int, FrameProposals] = {}
        self._artifacts: List[str] = []

    # ------------------------------------------------------------------------
    # cached inputs
    # ------------------------------------------------------------------------

    def _flow(self, layout: SequenceLayout, path: Path) -> FlowField:
        if path not in self._flows:
            flow = self.source.read_flow(str(path))
            if (flow.height, flow.width) != (layout.dims.height, layout.dims.width):
                raise DimensionMismatchError(
                    f"flow {path.name} is {flow.width}x{flow.height}, frames are {layout.dims.width}x{layout.dims.height}"
                )
            self._flows[path] = flow
        return self._flows[path]

    def _frame(self, layout: SequenceLayout, index: int) -> GrayFrame:
        if index not in self._frames:
            self._frames[index] = self.source.read_gray(str(layout.frames[index]))
        return self._frames[index]

    def _candidates(self, layout: SequenceLayout, index: int) -> FrameProposals:
        """Score-filtered, class-agnostic instance proposals of a frame"""
        if index not in self._proposals:
            fp = parse_proposals(layout.proposals[index], index)
            self._proposals[index] = to_class_agnostic(filter_by_score(fp, self.config.score_min))
        return self._proposals[index]

    def _motion(self, layout: SequenceLayout, index: int) -> MotionMask:
        motion = flow_saliency(self._flow(layout, layout.flow_for(index)), self.config.min_area_ratio, frame_index=index)
        self._write_mask(f"motion/{index:05d}.pgm", motion.mask)
        return motion

    def _write_mask(self, path: str, mask: BinaryMask) -> None:
        self.output.write_mask(path, mask)
        self._artifacts.append(path)

    def _write_json(self, path: str, obj) -> None:
        self.output.write_json(path, obj)
        self._artifacts.append(path)

    # ------------------------------------------------------------------------
    # stages
    # ------------------------------------------------------------------------

    def _pseudo_gt(self, layout: SequenceLayout) -> PseudoGroundTruth:
        cfg = self.config
        # the source policy counts categories, so it sees them before the agnostic mapping
        raw = filter_by_score(parse_proposals(layout.proposals[0], 0), cfg.pseudo_gt_score_min)
        source = select_source(raw, semantic_available=0 in layout.semantic)
        fp = to_class_agnostic(raw)
        if source == ProposalSource.SEMANTIC:
            fp = to_class_agnostic(filter_by_score(
                parse_proposals(layout.semantic[0], 0, ProposalSource.SEMANTIC), cfg.pseudo_gt_score_min
            ))
        logger.info("Sequence %s: pseudo-GT from %s proposals", layout.name, source.value)

        pgt = generate_pseudo_gt(fp, self._motion(layout, 0), cfg.pgt_threshold)
        self._write_mask("pseudo_gt.pgm", pgt.mask)
        self._write_json("pseudo_gt.json", {
            "selected_indices": pgt.selected_indices,
            "T": pgt.threshold_used,
            "source": source.value,
        })
        return pgt

    def _first_frame_mask(self, layout: SequenceLayout, pgt: PseudoGroundTruth) -> BinaryMask:
        cfg = self.config
        variant = cfg.first_frame_mask
        if variant == FirstFrameMask.ERODED:
            mask = erode(pgt.mask, cfg.first_frame_radius)
        elif variant == FirstFrameMask.DILATED:
            mask = dilate(pgt.mask, cfg.first_frame_radius)
        elif variant == FirstFrameMask.GROUND_TRUTH:
            if 0 not in layout.gt:
                raise FormatError(f"missing input: {layout.root / 'gt' / '00000.pgm'}")
            mask = self._ground_truth(layout, 0)
        else:
            mask = pgt.mask
        self._write_mask("first_frame.pgm", mask)
        return mask

    def _ground_truth(self, layout: SequenceLayout, index: int) -> BinaryMask:
        return merge_instances([self.source.read_mask(str(p)) for p in layout.gt[index]])

    def _previous_prediction(
        self,
        layout: SequenceLayout,
        t: int,
        stand_in: BinaryMask,
    ) -> BinaryMask:
        """Prediction of frame t-1: predictions/ when present, else the propagated stand-in"""
        if layout.predictions is not None and (t - 1) in layout.predictions:
            return self.source.read_mask(str(layout.predictions[t - 1]))
        return stand_in

    def _verdicts(
        self,
        layout: SequenceLayout,
        t: int,
        candidates: FrameProposals,
    ) -> List[ConsistencyVerdict]:
        cfg = self.config
        depth = min(cfg.k, t)
        history = [
            (self._frame(layout, t - j), self._candidates(layout, t - j)) for j in range(1, depth + 1)
        ]
        current = self._frame(layout, t)

        def check(det):
            return check_consistency(det, history, current, cfg.t2)

        if cfg.workers > 1 and len(candidates.proposals) > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                return list(pool.map(check, candidates.proposals))
        return [check(det) for det in candidates.proposals]

    def _select_frame(
        self,
        layout: SequenceLayout,
        t: int,
        prev_pred: BinaryMask,
    ) -> FrameSelection:
        cfg = self.config
        width, height = layout.dims.width, layout.dims.height
        motion = self._motion(layout, t)
        candidates = self._candidates(layout, t)

        if cfg.use_hard_negatives and candidates.proposals:
            verdicts = self._verdicts(layout, t, candidates)
            hardneg = select_hard_negatives(candidates, motion, verdicts, cfg.selection)
        else:
            hardneg = BinaryMask.empty(width, height)

        pos, mode = select_positives(prev_pred, motion, cfg.erosion_radius, cfg.fuse_motion_positives)
        if cfg.use_negatives:
            neg = select_negatives(pos, cfg.negative_distance(width, height))
        else:
            neg = BinaryMask.empty(width, height)
        labels = assemble_labels(pos, neg, hardneg, mode)

        counts = labels.counts()
        if mode == LabelMode.ONE_SHOT:
            logger.info("Frame %d: motion and eroded prediction do not intersect, one-shot fallback", t)
        logger.info(
            "Frame %d: mode=%s positive=%d hard_negative=%d negative=%d",
            t, mode.value, counts["positive"], counts["hard_negative"], counts["negative"],
        )

        label_path = f"labels/{t:05d}.pgm"
        self.output.write_label_map(label_path, labels)
        self._artifacts.extend([label_path, f"labels/{t:05d}.json"])
        overlay_path = f"overlays/{t:05d}.ppm"
        self.output.write_rgb(overlay_path, render_overlay(self._frame(layout, t), labels))
        self._artifacts.append(overlay_path)

        return FrameSelection(
            frame_index=t,
            mode=mode,
            has_hard_negatives=counts["hard_negative"] > 0,
            label_map_path=label_path,
        )

    def _evaluate(self, layout: SequenceLayout, pgt: PseudoGroundTruth) -> Optional[SequenceReport]:
        cfg = self.config.eval
        if not layout.gt or layout.predictions is None:
            return None
        indices = sorted(i for i in layout.predictions if i in layout.gt)
        if not indices:
            logger.warning("Sequence %s: no frame has both a prediction and ground truth", layout.name)
            return None
        exclude = cfg.exclude_endpoints
        if exclude and len(indices) < 3:
            logger.warning("Sequence %s: %d evaluated frames, endpoints kept", layout.name, len(indices))
            exclude = False
        report = sequence_report(
            [self.source.read_mask(str(layout.predictions[i])) for i in indices],
            [self._ground_truth(layout, i) for i in indices],
            tol=cfg.tol,
            exclude_endpoints=exclude,
            indices=indices,
            sequence=layout.name,
        )
        if 0 in layout.gt:
            report = report.model_copy(update={"pseudo_gt_j": jaccard(pgt.mask, self._ground_truth(layout, 0))})
        self._write_json("metrics.json", report_to_dict(report))
        return report

    def run(self, evaluate: Optional[bool] = None) -> RunSummary:
        """
        Process the whole sequence

        Args:
            evaluate: Force evaluation on or off; None defers to config eval.enabled

        Returns:
            RunSummary of what was written

        Raises:
            NoForegroundFound: frame 0 yields no pseudo-GT
            FormatError: missing or malformed inputs
            DimensionMismatchError: rasters disagree on size
        """
        layout = self.source.discover_layout()
        pgt = self._pseudo_gt(layout)
        self._first_frame_mask(layout, pgt)

        selections: List[FrameSelection] = []
        stand_in = pgt.mask
        for t in range(1, layout.n_frames):
            if t >= 2:
                # stand-in for frame t-1 only moves along flows that end at or before t-1
                stand_in = propagate_mask(stand_in, self._flow(layout, layout.flows[t - 2]))
            prev_pred = self._previous_prediction(layout, t, stand_in)
            selections.append(self._select_frame(layout, t, prev_pred))

        plan = build_plan(selections, self.config, pseudo_gt_path="first_frame.pgm", sequence=layout.name)
        self._write_json("plan.json", plan_to_dict(plan))

        report = None
        if self.config.eval.enabled if evaluate is None else evaluate:
            report = self._evaluate(layout, pgt)

        return RunSummary(
            sequence=layout.name,
            out_dir=self.output.root,
            n_frames=layout.n_frames,
            selected_indices=pgt.selected_indices,
            one_shot_frames=[s.frame_index for s in selections if s.mode == LabelMode.ONE_SHOT],
            hard_negative_frames=[s.frame_index for s in selections if s.has_hard_negatives],
            artifacts=sorted(set(self._artifacts)),
            j_mean=report.j_mean if report else None,
            f_mean=report.f_mean if report else None,
        )


def run_sequence(
    sequence_dir: Union[str, Path],
    config: PipelineConfig,
    out_dir: Union[str, Path],
    evaluate: Optional[bool] = None,
) -> RunSummary:
    """Run the pipeline on sequence_dir, writing every artifact under out_dir"""
    service = PipelineService(FileStorage(sequence_dir), FileStorage(out_dir), config)
    return service.run(evaluate=evaluate)


# ============================================================================
# STANDALONE EVALUATION
# ============================================================================

def evaluate_directories(
    pred_dir: Union[str, Path],
    gt_dir: Union[str, Path],
    tol: Optional[int] = None,
    exclude_endpoints: bool = True,
) -> SequenceReport:
    """
    Score predictions/<i>.pgm against gt/<i>.pgm (or gt/<i>_<k>.pgm instances)

    Only frames present in both directories are scored.

    Raises:
        FormatError: nothing to compare, or malformed masks
    """
    preds = FileStorage(pred_dir)
    gts = FileStorage(gt_dir)
    pred_files = preds.indexed_masks(".")
    gt_files = gts.indexed_masks(".", instances=True)
    indices = sorted(i for i in pred_files if i in gt_files)
    if not indices:
        raise FormatError(f"no frame index is present in both {pred_dir} and {gt_dir}")
    if exclude_endpoints and len(indices) < 3:
        logger.warning("Only %d frames to evaluate, endpoints kept", len(indices))
        exclude_endpoints = False
    return sequence_report(
        [preds.read_mask(pred_files[i][0]) for i in indices],
        [merge_instances([gts.read_mask(p) for p in gt_files[i]]) for i in indices],
        tol=tol,
        exclude_endpoints=exclude_endpoints,
        indices=indices,
        sequence=Path(gt_dir).resolve().parent.name,
    )
