"""
Synthetic Scenes

Deterministic sequence generator for desk-scale verification: a textured
moving target, static (and optionally moving) distractors on a fixed noise
background, analytic flow, jittered detector proposals, ground truth and a
manifest of the planted hard negatives. Also scores a hard-negative
selection against that manifest.
"""
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from models.masks import BBox, BinaryMask
from models.proposals import FrameProposals, InstanceProposal, ProposalSource
from models.selection import GrayFrame
from models.flow import FlowField
from models.synth import (
    DetectorNoise, DistractorSpec, FrameManifest, ObjectKind, ObjectPlacement,
    SceneManifest, SceneSpec, SelectionScore, Shape, TargetSpec,
)
from services.mask_core import bbox_of, dilate, erode, overlap_ratio
from services.proposal_io import serialize_proposals
from storage.base import BaseStorage
from storage.file_storage import FileStorage

logger = logging.getLogger(__name__)

FALSE_POSITIVE_CATEGORY = 3
FALSE_POSITIVE_SIZES = (10, 18)
FALSE_POSITIVE_MIN_SCORE = 0.5
FALSE_POSITIVE_MARGIN = 4
PLACEMENT_ATTEMPTS = 50
COVERAGE_FOR_HIT = 0.5


# ============================================================================
# RASTERIZATION
# ============================================================================

def rasterize(shape: Shape, box: BBox, width: int, height: int) -> BinaryMask:
    """Filled rectangle or the ellipse inscribed in box"""
    if shape == Shape.RECT:
        return box.to_mask(width, height)
    ys, xs = np.mgrid[0:height, 0:width]
    cx, cy = box.x + box.w / 2.0, box.y + box.h / 2.0
    inside = ((xs + 0.5 - cx) / (box.w / 2.0)) ** 2 + ((ys + 0.5 - cy) / (box.h / 2.0)) ** 2 <= 1.0
    return BinaryMask(bits=inside)


def _texture(seed: int, size: Tuple[int, int]) -> np.ndarray:
    w, h = size
    return np.random.default_rng(seed).integers(0, 256, size=(h, w), dtype=np.uint8)


class _SceneObject:
    """Internal per-object state while rendering"""

    def __init__(self, object_id: int, kind: ObjectKind, shape: Shape, size, start, velocity,
                 category: int, texture: np.ndarray, planted: bool):
        self.id = object_id
        self.kind = kind
        self.shape = shape
        self.size = size
        self.start = start
        self.velocity = velocity
        self.category = category
        self.texture = texture
        self.planted = planted

    @property
    def moving(self) -> bool:
        return self.velocity != (0, 0)

    def box_at(self, t: int) -> BBox:
        return BBox(
            x=self.start[0] + self.velocity[0] * t,
            y=self.start[1] + self.velocity[1] * t,
            w=self.size[0],
            h=self.size[1],
        )


# ============================================================================
# GENERATOR
# ============================================================================

class SceneGenerator:
    """Writes one synthetic sequence into a storage backend"""

    def __init__(self, storage: BaseStorage):
        """
        Initialize generator

        Args:
            storage: Destination; the sequence layout is written at its root
        """
        self.storage = storage

    def _objects(self, spec: SceneSpec) -> List[_SceneObject]:
        objects = []
        for i, d in enumerate(spec.distractors, start=1):
            seed = spec.target.texture_seed if d.similar_appearance else (
                d.texture_seed if d.texture_seed is not None else spec.seed * 1000 + 100 + i
            )
            objects.append(_SceneObject(
                object_id=i,
                kind=ObjectKind.DISTRACTOR,
                shape=d.shape,
                size=tuple(d.size),
                start=tuple(d.position),
                velocity=(0, 0) if d.static else tuple(d.velocity),
                category=d.category,
                texture=_texture(seed, tuple(d.size)),
                planted=d.static,
            ))
        target = spec.target
        # drawn last so it occludes distractors
        objects.append(_SceneObject(
            object_id=0,
            kind=ObjectKind.TARGET,
            shape=target.shape,
            size=tuple(target.size),
            start=tuple(target.start),
            velocity=tuple(target.velocity),
            category=target.category,
            texture=_texture(target.texture_seed, tuple(target.size)),
            planted=False,
        ))
        return objects

    def _jitter(self, mask: BinaryMask, j: int, rng: np.random.Generator) -> BinaryMask:
        """Flip each pixel of the inner and outer boundary bands of width j with probability 1/2"""
        if j == 0:
            return mask
        inner = mask.bits & ~erode(mask, j).bits
        outer = dilate(mask, j).bits & ~mask.bits
        drop = inner & (rng.random(mask.shape) < 0.5)
        add = outer & (rng.random(mask.shape) < 0.5)
        bits = (mask.bits & ~drop) | add
        if not bits.any():
            return mask
        return BinaryMask(bits=bits)

    def _false_positive(
        self,
        spec: SceneSpec,
        occupied: List[BBox],
        rng: np.random.Generator,
    ) -> Optional[BBox]:
        width, height = spec.frame_dims.width, spec.frame_dims.height
        lo, hi = FALSE_POSITIVE_SIZES
        for _ in range(PLACEMENT_ATTEMPTS):
            w, h = (int(v) for v in rng.integers(lo, hi + 1, size=2))
            if w > width or h > height:
                return None
            x = int(rng.integers(0, width - w + 1))
            y = int(rng.integers(0, height - h + 1))
            m = FALSE_POSITIVE_MARGIN
            clear = all(
                x + w + m <= b.x or b.x2 + m <= x or y + h + m <= b.y or b.y2 + m <= y
                for b in occupied
            )
            if clear:
                return BBox(x=x, y=y, w=w, h=h)
        return None

    def generate(self, spec: SceneSpec) -> SceneManifest:
        """
        Render frames, flow, proposals, ground truth and the manifest

        Args:
            spec: Scene description; its seed fixes every output byte

        Returns:
            SceneManifest as written to manifest.json
        """
        width, height = spec.frame_dims.width, spec.frame_dims.height
        noise: DetectorNoise = spec.noise
        objects = self._objects(spec)
        background = np.random.default_rng(spec.seed).integers(0, 256, size=(height, width), dtype=np.uint8)
        fp_id = len(spec.distractors) + 1

        frames: List[FrameManifest] = []
        for t in range(spec.n_frames):
            rng = np.random.default_rng([spec.seed, t])
            pixels = background.copy()
            flow = np.zeros((height, width, 2), dtype=np.float64)
            gt = np.zeros((height, width), dtype=bool)
            placements: List[ObjectPlacement] = []
            proposals: List[InstanceProposal] = []

            for obj in objects:
                box = obj.box_at(t)
                mask = rasterize(obj.shape, box, width, height)
                patch = pixels[box.y:box.y2, box.x:box.x2]
                local = mask.bits[box.y:box.y2, box.x:box.x2]
                patch[local] = obj.texture[local]
                if obj.moving:
                    gt |= mask.bits
                    flow[mask.bits] = obj.velocity
                else:
                    flow[mask.bits] = (0.0, 0.0)
                placements.append(ObjectPlacement(id=obj.id, kind=obj.kind, shape=obj.shape, bbox=box.to_list()))

                jittered = self._jitter(mask, noise.boundary_jitter, rng)
                score = round(float(rng.uniform(*noise.score_range)), 4)
                proposals.append(InstanceProposal(
                    mask=jittered, box=bbox_of(jittered), score=score, category=obj.category,
                ))

            if rng.random() < noise.false_positive_rate:
                occupied = [obj.box_at(t) for obj in objects]
                fp_box = self._false_positive(spec, occupied, rng)
                if fp_box is not None:
                    score = round(float(rng.uniform(FALSE_POSITIVE_MIN_SCORE, noise.score_range[1])), 4)
                    fp_mask = fp_box.to_mask(width, height)
                    proposals.append(InstanceProposal(
                        mask=fp_mask, box=fp_box, score=score, category=FALSE_POSITIVE_CATEGORY,
                    ))
                    placements.append(ObjectPlacement(
                        id=fp_id + t, kind=ObjectKind.FALSE_POSITIVE, shape=Shape.RECT, bbox=fp_box.to_list(),
                    ))

            name = f"{t:05d}"
            self.storage.write_gray(f"frames/{name}.pgm", GrayFrame(intensity=pixels))
            self.storage.write_mask(f"gt/{name}.pgm", BinaryMask(bits=gt))
            fp = FrameProposals(frame_index=t, proposals=proposals, source=ProposalSource.INSTANCE)
            self.storage.write_lines(f"proposals/{name}.jsonl", serialize_proposals(fp))
            if t < spec.n_frames - 1:
                self.storage.write_flow(f"flow/{name}.flo", FlowField(vectors=flow))

            planted = [obj.id for obj in objects if obj.planted] if t >= 1 else []
            frames.append(FrameManifest(index=t, objects=placements, hard_negatives=planted))

        manifest = SceneManifest(
            name=spec.name, seed=spec.seed, frame_dims=spec.frame_dims, n_frames=spec.n_frames, frames=frames,
        )
        self.storage.write_json("manifest.json", manifest.model_dump(mode="json"))
        logger.info(
            "Scene %s (seed %d): %d frames, %d distractors written",
            spec.name, spec.seed, spec.n_frames, len(spec.distractors),
        )
        return manifest


def generate(spec: SceneSpec, out_dir: Union[str, Path]) -> SceneManifest:
    """Write spec's sequence under out_dir"""
    return SceneGenerator(FileStorage(out_dir)).generate(spec)


# ============================================================================
# STANDARD SUITE
# ============================================================================

def standard_scene(seed: int, n_frames: int = 8) -> SceneSpec:
    """
    The standard distractor scene: one target moving (3, 0) per frame and two
    static distractors kept clear of its path, placements drawn from seed
    """
    rng = np.random.default_rng(seed)
    shapes = [Shape.RECT, Shape.ELLIPSE]
    target = TargetSpec(
        shape=shapes[int(rng.integers(0, 2))],
        start=(int(rng.integers(4, 11)), int(rng.integers(4, 13))),
        velocity=(3, 0),
        texture_seed=int(rng.integers(0, 2 ** 31)),
    )
    distractors = [
        DistractorSpec(
            shape=shapes[int(rng.integers(0, 2))],
            position=(int(rng.integers(60, 81)), int(rng.integers(4, 21))),
        ),
        DistractorSpec(
            shape=shapes[int(rng.integers(0, 2))],
            position=(int(rng.integers(8, 41)), int(rng.integers(50, 69))),
            similar_appearance=bool(rng.integers(0, 2)),
        ),
    ]
    return SceneSpec(name=f"standard-{seed:03d}", n_frames=n_frames, target=target, distractors=distractors, seed=seed)


# ============================================================================
# SCORING
# ============================================================================

def score_selection(manifest: SceneManifest, selected: Mapping[int, BinaryMask]) -> SelectionScore:
    """
    Identity-level precision/recall of hard-negative selection

    An object counts as selected in a frame when at least half of its true
    mask lies inside that frame's selected mask. Frames absent from selected
    contribute nothing.

    Args:
        manifest: What generate planted
        selected: Frame index -> hard-negative mask
    """
    width, height = manifest.frame_dims.width, manifest.frame_dims.height
    true_positives = picked = planted = 0
    for frame in manifest.frames:
        planted += len(frame.hard_negatives)
        mask = selected.get(frame.index)
        if mask is None or mask.is_empty():
            continue
        for placement in frame.objects:
            x, y, w, h = placement.bbox
            truth = rasterize(placement.shape, BBox(x=x, y=y, w=w, h=h), width, height)
            if overlap_ratio(truth, mask) >= COVERAGE_FOR_HIT:
                picked += 1
                if placement.id in frame.hard_negatives:
                    true_positives += 1

    precision = true_positives / picked if picked else 1.0
    recall = true_positives / planted if planted else 1.0
    return SelectionScore(
        precision=precision, recall=recall,
        true_positives=true_positives, selected=picked, planted=planted,
    )
