"""
Synthetic Scene Tests
"""
import numpy as np
import pytest
from pydantic import ValidationError

from models.masks import BBox, BinaryMask
from models.synth import DetectorNoise, DistractorSpec, ObjectKind, SceneSpec, Shape, TargetSpec
from services.mask_core import union_all
from services.proposal_io import parse_proposals
from services.synth import generate, rasterize, score_selection, standard_scene
from storage.file_storage import FileStorage
from tests.conftest import tree_digest

QUIET = DetectorNoise(false_positive_rate=0.0)


def planted_masks(manifest):
    """Frame index -> union of the planted distractors' true masks"""
    width, height = manifest.frame_dims.width, manifest.frame_dims.height
    selected = {}
    for frame in manifest.frames:
        masks = [
            rasterize(p.shape, BBox(x=p.bbox[0], y=p.bbox[1], w=p.bbox[2], h=p.bbox[3]), width, height)
            for p in frame.objects if p.id in frame.hard_negatives
        ]
        if masks:
            selected[frame.index] = union_all(masks)
    return selected


@pytest.mark.unit
class TestRasterize:
    """Rectangles and inscribed ellipses"""

    def test_rect(self):
        mask = rasterize(Shape.RECT, BBox(x=1, y=2, w=3, h=4), 8, 8)
        assert mask.area == 12

    def test_ellipse_is_inside_and_symmetric(self):
        box = BBox(x=2, y=2, w=10, h=6)
        mask = rasterize(Shape.ELLIPSE, box, 20, 20)
        assert not np.any(mask.bits & ~box.to_mask(20, 20).bits)
        local = mask.bits[2:8, 2:12]
        assert np.array_equal(local, local[:, ::-1])
        assert np.array_equal(local, local[::-1, :])
        assert 0 < mask.area < box.area


@pytest.mark.unit
class TestSceneSpec:
    """Validation of scene descriptions"""

    def test_target_must_stay_in_frame(self):
        with pytest.raises(ValidationError):
            SceneSpec(target=TargetSpec(start=(100, 8), velocity=(3, 0)), n_frames=8)

    def test_static_distractor_ignores_velocity(self):
        spec = SceneSpec(distractors=[DistractorSpec(position=(100, 70), velocity=(9, 9))])
        assert spec.distractors[0].static

    def test_score_range_order(self):
        with pytest.raises(ValidationError):
            DetectorNoise(score_range=(0.9, 0.8))


@pytest.mark.unit
class TestGenerate:
    """Frames, analytic flow, proposals, ground truth and manifest"""

    def test_layout(self, tmp_path):
        spec = SceneSpec(n_frames=4, noise=QUIET)
        generate(spec, tmp_path)
        for t in range(4):
            assert (tmp_path / f"frames/{t:05d}.pgm").is_file()
            assert (tmp_path / f"gt/{t:05d}.pgm").is_file()
            assert (tmp_path / f"proposals/{t:05d}.jsonl").is_file()
        assert sorted(p.name for p in (tmp_path / "flow").iterdir()) == ["00000.flo", "00001.flo", "00002.flo"]
        assert (tmp_path / "manifest.json").is_file()

    def test_still_target_gives_zero_flow(self, tmp_path):
        generate(SceneSpec(n_frames=3, target=TargetSpec(velocity=(0, 0)), noise=QUIET), tmp_path)
        storage = FileStorage(tmp_path)
        for t in range(2):
            assert not storage.read_flow(f"flow/{t:05d}.flo").vectors.any()

    def test_flow_is_analytic(self, tmp_path):
        generate(SceneSpec(n_frames=4, target=TargetSpec(start=(8, 8), velocity=(3, 0)), noise=QUIET), tmp_path)
        storage = FileStorage(tmp_path)
        for t in range(3):
            flow = storage.read_flow(f"flow/{t:05d}.flo")
            now = storage.read_gray(f"frames/{t:05d}.pgm").intensity
            nxt = storage.read_gray(f"frames/{t + 1:05d}.pgm").intensity
            ys, xs = np.nonzero(flow.u)
            assert ys.size == 20 * 20
            assert np.all(flow.u[ys, xs] == 3.0)
            assert np.array_equal(nxt[ys, xs + 3], now[ys, xs])

    def test_ground_truth_is_the_moving_target(self, tmp_path):
        spec = SceneSpec(n_frames=3, target=TargetSpec(start=(8, 8)),
                         distractors=[DistractorSpec(position=(80, 60))], noise=QUIET)
        generate(spec, tmp_path)
        gt = FileStorage(tmp_path).read_mask("gt/00002.pgm")
        assert gt == BBox(x=14, y=8, w=20, h=20).to_mask(128, 96)

    def test_moving_distractor_joins_ground_truth(self, tmp_path):
        spec = SceneSpec(n_frames=3, target=TargetSpec(start=(8, 8)),
                         distractors=[DistractorSpec(position=(60, 60), static=False, velocity=(2, 0)),
                                      DistractorSpec(position=(90, 10))],
                         noise=QUIET)
        generate(spec, tmp_path)
        gt = FileStorage(tmp_path).read_mask("gt/00001.pgm")
        expected = union_all([BBox(x=11, y=8, w=20, h=20).to_mask(128, 96), BBox(x=62, y=60, w=24, h=24).to_mask(128, 96)])
        assert gt == expected

    def test_proposals_follow_objects(self, tmp_path):
        spec = SceneSpec(n_frames=3, target=TargetSpec(start=(8, 8)),
                         distractors=[DistractorSpec(position=(80, 60))],
                         noise=DetectorNoise(boundary_jitter=2, false_positive_rate=0.0))
        manifest = generate(spec, tmp_path)
        for frame in manifest.frames:
            fp = parse_proposals(tmp_path / f"proposals/{frame.index:05d}.jsonl", frame.index)
            assert len(fp) == 2
            for proposal, placement in zip(fp.proposals, frame.objects):
                x, y, w, h = placement.bbox
                assert abs(proposal.box.x - x) <= 2 and abs(proposal.box.y - y) <= 2
                assert abs(proposal.box.x2 - (x + w)) <= 2 and abs(proposal.box.y2 - (y + h)) <= 2
                assert 0.85 <= proposal.score <= 1.0

    def test_manifest_plants_static_distractors(self, tmp_path):
        manifest = generate(standard_scene(3), tmp_path)
        assert manifest.frames[0].hard_negatives == []
        assert all(f.hard_negatives == [1, 2] for f in manifest.frames[1:])

    def test_moving_distractor_is_not_planted(self, tmp_path):
        spec = SceneSpec(n_frames=3, distractors=[DistractorSpec(position=(60, 60), static=False, velocity=(1, 0))],
                         noise=QUIET)
        manifest = generate(spec, tmp_path)
        assert all(f.hard_negatives == [] for f in manifest.frames)

    def test_same_seed_same_bytes(self, tmp_path):
        generate(standard_scene(5), tmp_path / "a")
        generate(standard_scene(5), tmp_path / "b")
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_standard_scene_varies_with_seed(self):
        assert standard_scene(1) != standard_scene(2)


@pytest.mark.unit
class TestScoreSelection:
    """Identity-level precision and recall against the manifest"""

    def test_perfect_selection(self, tmp_path):
        manifest = generate(standard_scene(0), tmp_path)
        score = score_selection(manifest, planted_masks(manifest))
        assert score.precision == 1.0
        assert score.recall == 1.0
        assert score.planted == 2 * (manifest.n_frames - 1)

    def test_nothing_selected(self, tmp_path):
        manifest = generate(standard_scene(0), tmp_path)
        score = score_selection(manifest, {})
        assert score.precision == 1.0
        assert score.recall == 0.0

    def test_selecting_the_target(self, tmp_path):
        manifest = generate(standard_scene(0), tmp_path)
        width, height = manifest.frame_dims.width, manifest.frame_dims.height
        selected = {}
        for frame in manifest.frames[1:]:
            target = next(p for p in frame.objects if p.kind == ObjectKind.TARGET)
            x, y, w, h = target.bbox
            selected[frame.index] = BBox(x=x, y=y, w=w, h=h).to_mask(width, height)
        score = score_selection(manifest, selected)
        assert score.precision == 0.0
        assert score.recall == 0.0

    def test_empty_masks_are_ignored(self, tmp_path):
        manifest = generate(standard_scene(0), tmp_path)
        empty = {f.index: BinaryMask.empty(128, 96) for f in manifest.frames}
        assert score_selection(manifest, empty).selected == 0
