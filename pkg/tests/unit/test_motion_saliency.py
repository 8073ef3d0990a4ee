"""
Motion Saliency Tests
"""
import numpy as np
import pytest

from models.flow import FlowField
from models.masks import BinaryMask
from services.exceptions import DimensionMismatchError, FormatError
from services.motion_saliency import (
    flow_saliency, otsu_threshold, propagate_mask, read_flo, write_flo,
)
from storage.codecs import FLO_MAGIC
from tests.conftest import box_mask


def block_flow(width, height, box, vector, background=(0.0, 0.0)) -> FlowField:
    """Uniform background flow with one rectangular block moving by vector"""
    x, y, w, h = box
    vectors = np.zeros((height, width, 2))
    vectors[...] = background
    vectors[y:y + h, x:x + w] = vector
    return FlowField(vectors=vectors)


def brute_force_otsu(bins: np.ndarray, n_bins: int = 256):
    """Between-class variance for every split, first maximum wins"""
    hist = np.bincount(bins.ravel(), minlength=n_bins)
    best_t, best = None, -1.0
    for t in range(n_bins - 1):
        w0 = float(hist[:t + 1].sum())
        w1 = float(hist[t + 1:].sum())
        if w0 == 0 or w1 == 0:
            continue
        s0 = float((hist[:t + 1] * np.arange(t + 1)).sum())
        s1 = float((hist[t + 1:] * np.arange(t + 1, n_bins)).sum())
        d = s1 / w1 - s0 / w0
        between = w0 * w1 * (d * d)
        if between > best:
            best_t, best = t, between
    return best_t


@pytest.mark.unit
class TestFloIO:
    """Middlebury .flo reading"""

    def test_zero_flow_round_trip(self, tmp_path):
        path = tmp_path / "zero.flo"
        write_flo(path, FlowField.zeros(1, 1))
        flow = read_flo(path)
        assert (flow.width, flow.height) == (1, 1)
        assert flow.u[0, 0] == 0.0 and flow.v[0, 0] == 0.0

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.flo"
        path.write_bytes(
            np.array([0.0], dtype="<f4").tobytes() + np.array([1, 1], dtype="<i4").tobytes()
            + np.zeros(2, dtype="<f4").tobytes()
        )
        with pytest.raises(FormatError):
            read_flo(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.flo"
        path.write_bytes(
            np.array([FLO_MAGIC], dtype="<f4").tobytes() + np.array([4, 4], dtype="<i4").tobytes()
            + np.zeros(5, dtype="<f4").tobytes()
        )
        with pytest.raises(FormatError):
            read_flo(path)

    def test_non_finite_component(self, tmp_path):
        path = tmp_path / "nan.flo"
        path.write_bytes(
            np.array([FLO_MAGIC], dtype="<f4").tobytes() + np.array([1, 1], dtype="<i4").tobytes()
            + np.array([np.nan, 0.0], dtype="<f4").tobytes()
        )
        with pytest.raises(FormatError):
            read_flo(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError, match="missing input"):
            read_flo(tmp_path / "absent.flo")


@pytest.mark.unit
class TestOtsu:
    """Histogram threshold selection"""

    def test_single_level_has_no_threshold(self):
        assert otsu_threshold(np.full(50, 17)) is None

    def test_two_levels_split_at_first_tie(self):
        assert otsu_threshold(np.array([0, 0, 255, 255])) == 0

    def test_matches_exhaustive_search(self, rng):
        for _ in range(50):
            n_levels = int(rng.integers(2, 6))
            levels = rng.choice(256, size=n_levels, replace=False)
            bins = rng.choice(levels, size=int(rng.integers(20, 400)))
            assert otsu_threshold(bins) == brute_force_otsu(bins)


@pytest.mark.unit
class TestFlowSaliency:
    """Camera-compensated Otsu motion masks"""

    def test_uniform_flow_is_empty(self):
        flow = FlowField(vectors=np.tile([4.0, -2.0], (16, 16, 1)))
        assert flow_saliency(flow).mask.is_empty()

    def test_zero_flow_is_empty(self):
        assert flow_saliency(FlowField.zeros(8, 8)).mask.is_empty()

    def test_moving_block_is_recovered_exactly(self):
        flow = block_flow(32, 32, (10, 10, 8, 8), (10.0, 0.0))
        motion = flow_saliency(flow, min_area_ratio=0.0)
        assert motion.mask == box_mask(32, 32, 10, 10, 8, 8)

    def test_constant_offset_is_compensated(self, rng):
        u = rng.integers(-6, 7, size=(24, 24)).astype(np.float64)
        u[:12] = 0.0
        base = FlowField.from_components(u, np.zeros_like(u))
        shifted = FlowField.from_components(u + 5.0, np.full_like(u, -3.0))
        assert flow_saliency(base, 0.0).mask == flow_saliency(shifted, 0.0).mask

    def test_faster_region_stays_salient(self):
        """Speeding up a region never removes it from the mask"""
        for speed in (8.0, 12.0, 30.0):
            vectors = np.zeros((30, 30, 2))
            vectors[2:8, 2:8] = (speed, 0.0)
            vectors[20:26, 20:26] = (6.0, 0.0)
            mask = flow_saliency(FlowField(vectors=vectors), 0.0).mask
            assert mask.bits[2:8, 2:8].all()

    def test_small_masks_are_discarded(self):
        flow = block_flow(100, 100, (50, 50, 1, 1), (5.0, 5.0))
        assert flow_saliency(flow, min_area_ratio=0.001).mask.is_empty()
        assert flow_saliency(flow, min_area_ratio=0.0).mask.area == 1

    def test_frame_index_is_recorded(self):
        assert flow_saliency(FlowField.zeros(4, 4), frame_index=3).frame_index == 3


@pytest.mark.unit
class TestPropagateMask:
    """Forward warping of a mask along its flow"""

    def test_moves_foreground(self):
        flow = block_flow(12, 6, (2, 2, 2, 2), (3.0, 1.0))
        moved = propagate_mask(box_mask(12, 6, 2, 2, 2, 2), flow)
        assert moved == box_mask(12, 6, 5, 3, 2, 2)

    def test_pixels_leaving_the_frame_are_dropped(self):
        flow = FlowField(vectors=np.tile([5.0, 0.0], (4, 6, 1)))
        assert propagate_mask(box_mask(6, 4, 3, 0, 3, 4), flow).is_empty()

    def test_size_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            propagate_mask(BinaryMask.empty(4, 4), FlowField.zeros(5, 4))
