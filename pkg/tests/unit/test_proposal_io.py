"""
Proposal I/O Tests
"""
import pytest
import ujson as json

from models.masks import BBox, BinaryMask
from models.proposals import FrameProposals, InstanceProposal, ProposalSource
from services.exceptions import DimensionMismatchError, FormatError
from services.mask_core import bbox_of, rle_encode
from services.proposal_io import (
    filter_by_score, parse_proposals, select_source, serialize_proposals,
    to_class_agnostic, write_proposals,
)
from tests.conftest import box_mask


def proposal(mask: BinaryMask, score: float = 0.9, category: int = 1) -> InstanceProposal:
    return InstanceProposal(mask=mask, box=bbox_of(mask), score=score, category=category)


def record_line(mask: BinaryMask, score=0.9, category=1, bbox=None, **overrides) -> str:
    record = {
        "category": category,
        "score": score,
        "bbox": bbox if bbox is not None else bbox_of(mask).to_list(),
        "rle": rle_encode(mask),
        "width": mask.width,
        "height": mask.height,
    }
    record.update(overrides)
    return json.dumps(record)


@pytest.mark.unit
class TestParseProposals:
    """JSONL ingestion"""

    def test_empty_file(self, tmp_path):
        path = tmp_path / "00000.jsonl"
        path.write_text("")
        fp = parse_proposals(path, 0)
        assert len(fp) == 0
        assert fp.source == ProposalSource.INSTANCE

    def test_full_frame_mask(self, tmp_path):
        path = tmp_path / "00000.jsonl"
        path.write_text(record_line(BinaryMask.full(4, 3), score=0.9) + "\n")
        fp = parse_proposals(path, 0)
        assert len(fp) == 1
        assert fp.proposals[0].box == BBox(x=0, y=0, w=4, h=3)
        assert fp.proposals[0].score == 0.9

    def test_loose_box_is_re_tightened(self, tmp_path):
        mask = box_mask(20, 20, 5, 5, 4, 4)
        path = tmp_path / "00001.jsonl"
        path.write_text(record_line(mask, bbox=[0, 0, 20, 20]) + "\n")
        assert parse_proposals(path, 1).proposals[0].box == BBox(x=5, y=5, w=4, h=4)

    def test_rle_sum_mismatch(self, tmp_path):
        path = tmp_path / "00000.jsonl"
        path.write_text(record_line(BinaryMask.full(4, 3), rle=[0, 11]) + "\n")
        with pytest.raises(FormatError):
            parse_proposals(path, 0)

    def test_score_out_of_range(self, tmp_path):
        path = tmp_path / "00000.jsonl"
        path.write_text(record_line(BinaryMask.full(4, 3), score=1.5) + "\n")
        with pytest.raises(FormatError):
            parse_proposals(path, 0)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "00000.jsonl"
        path.write_text("{not json\n")
        with pytest.raises(FormatError):
            parse_proposals(path, 0)

    def test_frame_size_disagreement(self, tmp_path):
        path = tmp_path / "00000.jsonl"
        path.write_text(
            record_line(BinaryMask.full(4, 3)) + "\n" + record_line(BinaryMask.full(5, 3)) + "\n"
        )
        with pytest.raises(DimensionMismatchError):
            parse_proposals(path, 0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError, match="missing input"):
            parse_proposals(tmp_path / "00009.jsonl", 9)

    def test_written_proposals_parse_back(self, tmp_path):
        fp = FrameProposals(frame_index=2, proposals=[
            proposal(box_mask(16, 8, 1, 1, 3, 3), 0.95, 4),
            proposal(box_mask(16, 8, 8, 2, 6, 5), 0.81, 2),
        ])
        path = tmp_path / "00002.jsonl"
        write_proposals(path, fp)
        assert parse_proposals(path, 2) == fp
        assert len(serialize_proposals(fp)) == 2


@pytest.mark.unit
class TestFiltering:
    """Score floor, category mapping and source policy"""

    @pytest.fixture
    def scored(self):
        masks = [box_mask(8, 8, i, i, 2, 2) for i in range(3)]
        return FrameProposals(frame_index=0, proposals=[
            proposal(masks[0], 0.9, 3), proposal(masks[1], 0.79, 17), proposal(masks[2], 0.8, 3),
        ])

    def test_filter_keeps_order(self, scored):
        kept = filter_by_score(scored, 0.8)
        assert [p.score for p in kept.proposals] == [0.9, 0.8]

    def test_filter_bounds(self, scored):
        assert filter_by_score(scored, 0.0) == scored
        assert len(filter_by_score(scored, 1.0)) == 0

    def test_filter_is_idempotent(self, scored):
        once = filter_by_score(scored, 0.8)
        assert filter_by_score(once, 0.8) == once

    def test_class_agnostic(self, scored):
        mapped = to_class_agnostic(scored)
        assert [p.category for p in mapped.proposals] == [1, 1, 1]
        assert to_class_agnostic(mapped) == mapped
        assert len(to_class_agnostic(FrameProposals(frame_index=0))) == 0

    def test_source_without_semantic(self, scored):
        assert select_source(scored, semantic_available=False) == ProposalSource.INSTANCE

    def test_source_with_repeated_category(self, scored):
        assert select_source(scored, semantic_available=True) == ProposalSource.INSTANCE

    def test_source_with_distinct_categories(self, scored):
        distinct = scored.model_copy(update={"proposals": scored.proposals[:2]})
        assert select_source(distinct, semantic_available=True) == ProposalSource.SEMANTIC
