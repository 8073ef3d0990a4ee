"""
Proposal I/O

Per-frame detector outputs: JSONL ingestion, score filtering, the
category-agnostic mapping and the instance-vs-semantic source policy.
"""
import logging
from collections import Counter
from pathlib import Path
from typing import List, Union

import ujson as json
from pydantic import ValidationError

from models.proposals import (
    FOREGROUND_CATEGORY, FrameProposals, InstanceProposal, ProposalRecord, ProposalSource
)
from services.exceptions import DimensionMismatchError, FormatError
from services.mask_core import bbox_of, rle_decode, rle_encode

logger = logging.getLogger(__name__)


def _proposal_from_record(record: ProposalRecord, where: str) -> InstanceProposal:
    mask = rle_decode(record.rle, record.width, record.height)
    if mask.is_empty():
        raise FormatError(f"{where}: proposal mask is empty")
    box = bbox_of(mask)
    x, y, w, h = record.bbox
    # detector boxes may be loose; the mask's tight box is authoritative
    if max(abs(x - box.x), abs(y - box.y), abs(x + w - box.x2), abs(y + h - box.y2)) > 1:
        logger.debug("%s: detector box %s re-tightened to %s", where, record.bbox, box.to_list())
    return InstanceProposal(mask=mask, box=box, score=record.score, category=record.category)


def parse_proposals(
    path: Union[str, Path],
    frame_index: int,
    source: ProposalSource = ProposalSource.INSTANCE,
) -> FrameProposals:
    """
    Load proposals/<frame>.jsonl

    Args:
        path: JSONL file, one record per line
        frame_index: Frame the records belong to
        source: Which network produced them

    Raises:
        FormatError: missing file, malformed record, RLE sum mismatch, score out of range
        DimensionMismatchError: records disagree on frame size
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FormatError(f"missing input: {path}")

    proposals: List[InstanceProposal] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"{path.name}:{line_no}"
        try:
            record = ProposalRecord(**json.loads(line))
        except (ValueError, TypeError) as e:
            raise FormatError(f"{where}: malformed proposal record ({e})")
        proposals.append(_proposal_from_record(record, where))

    try:
        return FrameProposals(frame_index=frame_index, proposals=proposals, source=source)
    except ValidationError as e:
        raise DimensionMismatchError(f"{path.name}: {e.errors()[0]['msg']}")


def serialize_proposals(fp: FrameProposals) -> List[str]:
    """One JSON line per proposal, in order"""
    lines = []
    for p in fp.proposals:
        record = ProposalRecord(
            category=p.category,
            score=p.score,
            bbox=p.box.to_list(),
            rle=rle_encode(p.mask),
            width=p.mask.width,
            height=p.mask.height,
        )
        lines.append(json.dumps(record.model_dump(), sort_keys=True))
    return lines


def write_proposals(path: Union[str, Path], fp: FrameProposals) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in serialize_proposals(fp)), encoding="utf-8")


def filter_by_score(fp: FrameProposals, score_min: float) -> FrameProposals:
    """Keep proposals with score >= score_min, order preserved"""
    kept = [p for p in fp.proposals if p.score >= score_min]
    return fp.model_copy(update={"proposals": kept})


def select_source(first_frame_instances: FrameProposals, semantic_available: bool) -> ProposalSource:
    """
    Prefer semantic masks when at most one object of each category is present

    Args:
        first_frame_instances: Score-filtered first-frame instance proposals
        semantic_available: Whether semantic masks exist for the first frame
    """
    if not semantic_available:
        return ProposalSource.INSTANCE
    counts = Counter(p.category for p in first_frame_instances.proposals)
    if any(n > 1 for n in counts.values()):
        return ProposalSource.INSTANCE
    return ProposalSource.SEMANTIC


def to_class_agnostic(fp: FrameProposals) -> FrameProposals:
    """Map every category id to the single foreground id"""
    mapped = [p.model_copy(update={"category": FOREGROUND_CATEGORY}) for p in fp.proposals]
    return fp.model_copy(update={"proposals": mapped})
