"""
File Storage Implementation

Artifacts on the local filesystem, rooted at one directory
"""
import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Union

from models.masks import FrameDims
from models.pipeline import SequenceLayout
from services.exceptions import DimensionMismatchError, FormatError
from .base import BaseStorage
from .codecs import decode_pnm

logger = logging.getLogger(__name__)

_FRAME_NAME = re.compile(r"^(\d{5})\.(pgm|ppm)$")
_FLOW_NAME = re.compile(r"^(\d{5})\.flo$")
_JSONL_NAME = re.compile(r"^(\d{5})\.jsonl$")
_MASK_NAME = re.compile(r"^(\d{5})(?:_(\d+))?\.pgm$")


class FileStorage(BaseStorage):
    """Local-disk storage"""

    def __init__(self, root: Union[str, Path]):
        """
        Initialize storage

        Args:
            root: Directory all relative paths resolve against
        """
        # absolute, so layout paths (which embed the root) resolve back to themselves
        self.root = Path(root).resolve()

    def resolve(self, path: str) -> Path:
        return self.root / path

    def read_bytes(self, path: str) -> bytes:
        target = self.resolve(path)
        try:
            return target.read_bytes()
        except FileNotFoundError:
            raise FormatError(f"missing input: {target}")
        except IsADirectoryError:
            raise FormatError(f"expected a file, found a directory: {target}")

    def write_bytes(self, path: str, data: bytes) -> None:
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)

    def exists(self, path: str) -> bool:
        return self.resolve(path).exists()

    def list_dir(self, path: str) -> List[str]:
        target = self.resolve(path)
        if not target.is_dir():
            return []
        return sorted(entry.name for entry in target.iterdir())

    # ========================================================================
    # SEQUENCE LAYOUT
    # ========================================================================

    def _indexed(self, directory: str, pattern: re.Pattern) -> Dict[int, str]:
        found = {}
        for name in self.list_dir(directory):
            match = pattern.match(name)
            if match:
                found[int(match.group(1))] = f"{directory}/{name}"
        return found

    def indexed_masks(self, directory: str, instances: bool = False) -> Dict[int, List[str]]:
        """
        Mask files of a directory keyed by frame index

        Args:
            directory: Directory relative to the root
            instances: Also accept per-instance files <i>_<k>.pgm

        Returns:
            Frame index -> sorted relative paths
        """
        found: Dict[int, List[str]] = {}
        for name in self.list_dir(directory):
            match = _MASK_NAME.match(name)
            if not match or (match.group(2) is not None and not instances):
                continue
            found.setdefault(int(match.group(1)), []).append(f"{directory}/{name}")
        return dict(sorted(found.items()))

    def _raster_dims(self, path: str) -> FrameDims:
        _, pixels = decode_pnm(self.read_bytes(path))
        return FrameDims(width=pixels.shape[1], height=pixels.shape[0])

    def discover_layout(self) -> SequenceLayout:
        """
        Resolve and validate the sequence directory

        Expects frames/, flow/ and proposals/; semantic/, gt/ and predictions/
        are optional.

        Raises:
            FormatError: missing directory, gap in frame indices, missing per-frame file
            DimensionMismatchError: rasters disagree on size
        """
        for required in ("frames", "flow", "proposals"):
            if not self.resolve(required).is_dir():
                raise FormatError(f"missing input directory: {self.resolve(required)}")

        frames = self._indexed("frames", _FRAME_NAME)
        if len(frames) < 2:
            raise FormatError("a sequence needs at least two frames")
        n = len(frames)
        if sorted(frames) != list(range(n)):
            raise FormatError("frame indices must be contiguous from 0")

        flows = self._indexed("flow", _FLOW_NAME)
        n_flows = 0
        while n_flows in flows and n_flows < n:
            n_flows += 1
        if n_flows < n - 1:
            raise FormatError(f"missing input: flow/{n_flows:05d}.flo")

        proposals = self._indexed("proposals", _JSONL_NAME)
        missing = [i for i in range(n) if i not in proposals]
        if missing:
            raise FormatError(f"missing input: proposals/{missing[0]:05d}.jsonl")
        semantic = self._indexed("semantic", _JSONL_NAME)

        gt = {
            i: [self.resolve(p) for p in paths]
            for i, paths in self.indexed_masks("gt", instances=True).items() if i < n
        }
        predictions: Optional[Dict[int, Path]] = None
        if self.resolve("predictions").is_dir():
            predictions = {
                i: self.resolve(paths[0])
                for i, paths in self.indexed_masks("predictions").items() if i < n
            }

        dims = self._raster_dims(frames[0])
        for i in range(1, n):
            other = self._raster_dims(frames[i])
            if other != dims:
                raise DimensionMismatchError(
                    f"frame {i} is {other.width}x{other.height}, frame 0 is {dims.width}x{dims.height}"
                )

        logger.info(
            "Sequence %s: %d frames (%dx%d), %d flows, gt=%d, predictions=%s",
            self.root.name, n, dims.width, dims.height, n_flows, len(gt),
            "none" if predictions is None else len(predictions),
        )
        return SequenceLayout(
            root=self.root,
            frames=[self.resolve(frames[i]) for i in range(n)],
            flows=[self.resolve(flows[i]) for i in range(n_flows)],
            proposals=[self.resolve(proposals[i]) for i in range(n)],
            semantic={i: self.resolve(semantic[i]) for i in sorted(semantic)},
            gt={i: sorted(paths) for i, paths in sorted(gt.items())},
            predictions=predictions,
            dims=dims,
        )
