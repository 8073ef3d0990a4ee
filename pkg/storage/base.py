"""
Base Storage Interface

Byte-level artifact access plus the typed readers/writers every backend shares
"""
from abc import ABC, abstractmethod
from typing import Any, List

import numpy as np
import ujson as json

from models.flow import FlowField
from models.masks import BinaryMask
from models.selection import GrayFrame, LabelMap, LabelMode
from services.exceptions import FormatError
from .codecs import (
    decode_flo, decode_pnm, encode_flo, encode_pgm, encode_ppm, to_luminance
)


def dumps_stable(obj: Any) -> str:
    """Pretty-printed JSON with sorted keys and a trailing newline"""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class BaseStorage(ABC):
    """Abstract base class for sequence artifact storage"""

    @abstractmethod
    def read_bytes(self, path: str) -> bytes:
        """
        Read a whole artifact

        Args:
            path: Path relative to the storage root

        Raises:
            FormatError: artifact does not exist
        """
        pass

    @abstractmethod
    def write_bytes(self, path: str, data: bytes) -> None:
        """Write (or overwrite) an artifact, creating parent directories"""
        pass

    @abstractmethod
    def exists(self, path: str) -> bool:
        pass

    @abstractmethod
    def list_dir(self, path: str) -> List[str]:
        """Sorted entry names of a directory; empty if it does not exist"""
        pass

    # ========================================================================
    # MASKS AND FRAMES
    # ========================================================================

    def read_mask(self, path: str) -> BinaryMask:
        """Read a PGM mask; pixels must be 0 or 255"""
        magic, pixels = decode_pnm(self.read_bytes(path))
        if magic != "P5":
            raise FormatError(f"{path}: masks must be PGM (P5), got {magic}")
        if not np.isin(pixels, (0, 255)).all():
            raise FormatError(f"{path}: mask pixels must be 0 or 255")
        return BinaryMask(bits=pixels == 255)

    def write_mask(self, path: str, mask: BinaryMask) -> None:
        self.write_bytes(path, encode_pgm(np.where(mask.bits, 255, 0).astype(np.uint8)))

    def read_gray(self, path: str) -> GrayFrame:
        """Read a PGM frame, or a PPM frame converted to luminance"""
        magic, pixels = decode_pnm(self.read_bytes(path))
        if magic == "P6":
            pixels = to_luminance(pixels)
        return GrayFrame(intensity=pixels)

    def write_gray(self, path: str, frame: GrayFrame) -> None:
        self.write_bytes(path, encode_pgm(frame.intensity))

    def write_rgb(self, path: str, rgb: np.ndarray) -> None:
        self.write_bytes(path, encode_ppm(rgb))

    def read_label_map(self, path: str) -> LabelMap:
        magic, pixels = decode_pnm(self.read_bytes(path))
        if magic != "P5":
            raise FormatError(f"{path}: label maps must be PGM (P5)")
        sidecar = self.read_json(path.rsplit(".", 1)[0] + ".json")
        try:
            return LabelMap(labels=pixels, mode=LabelMode(sidecar["mode"]))
        except (KeyError, ValueError) as e:
            raise FormatError(f"{path}: {e}")

    def write_label_map(self, path: str, labels: LabelMap) -> None:
        self.write_bytes(path, encode_pgm(labels.labels))
        self.write_json(path.rsplit(".", 1)[0] + ".json", {"mode": labels.mode.value})

    # ========================================================================
    # FLOW
    # ========================================================================

    def read_flow(self, path: str) -> FlowField:
        return FlowField(vectors=decode_flo(self.read_bytes(path)))

    def write_flow(self, path: str, flow: FlowField) -> None:
        self.write_bytes(path, encode_flo(flow.vectors))

    # ========================================================================
    # JSON
    # ========================================================================

    def read_json(self, path: str) -> Any:
        try:
            return json.loads(self.read_bytes(path).decode("utf-8"))
        except ValueError as e:
            raise FormatError(f"{path}: invalid JSON ({e})")

    def write_json(self, path: str, obj: Any) -> None:
        self.write_bytes(path, dumps_stable(obj).encode("utf-8"))

    def write_lines(self, path: str, lines: List[str]) -> None:
        self.write_bytes(path, "".join(line + "\n" for line in lines).encode("utf-8"))
