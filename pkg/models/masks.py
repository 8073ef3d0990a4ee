"""
Mask Models

Binary rasters and bounding boxes shared by every pipeline stage
"""
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen_array(value, dtype) -> np.ndarray:
    arr = np.array(value, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


# ============================================================================
# BINARY MASK
# ============================================================================

class BinaryMask(BaseModel):
    """Per-pixel foreground/background raster, stored as a (height, width) bool array"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bits: np.ndarray = Field(..., description="Row-major boolean raster, shape (height, width)")

    @field_validator("bits", mode="before")
    @classmethod
    def _check_bits(cls, value):
        arr = np.asarray(value)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"mask must be a non-empty 2-D raster, got shape {arr.shape}")
        return _frozen_array(arr, bool)

    @classmethod
    def empty(cls, width: int, height: int) -> "BinaryMask":
        return cls(bits=np.zeros((height, width), dtype=bool))

    @classmethod
    def full(cls, width: int, height: int) -> "BinaryMask":
        return cls(bits=np.ones((height, width), dtype=bool))

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    @property
    def area(self) -> int:
        return int(np.count_nonzero(self.bits))

    def is_empty(self) -> bool:
        return not self.bits.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.bits.shape, np.packbits(self.bits).tobytes()))


# ============================================================================
# BOUNDING BOX
# ============================================================================

class BBox(BaseModel):
    """Axis-aligned box; x, y inclusive top-left corner"""
    model_config = ConfigDict(frozen=True)

    x: int = Field(..., ge=0, description="Left column (inclusive)")
    y: int = Field(..., ge=0, description="Top row (inclusive)")
    w: int = Field(..., ge=1, description="Width in pixels")
    h: int = Field(..., ge=1, description="Height in pixels")

    @property
    def x2(self) -> int:
        """Exclusive right edge"""
        return self.x + self.w

    @property
    def y2(self) -> int:
        """Exclusive bottom edge"""
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def fits(self, width: int, height: int) -> bool:
        return self.x2 <= width and self.y2 <= height

    def to_list(self) -> list:
        return [self.x, self.y, self.w, self.h]

    def to_mask(self, width: int, height: int) -> BinaryMask:
        """Rasterize the box into a frame of the given size"""
        bits = np.zeros((height, width), dtype=bool)
        bits[self.y:self.y2, self.x:self.x2] = True
        return BinaryMask(bits=bits)


class FrameDims(BaseModel):
    """Frame size in pixels"""
    model_config = ConfigDict(frozen=True)

    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)

    @model_validator(mode="before")
    @classmethod
    def _from_pair(cls, value):
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return {"width": value[0], "height": value[1]}
        return value

    @property
    def diagonal(self) -> float:
        return float(np.hypot(self.width, self.height))
