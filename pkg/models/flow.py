"""
Flow Models

Optical-flow fields and the motion masks derived from them
"""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .masks import BinaryMask


class FlowField(BaseModel):
    """Per-pixel (u, v) motion in pixels/frame, shape (height, width, 2)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vectors: np.ndarray = Field(..., description="Row-major interleaved (u, v) pairs")

    @field_validator("vectors", mode="before")
    @classmethod
    def _check_vectors(cls, value):
        arr = np.array(value, dtype=np.float64, copy=True)
        if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"flow must have shape (height, width, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("flow contains non-finite components")
        arr.flags.writeable = False
        return arr

    @classmethod
    def from_components(cls, u, v) -> "FlowField":
        return cls(vectors=np.stack([np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64)], axis=-1))

    @classmethod
    def zeros(cls, width: int, height: int) -> "FlowField":
        return cls(vectors=np.zeros((height, width, 2)))

    @property
    def width(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def height(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def u(self) -> np.ndarray:
        return self.vectors[..., 0]

    @property
    def v(self) -> np.ndarray:
        return self.vectors[..., 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FlowField):
            return NotImplemented
        return bool(np.array_equal(self.vectors, other.vectors))

    def __hash__(self) -> int:
        return hash(self.vectors.tobytes())


class MotionMask(BaseModel):
    """Binary motion mask M with the saliency threshold that produced it"""
    model_config = ConfigDict(frozen=True)

    mask: BinaryMask
    threshold_used: float = Field(0.0, description="Otsu threshold on normalized residual magnitude")
    frame_index: Optional[int] = Field(None, ge=0)

    @property
    def bits(self) -> np.ndarray:
        return self.mask.bits

    @property
    def width(self) -> int:
        return self.mask.width

    @property
    def height(self) -> int:
        return self.mask.height
