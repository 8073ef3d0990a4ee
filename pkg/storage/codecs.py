"""
Raster Codecs

Byte-level readers/writers for binary PGM (P5), PPM (P6) and Middlebury .flo
"""
import io
from typing import Tuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from services.exceptions import FormatError

FLO_MAGIC = 202021.25

_PNM_MODES = {"P5": "L", "P6": "RGB"}


# ============================================================================
# PGM / PPM
# ============================================================================

def decode_pnm(data: bytes) -> Tuple[str, np.ndarray]:
    """
    Decode a binary PGM/PPM

    Returns:
        (magic, pixels) with pixels shaped (h, w) for P5 or (h, w, 3) for P6
    """
    magic = data[:2].decode("ascii", errors="replace")
    if magic not in _PNM_MODES:
        raise FormatError("not a binary PGM/PPM file")
    try:
        image = Image.open(io.BytesIO(data), formats=["PPM"])
    except (UnidentifiedImageError, ValueError, SyntaxError) as e:
        raise FormatError(f"unreadable {magic} header: {e}")
    # maxval other than 255 is rescaled or widened on load; only the raw 8-bit path passes
    if image.mode != _PNM_MODES[magic] or not image.tile or image.tile[0][0] != "raw":
        raise FormatError(f"maxval must be 255 in a {magic} file")
    try:
        image.load()
    except OSError as e:
        raise FormatError(f"truncated {magic} payload: {e}")
    return magic, np.array(image, dtype=np.uint8)


def _encode(pixels: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(pixels).save(buffer, format="PPM")
    return buffer.getvalue()


def encode_pgm(pixels: np.ndarray) -> bytes:
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    if pixels.ndim != 2:
        raise FormatError(f"PGM needs a 2-D raster, got shape {pixels.shape}")
    return _encode(pixels)


def encode_ppm(pixels: np.ndarray) -> bytes:
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise FormatError(f"PPM needs an (h, w, 3) raster, got shape {pixels.shape}")
    return _encode(pixels)


def to_luminance(rgb: np.ndarray) -> np.ndarray:
    """Y = round(0.299 R + 0.587 G + 0.114 B); Pillow's convert("L") rounds differently"""
    rgb = rgb.astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)


# ============================================================================
# MIDDLEBURY .FLO
# ============================================================================

def decode_flo(data: bytes) -> np.ndarray:
    """Decode a .flo payload into an (h, w, 2) float32 array"""
    if len(data) < 12:
        raise FormatError("truncated .flo header")
    magic = np.frombuffer(data[:4], dtype="<f4")[0]
    if magic != np.float32(FLO_MAGIC):
        raise FormatError(f"bad .flo magic {float(magic)!r}")
    width, height = (int(x) for x in np.frombuffer(data[4:12], dtype="<i4"))
    if width < 1 or height < 1:
        raise FormatError(f"invalid .flo size {width}x{height}")
    expected = width * height * 2 * 4
    payload = data[12:12 + expected]
    if len(payload) != expected:
        raise FormatError(f"truncated .flo payload: {len(payload)} of {expected} bytes")
    vectors = np.frombuffer(payload, dtype="<f4").reshape(height, width, 2)
    if not np.all(np.isfinite(vectors)):
        raise FormatError(".flo contains non-finite values")
    return vectors.astype(np.float32)


def encode_flo(vectors: np.ndarray) -> bytes:
    vectors = np.asarray(vectors)
    if vectors.ndim != 3 or vectors.shape[2] != 2:
        raise FormatError(f"flow needs shape (h, w, 2), got {vectors.shape}")
    height, width = vectors.shape[:2]
    header = np.array([FLO_MAGIC], dtype="<f4").tobytes() + np.array([width, height], dtype="<i4").tobytes()
    return header + np.ascontiguousarray(vectors, dtype="<f4").tobytes()
