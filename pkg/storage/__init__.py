"""
DOA Storage Layer

Sequence artifacts (PGM/PPM rasters, .flo fields, JSON) on disk
"""
from .base import BaseStorage
from .file_storage import FileStorage

__all__ = ["BaseStorage", "FileStorage"]
