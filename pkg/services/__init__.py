"""
DOA Services Layer

One module per pipeline stage; import stages from their modules directly
"""
from .exceptions import (
    ConfigError,
    DimensionMismatchError,
    DOAError,
    EmptyMaskError,
    FormatError,
    NoForegroundFound,
    SelectionError
)

__all__ = [
    "ConfigError",
    "DimensionMismatchError",
    "DOAError",
    "EmptyMaskError",
    "FormatError",
    "NoForegroundFound",
    "SelectionError",
]
