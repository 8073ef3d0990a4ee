"""
FastAPI Dependencies

Shared settings and error translation for the routers
"""
import os
from functools import lru_cache
from pathlib import Path

from fastapi import HTTPException

from services.exceptions import DOAError, FormatError


@lru_cache()
def get_output_root() -> Path:
    """Default parent of run and synth outputs (cached)"""
    return Path(os.getenv("DOA_OUTPUT_ROOT", "./runs"))


def to_http_error(error: DOAError) -> HTTPException:
    """Missing inputs are 404; every other pipeline error is 422"""
    if isinstance(error, FormatError) and str(error).startswith("missing input"):
        return HTTPException(status_code=404, detail=str(error))
    return HTTPException(
        status_code=422,
        detail={"error": type(error).__name__, "message": str(error), "exit_code": error.exit_code},
    )
