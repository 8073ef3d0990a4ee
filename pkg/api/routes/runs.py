"""
Pipeline Run API Routes
"""
from pathlib import Path

from fastapi import APIRouter, Depends

from models.pipeline import RunRequest, RunSummary
from services.exceptions import DOAError
from services.pipeline_service import run_sequence
from api.dependencies import get_output_root, to_http_error


router = APIRouter(prefix="/runs", tags=["Runs"])


@router.post("", response_model=RunSummary, status_code=201)
def create_run(
    request: RunRequest,
    output_root: Path = Depends(get_output_root)
):
    """
    Run the selection pipeline on one sequence directory

    - **sequence_dir**: Directory with frames/, flow/ and proposals/
    - **out_dir**: Output directory (default: output root / sequence name)
    - **config**: Pipeline configuration; omitted keys take their defaults
    """
    out_dir = request.out_dir or output_root / request.sequence_dir.name
    try:
        return run_sequence(request.sequence_dir, request.config, out_dir, evaluate=request.evaluate)
    except DOAError as e:
        raise to_http_error(e)
