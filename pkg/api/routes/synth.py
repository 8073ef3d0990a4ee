"""
Synthetic Scene API Routes
"""
from pathlib import Path

from fastapi import APIRouter, Depends

from models.pipeline import SynthRequest
from models.synth import SceneManifest
from services.exceptions import DOAError
from services.synth import generate, standard_scene
from api.dependencies import get_output_root, to_http_error


router = APIRouter(prefix="/synth", tags=["Synthetic Scenes"])


@router.post("", response_model=SceneManifest, status_code=201)
def create_scene(
    request: SynthRequest,
    output_root: Path = Depends(get_output_root)
):
    """
    Generate a synthetic sequence

    - **spec**: Full scene description, or
    - **seed**: Seed of the standard distractor scene
    """
    spec = request.spec if request.spec is not None else standard_scene(request.seed)
    out_dir = request.out_dir or output_root / spec.name
    try:
        return generate(spec, out_dir)
    except DOAError as e:
        raise to_http_error(e)
