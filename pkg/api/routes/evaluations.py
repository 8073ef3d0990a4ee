"""
Evaluation API Routes
"""
from fastapi import APIRouter

from models.metrics import SequenceReport
from models.pipeline import EvaluationRequest
from services.exceptions import DOAError
from services.pipeline_service import evaluate_directories
from api.dependencies import to_http_error


router = APIRouter(prefix="/evaluations", tags=["Evaluation"])


@router.post("", response_model=SequenceReport)
def create_evaluation(request: EvaluationRequest):
    """Score a prediction directory against a ground-truth directory"""
    try:
        return evaluate_directories(
            request.pred_dir, request.gt_dir,
            tol=request.tol, exclude_endpoints=request.exclude_endpoints,
        )
    except DOAError as e:
        raise to_http_error(e)
