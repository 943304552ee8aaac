"""
Long-time asymptotics endpoint
"""
from fastapi import APIRouter

from ovsolve import state
from ovsolve.api.common import request_data, solver_errors
from ovsolve.models import AsymptRequest
from ovsolve.services.runner import asymptotic_sweep, y_values


router = APIRouter(prefix="/asympt", tags=["asympt"])


@router.post("/profile")
def asymptotic_profile(request: AsymptRequest):
    """
    Leading-order profile with region tags and error orders

    Response:
        {"t": 50, "y": [...], "x": [...], "u": [...], "region": ["I", ...], "order": ["t^-3/4", ...]}
    """
    y = y_values(request.y)
    with solver_errors():
        data = request_data(request.poles, request.use_loaded, request.reflection)
        config = state.RUN_CONFIG
        points = asymptotic_sweep(data, y, request.t, request.t_min, config.quad_epsrel, config.threads)
    return {
        "t": request.t,
        "y": y.tolist(),
        "x": [p.x for p in points],
        "u": [p.u for p in points],
        "region": [p.region.value for p in points],
        "order": [p.error_order for p in points],
    }
