"""
N-loop soliton endpoints
"""
import numpy as np
from fastapi import APIRouter, HTTPException

from ovsolve import state
from ovsolve.api.common import request_data, solver_errors
from ovsolve.core.soliton import profile, single_loop_soliton
from ovsolve.models import ClosedFormRequest, ProfileResponse, SolitonRequest
from ovsolve.services.runner import y_values


router = APIRouter(prefix="/soliton", tags=["soliton"])


@router.post("/profile", response_model=ProfileResponse)
def soliton_profile(request: SolitonRequest):
    """
    Reflectionless N-soliton profile on a y grid

    Request:
        {"poles": [{"re": 0.866, "im": 0.5, "c_re": -0.866, "c_im": 0.5}], "t": 0}

    Response:
        {"t": 0, "monotone_x": false, "y": [...], "x": [...], "u": [...]}
    """
    with solver_errors():
        data = request_data(request.poles, request.use_loaded)
        if not data.is_reflectionless:
            raise HTTPException(status_code=400, detail="loaded data carries a reflection coefficient; use /asympt/profile")
        prof = profile(data, y_values(request.y), request.t, threads=state.RUN_CONFIG.threads)
    return ProfileResponse(
        t=prof.t, monotone_x=prof.monotone_x, y=prof.y.tolist(), x=prof.x.tolist(), u=prof.u.tolist()
    )


@router.post("/closed-form", response_model=ProfileResponse)
def closed_form(request: ClosedFormRequest):
    """Single loop soliton from (rho, phi, c_hat)"""
    y = y_values(request.y)
    with solver_errors():
        points = [single_loop_soliton(request.rho, request.phi, request.c_hat, yy, request.t) for yy in y]
    x = np.array([p[0] for p in points])
    u = np.array([p[1] for p in points])
    return ProfileResponse(
        t=request.t, monotone_x=bool(np.all(np.diff(x) > 0)), y=y.tolist(), x=x.tolist(), u=u.tolist()
    )
