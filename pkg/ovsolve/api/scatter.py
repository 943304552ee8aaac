"""
Direct scattering endpoint
"""
from fastapi import APIRouter

from ovsolve.api.common import solver_errors
from ovsolve.core.scattering import build_profile, reflection
from ovsolve.models import ScatterRequest


router = APIRouter(prefix="/scatter", tags=["scatter"])


@router.post("/reflection")
def reflection_coefficient(request: ScatterRequest):
    """r(z) of an initial profile on the requested real points"""
    with solver_errors():
        prof = build_profile(request.x, request.u0)
        result = reflection(prof, request.z, request.x_match)
    return {
        "z": result.z.tolist(),
        "re_r": result.r.real.tolist(),
        "im_r": result.r.imag.tolist(),
        "diagnostics": result.diagnostics,
    }
