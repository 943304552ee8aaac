"""
Pseudospectral evolution endpoint
"""
from fastapi import APIRouter

from ovsolve.api.common import solver_errors
from ovsolve.core.oracle import evolve, state_from_samples
from ovsolve.models import EvolveRequest


router = APIRouter(prefix="/evolve", tags=["evolve"])


@router.post("/run")
def run_oracle(request: EvolveRequest):
    """Evolve sampled data on the periodic grid and return the final state"""
    params = request.oracle
    with solver_errors():
        start = state_from_samples(request.x, request.u, params.L, params.modes)
        final = evolve(start, params.T, params.dt)[-1]
    return {
        "t": final.t,
        "x": final.x.tolist(),
        "u": final.u.tolist(),
        "mean": final.mean,
        "high_mode_fraction": final.high_mode_fraction(),
    }
