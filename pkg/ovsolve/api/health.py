"""
Health check and system status endpoints
"""
from fastapi import APIRouter

from ovsolve import __version__, state


router = APIRouter(tags=["health"])


@router.get("/")
async def health_check():
    """Health check endpoint"""
    data = state.SCATTERING
    return {
        "status": "ok",
        "message": "OV Solve - inverse scattering service",
        "version": __version__,
        "loaded_poles": data.n_poles if data else 0,
        "loaded_reflectionless": data.is_reflectionless if data else None,
    }
