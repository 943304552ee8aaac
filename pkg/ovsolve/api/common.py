"""
Shared helpers for the routers: error translation and scattering-data lookup
"""
import logging
from contextlib import contextmanager
from typing import List, Optional, Sequence, Tuple

import numpy as np
from fastapi import HTTPException
from pydantic import ValidationError

from ovsolve import state
from ovsolve.config import scattering_from_model
from ovsolve.core.errors import ConfigurationError, DomainError, DomainGateError, NumericalError
from ovsolve.core.spectral import ScatteringData
from ovsolve.models import PoleSpec, ScatteringFile


logger = logging.getLogger(__name__)


def status_for(exc: Exception) -> int:
    """HTTP status of a solver error"""
    if isinstance(exc, ValidationError):
        return 422
    if isinstance(exc, ConfigurationError):
        return 400
    if isinstance(exc, (DomainGateError, DomainError)):
        return 409
    if isinstance(exc, NumericalError):
        return 500
    if isinstance(exc, ValueError):
        return 400
    return 500


@contextmanager
def solver_errors():
    """Re-raise solver exceptions as HTTPException"""
    try:
        yield
    except HTTPException:
        raise
    except Exception as exc:
        code = status_for(exc)
        if code == 500:
            logger.error(f"❌ Solver failure: {exc}")
        raise HTTPException(status_code=code, detail=str(exc)) from exc


def request_data(
    poles: List[PoleSpec],
    use_loaded: bool,
    samples: Optional[Sequence[Tuple[float, float, float]]] = None,
) -> ScatteringData:
    """
    Scattering data of a request: its own poles and samples, or the data loaded at startup

    Raises:
        HTTPException: 400 if use_loaded is set but nothing was loaded
    """
    if use_loaded:
        if state.SCATTERING is None:
            raise HTTPException(status_code=400, detail="No scattering data loaded (set OV_SCATTERING)")
        return state.SCATTERING
    arrays = None
    if samples:
        table = np.asarray(samples, dtype=float)
        arrays = (table[:, 0], table[:, 1] + 1j * table[:, 2])
    return scattering_from_model(ScatteringFile(poles=poles), samples=arrays)
