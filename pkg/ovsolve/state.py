"""
Global application state
Shared resources accessible across all modules
"""
from typing import Optional

from ovsolve.core.spectral import ScatteringData
from ovsolve.models import RunConfig

# Scattering data loaded at startup from OV_SCATTERING (if set)
SCATTERING: Optional[ScatteringData] = None

# Default run parameters (applied to HTTP requests that do not override them)
RUN_CONFIG: RunConfig = RunConfig()
