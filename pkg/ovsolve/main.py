"""
FastAPI main application
OV Solve - inverse scattering service for the Ostrovsky-Vakhnenko equation

Modular architecture with separated API routers in ovsolve/api/:
- health.py: Health check and loaded-data status
- soliton.py: N-loop soliton profiles and the closed-form single soliton
- asympt.py: Long-time asymptotic profiles
- scatter.py: Reflection coefficient of an initial profile
- evolve.py: Pseudospectral reference evolution

All routers access shared state via ovsolve.state module.
"""
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from contextlib import asynccontextmanager
import logging
import os

from ovsolve import __version__, state
from ovsolve.config import load_run_config, load_scattering_file
from ovsolve.models import RunConfig

# Import all API routers
from ovsolve.api import health, soliton, asympt, scatter, evolve


# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

CONFIG_ENV = "OV_CONFIG"
SCATTERING_ENV = "OV_SCATTERING"


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Startup and shutdown events"""
    # Startup: run parameters and scattering data into global state when configured
    config_path = os.environ.get(CONFIG_ENV)
    if config_path:
        state.RUN_CONFIG = load_run_config(config_path)
        logger.info(f"✅ Run parameters loaded from {config_path}")

    path = os.environ.get(SCATTERING_ENV)
    if path:
        try:
            state.SCATTERING = load_scattering_file(path)
            logger.info(f"✅ Server started with {state.SCATTERING.n_poles} poles from {path}")
        except Exception as e:
            logger.error(f"❌ Failed to load scattering data: {e}")
            raise
    else:
        logger.info("✅ Server started without preloaded scattering data")

    yield

    # Shutdown
    state.SCATTERING = None
    state.RUN_CONFIG = RunConfig()
    logger.info("🛑 Server shutting down")


# Create FastAPI app
app = FastAPI(
    title="OV Solve",
    description="N-loop solitons, long-time asymptotics and direct scattering for the OV equation",
    version=__version__,
    lifespan=lifespan
)

# CORS middleware (allow all origins for development)
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# ==================== INCLUDE ROUTERS ====================

# Health check (GET /)
app.include_router(health.router)

# Soliton profiles (POST /soliton/profile, /soliton/closed-form)
app.include_router(soliton.router)

# Asymptotics (POST /asympt/profile)
app.include_router(asympt.router)

# Direct scattering (POST /scatter/reflection)
app.include_router(scatter.router)

# Oracle (POST /evolve/run)
app.include_router(evolve.router)


# ==================== RUN SERVER ====================

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
