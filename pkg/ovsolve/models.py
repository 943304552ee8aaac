"""
Data models: file schemas, run configuration and HTTP payloads
"""
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from ovsolve import FORMAT_VERSION


PoleKindName = Literal["type1", "type2"]
Subcommand = Literal["soliton", "asympt", "scatter", "evolve", "compare"]


class PoleSpec(BaseModel):
    """One base pole as written in a scattering-data file"""
    re: float
    im: float
    c_re: float
    c_im: float = 0.0
    kind: PoleKindName = "type1"


class ScatteringFile(BaseModel):
    """
    Scattering-data document

    reflection is either "zero" or a path to a CSV with columns z, re_r, im_r
    (relative paths resolve against the document's directory).
    """
    format_version: str = FORMAT_VERSION
    poles: List[PoleSpec] = Field(default_factory=list)
    reflection: str = "zero"
    z_max: float = Field(default=20.0, gt=0)
    n_grid: int = Field(default=4001, ge=3)


class YGrid(BaseModel):
    y_min: float = -10.0
    y_max: float = 10.0
    n_y: int = Field(default=401, ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if self.y_max <= self.y_min:
            raise ValueError(f"y_max ({self.y_max}) must exceed y_min ({self.y_min})")
        return self


class OracleParams(BaseModel):
    """Periodic pseudospectral run"""
    L: float = Field(default=200.0, gt=0)   # domain length
    modes: int = Field(default=1024, ge=8)   # grid points
    dt: float = Field(default=1e-3, gt=0)
    T: float = Field(default=10.0, ge=0)
    snap_every: Optional[int] = Field(default=None, ge=1)


class RunConfig(BaseModel):
    """Run configuration shared by every subcommand; CLI flags override these keys"""
    format_version: str = FORMAT_VERSION
    subcommand: Subcommand = "soliton"
    scattering: Optional[str] = None        # scattering-data file (soliton, asympt, compare)
    reference: Optional[str] = None         # second scattering file for the stability bound (compare)
    input: Optional[str] = None             # profile CSV x,u (scatter, evolve) or oracle snapshot (compare)
    exact: Optional[str] = None             # exact profile CSV y,x,u (compare)
    output: str = "out"
    y: YGrid = Field(default_factory=YGrid)
    t_values: List[float] = Field(default_factory=lambda: [0.0])
    t_min: float = Field(default=10.0, gt=0)
    quad_epsrel: float = Field(default=1e-10, gt=0)
    diagnostics_xi: Optional[float] = Field(default=None, lt=0)   # y/t for the (s, nu, delta+-) dump (asympt)
    diagnostics_points: int = Field(default=50, ge=1)
    # direct scattering
    z_max: float = Field(default=10.0, gt=0)
    n_z: int = Field(default=200, ge=2)
    x_match: float = 0.0
    x_check: Optional[float] = None
    modulus_min: float = Field(default=0.2, gt=0)
    modulus_max: float = Field(default=5.0, gt=0)
    n_scan: int = Field(default=200, ge=2)
    oracle: OracleParams = Field(default_factory=OracleParams)
    threads: int = Field(default=1, ge=1)

    @field_validator("t_values")
    @classmethod
    def _non_empty(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("t_values must not be empty")
        return v

    @model_validator(mode="after")
    def _modulus_range(self):
        if self.modulus_max <= self.modulus_min:
            raise ValueError("modulus_max must exceed modulus_min")
        return self


# ==================== HTTP PAYLOADS ====================

class SolitonRequest(BaseModel):
    poles: List[PoleSpec] = Field(default_factory=list)
    use_loaded: bool = False    # take poles from the scattering data loaded at startup
    y: YGrid = Field(default_factory=YGrid)
    t: float = Field(default=0.0, ge=0)


class ClosedFormRequest(BaseModel):
    rho: float = Field(gt=0)
    phi: float
    c_hat: float = Field(gt=0)
    y: YGrid = Field(default_factory=YGrid)
    t: float = 0.0


class AsymptRequest(BaseModel):
    poles: List[PoleSpec] = Field(default_factory=list)
    use_loaded: bool = False
    reflection: List[Tuple[float, float, float]] = Field(default_factory=list)  # (z, re r, im r); empty = zero
    y: YGrid = Field(default_factory=YGrid)
    t: float = Field(gt=0)
    t_min: float = Field(default=10.0, gt=0)


class ScatterRequest(BaseModel):
    x: List[float]
    u0: List[float]
    z: List[float]
    x_match: float = 0.0


class EvolveRequest(BaseModel):
    x: List[float]
    u: List[float]
    oracle: OracleParams = Field(default_factory=OracleParams)


class ProfileResponse(BaseModel):
    t: float
    monotone_x: bool
    y: List[float]
    x: List[float]
    u: List[float]
