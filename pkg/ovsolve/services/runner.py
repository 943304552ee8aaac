"""
Run pipelines shared by the CLI and the HTTP routers

Each run_* function takes a validated RunConfig, writes its data files into
the output directory and returns the manifest it wrote.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

from ovsolve import FORMAT_VERSION, __version__
from ovsolve.config import load_scattering_file, write_scattering_file
from ovsolve.core.conjugation import diagnostics_table
from ovsolve.core.errors import ConfigurationError
from ovsolve.core.local_model import AsymptoticResult, asymptotic_solution
from ovsolve.core.oracle import FieldState, compare, evolve, grid, state_from_samples
from ovsolve.core.scattering import build_profile, pole_search, reflection
from ovsolve.core.soliton import ParametricProfile, closed_form_parameters, profile, resolution_error
from ovsolve.core.spectral import ScatteringData, phase_geometry, soliton_velocities, stability_bound, time_evolve
from ovsolve.models import RunConfig, YGrid
from ovsolve.utils import read_csv_columns, write_csv, write_json


logger = logging.getLogger(__name__)

PROFILE_HEADER = ("y", "x", "u")
ASYMPT_HEADER = ("y", "x", "u", "region", "order", "g", "f", "f_t")
MANIFEST_NAME = "manifest.json"


# ==================== HELPERS ====================

def y_values(spec: YGrid) -> np.ndarray:
    return np.linspace(spec.y_min, spec.y_max, spec.n_y)


def z_values(z_max: float, n_z: int) -> np.ndarray:
    """Uniform grid on [-z_max, z_max] with z = 0 removed"""
    z = np.linspace(-z_max, z_max, n_z)
    return z[z != 0]


def tag(t: float) -> str:
    """File-name tag for a time value, e.g. 't10' or 't0.5'"""
    return f"t{t:g}"


def versions() -> Dict[str, str]:
    return {"ovsolve": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def require(path: Optional[str], key: str) -> Path:
    """
    Raises:
        ConfigurationError: If the key is unset
        FileNotFoundError: If the file does not exist
    """
    if not path:
        raise ConfigurationError(f"'{key}' is required for this subcommand")
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{key} file not found: {p}")
    return p


def write_manifest(out_dir: Path, config: RunConfig, outputs: List[str], results: Dict[str, Any]) -> Dict[str, Any]:
    manifest = {
        "format_version": FORMAT_VERSION,
        "subcommand": config.subcommand,
        "config": config.model_dump(),
        "versions": versions(),
        "outputs": sorted(outputs),
        "results": results,
    }
    write_json(out_dir / MANIFEST_NAME, manifest)
    logger.info(f"Wrote {len(outputs)} data files and {MANIFEST_NAME} to {out_dir}")
    return manifest


def pole_summary(data: ScatteringData) -> List[Dict[str, Any]]:
    """Per base pole: location, velocity and single-soliton parameters"""
    out = []
    for pole, velocity in zip(data.poles, soliton_velocities(data.poles)):
        params = closed_form_parameters(pole)
        out.append({
            "xi": pole.xi,
            "c": pole.c,
            "kind": pole.kind.value,
            "velocity": velocity,
            "rho": params.rho,
            "phi": params.phi,
            "c_hat": params.c_hat,
            "regular": params.regular,
        })
    return out


def asymptotic_sweep(
    data: ScatteringData, y: Sequence[float], t: float, t_min: float, epsrel: float, threads: int = 1,
) -> List[AsymptoticResult]:
    def one(yy: float) -> AsymptoticResult:
        return asymptotic_solution(data, yy, t, t_min, epsrel)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, list(y)))
    return [one(yy) for yy in y]


def asymptotic_rows(y: Sequence[float], results: Sequence[AsymptoticResult]) -> List[Tuple]:
    rows = []
    for yy, res in zip(y, results):
        d = res.diagnostics
        rows.append((
            float(yy), res.x, res.u, res.region.value, res.error_order,
            d.get("g", 0.0), d.get("f", 0.0), d.get("f_t", 0.0),
        ))
    return rows


def read_profile_csv(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    cols = read_csv_columns(path, ("x", "u"))
    return cols["x"], cols["u"]


def read_parametric_csv(path: Path, t: float = 0.0) -> ParametricProfile:
    cols = read_csv_columns(path, PROFILE_HEADER)
    x = cols["x"]
    return ParametricProfile(y=cols["y"], x=x, u=cols["u"], t=t, monotone_x=bool(np.all(np.diff(x) > 0)))


# ==================== PIPELINES ====================

def run_soliton(config: RunConfig, out_dir: Path) -> Dict[str, Any]:
    """N-loop soliton profiles at every t in t_values"""
    data = load_scattering_file(require(config.scattering, "scattering"))
    if not data.is_reflectionless:
        raise ConfigurationError("soliton needs reflectionless data (reflection: zero); use asympt")
    y = y_values(config.y)
    outputs, monotone = [], {}
    for t in config.t_values:
        prof = profile(data, y, t, threads=config.threads)
        name = f"profile_{tag(t)}.csv"
        write_csv(out_dir / name, PROFILE_HEADER, prof.rows())
        outputs.append(name)
        monotone[tag(t)] = prof.monotone_x
    results = {
        "n_poles": data.n_poles,
        "poles": pole_summary(data),
        "monotone_x": monotone,
        "constants_at_t": {tag(t): [c for _, c in time_evolve(data, t)] for t in config.t_values},
    }
    return write_manifest(out_dir, config, outputs, results)


def run_asympt(config: RunConfig, out_dir: Path) -> Dict[str, Any]:
    """
    Long-time asymptotic profiles

    Writes profile_<t>.csv (y, x, u; identical to the soliton output when
    r = 0) and asympt_<t>.csv with region, error order and corrections.
    """
    data = load_scattering_file(require(config.scattering, "scattering"))
    y = y_values(config.y)
    outputs: List[str] = []
    for t in config.t_values:
        points = asymptotic_sweep(data, y, t, config.t_min, config.quad_epsrel, config.threads)
        rows = asymptotic_rows(y, points)
        name = f"profile_{tag(t)}.csv"
        write_csv(out_dir / name, PROFILE_HEADER, [row[:3] for row in rows])
        detail = f"asympt_{tag(t)}.csv"
        write_csv(out_dir / detail, ASYMPT_HEADER, rows)
        outputs += [name, detail]

    if config.diagnostics_xi is not None and not data.is_reflectionless:
        geometry = phase_geometry(config.diagnostics_xi, 1.0)
        table = diagnostics_table(data.reflection, geometry, config.diagnostics_points)
        name = "conjugation_diagnostics.csv"
        write_csv(
            out_dir / name,
            ("s", "nu", "delta_plus_re", "delta_plus_im", "delta_minus_re", "delta_minus_im"),
            [(s, n, dp.real, dp.imag, dm.real, dm.imag) for s, n, dp, dm in table],
        )
        outputs.append(name)

    results = {
        "n_poles": data.n_poles,
        "reflectionless": data.is_reflectionless,
        "sup_abs_r": data.reflection.sup_abs(),
        "poles": pole_summary(data),
    }
    return write_manifest(out_dir, config, outputs, results)


def run_scatter(config: RunConfig, out_dir: Path) -> Dict[str, Any]:
    """Reflection coefficient and discrete spectrum of an initial profile"""
    x, u0 = read_profile_csv(require(config.input, "input"))
    prof = build_profile(x, u0)
    z = z_values(config.z_max, config.n_z)
    result = reflection(prof, z, config.x_match, config.x_check, threads=config.threads)
    poles = pole_search(prof, (config.modulus_min, config.modulus_max), config.n_scan, config.x_match)

    write_csv(
        out_dir / "reflection.csv",
        ("z", "re_r", "im_r", "abs_r"),
        zip(result.z, result.r.real, result.r.imag, np.abs(result.r)),
    )
    write_scattering_file(out_dir / "scattering.yaml", poles, result.z, result.r)
    outputs = ["reflection.csv", "scattering.yaml"]
    if np.any(result.r):
        outputs.append("scattering.reflection.csv")
    results = {
        "n_poles": len(poles),
        "poles": [{"xi": p.xi, "c": p.c, "kind": p.kind.value} for p in poles],
        "diagnostics": result.diagnostics,
    }
    return write_manifest(out_dir, config, outputs, results)


def run_evolve(config: RunConfig, out_dir: Path) -> Dict[str, Any]:
    """Pseudospectral evolution of an initial profile"""
    params = config.oracle
    x, u = read_profile_csv(require(config.input, "input"))
    start = state_from_samples(x, u, params.L, params.modes)
    snaps = evolve(start, params.T, params.dt, params.snap_every)
    outputs = []
    for snap in snaps:
        name = f"oracle_{tag(snap.t)}.csv"
        write_csv(out_dir / name, ("x", "u"), zip(snap.x, snap.u))
        outputs.append(name)
    final = snaps[-1]
    results = {
        "steps_written": len(snaps),
        "t_final": final.t,
        "mean": final.mean,
        "high_mode_fraction": final.high_mode_fraction(),
        "boundary_level": final.boundary_level(),
    }
    return write_manifest(out_dir, config, outputs, results)


def snapshot_state(path: Path, L: float, t: float = 0.0) -> FieldState:
    """Oracle snapshot from CSV; samples off the periodic grid are interpolated"""
    x, u = read_profile_csv(path)
    if x.size and np.allclose(x, grid(L, x.size)):
        return FieldState(u=u, t=t, L=L)
    return state_from_samples(x, u, L, max(8, x.size), t)


def run_compare(config: RunConfig, out_dir: Path) -> Dict[str, Any]:
    """
    Error tables

    - resolution.csv: t, sup_y |u_N - sum of dressed single solitons| (scattering)
    - oracle distance between a snapshot (input) and an exact profile (exact)
    - stability bound between scattering and reference data
    """
    outputs: List[str] = []
    results: Dict[str, Any] = {}
    data = None
    if config.scattering:
        data = load_scattering_file(require(config.scattering, "scattering"))
        y = y_values(config.y)
        table = [(t, resolution_error(data, y, t)) for t in config.t_values]
        write_csv(out_dir / "resolution.csv", ("t", "resolution_error"), table)
        outputs.append("resolution.csv")
        results["resolution"] = {tag(t): err for t, err in table}

    if config.reference:
        if data is None:
            raise ConfigurationError("'reference' needs 'scattering' to compare against")
        reference = load_scattering_file(require(config.reference, "reference"))
        results["stability_bound"] = stability_bound(data, reference)

    if config.input or config.exact:
        state = snapshot_state(require(config.input, "input"), config.oracle.L)
        exact = read_parametric_csv(require(config.exact, "exact"))
        linf, l2 = compare(exact, state)
        results["oracle"] = {"linf": linf, "l2": l2}

    if not results:
        raise ConfigurationError("compare needs at least one of scattering, reference or input/exact")
    return write_manifest(out_dir, config, outputs, results)


PIPELINES = {
    "soliton": run_soliton,
    "asympt": run_asympt,
    "scatter": run_scatter,
    "evolve": run_evolve,
    "compare": run_compare,
}


def run(config: RunConfig, out_dir: Optional[Path] = None) -> Dict[str, Any]:
    """Dispatch on config.subcommand"""
    out_dir = Path(out_dir or config.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Running {config.subcommand} -> {out_dir}")
    return PIPELINES[config.subcommand](config, out_dir)
