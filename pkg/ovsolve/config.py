"""
YAML loaders for run configurations and scattering-data files
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from pydantic import ValidationError

from ovsolve.core.errors import ConfigurationError
from ovsolve.core.spectral import BasePole, PoleKind, ReflectionCoefficient, ScatteringData
from ovsolve.models import PoleSpec, RunConfig, ScatteringFile
from ovsolve.utils import read_csv_columns, write_csv


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

REFLECTION_COLUMNS = ("z", "re_r", "im_r")


def _read_yaml(path: PathLike) -> dict:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"YAML file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        content = yaml.safe_load(f)
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return content


def load_run_config(path: Optional[PathLike]) -> RunConfig:
    """
    Load and validate a run configuration

    Args:
        path: YAML file, or None for defaults; relative file keys resolve against its directory

    Raises:
        FileNotFoundError: If the file does not exist
        pydantic.ValidationError: If a key has an invalid value
    """
    if path is None:
        return RunConfig()
    config = resolve_paths(RunConfig.model_validate(_read_yaml(path)), Path(path).parent)
    logger.info(f"Loaded run configuration from {path}")
    return config


def pole_from_spec(spec: PoleSpec) -> BasePole:
    """
    Raises:
        ConfigurationError: If the pole is off the ray, at 0, or has c = 0
    """
    try:
        return BasePole(xi=complex(spec.re, spec.im), c=complex(spec.c_re, spec.c_im), kind=PoleKind(spec.kind))
    except ConfigurationError as exc:
        raise ConfigurationError(f"pole (re={spec.re}, im={spec.im}): {exc}") from exc


def pole_to_spec(pole: BasePole) -> PoleSpec:
    return PoleSpec(re=pole.xi.real, im=pole.xi.imag, c_re=pole.c.real, c_im=pole.c.imag, kind=pole.kind.value)


def reflection_from_samples(
    z: Sequence[float], values: Sequence[complex], z_max: float, n_grid: int
) -> ReflectionCoefficient:
    """Resample r onto the uniform grid of n_grid points over [-z_max, z_max]"""
    source = ReflectionCoefficient(np.asarray(z, dtype=float), np.asarray(values, dtype=complex))
    return ReflectionCoefficient.from_function(source, z_max=z_max, n_grid=n_grid)


def scattering_from_model(
    model: ScatteringFile, base_dir: Optional[PathLike] = None,
    samples: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> ScatteringData:
    """
    Build ScatteringData from a validated document

    Args:
        model: Parsed scattering file
        base_dir: Directory for relative reflection paths
        samples: Inline (z, r) samples overriding model.reflection
    """
    poles = tuple(pole_from_spec(spec) for spec in model.poles)
    if samples is not None and len(samples[0]):
        reflection = reflection_from_samples(samples[0], samples[1], model.z_max, model.n_grid)
    elif model.reflection.strip().lower() == "zero":
        reflection = ReflectionCoefficient.zero()
    else:
        path = Path(model.reflection)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        cols = read_csv_columns(path, REFLECTION_COLUMNS)
        reflection = reflection_from_samples(cols["z"], cols["re_r"] + 1j * cols["im_r"], model.z_max, model.n_grid)
        logger.info(f"Loaded reflection samples from {path} ({cols['z'].size} rows)")
    return ScatteringData(reflection, poles)


def load_scattering_file(path: PathLike) -> ScatteringData:
    """
    Load a scattering-data YAML document

    Example document:
        poles:
          - {re: 0.8660254037844387, im: 0.5, c_re: -0.8660254037844386, c_im: 0.5, kind: type1}
        reflection: zero

    Raises:
        FileNotFoundError: If the document or its reflection CSV is missing
        ConfigurationError: On invalid poles or reflection samples
    """
    path = Path(path)
    try:
        model = ScatteringFile.model_validate(_read_yaml(path))
    except ValidationError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    data = scattering_from_model(model, base_dir=path.parent)
    logger.info(f"Loaded scattering data from {path}: {data.n_poles} poles, reflectionless={data.is_reflectionless}")
    return data


def write_scattering_file(
    path: PathLike, poles: Sequence[BasePole], z: Optional[np.ndarray] = None, r: Optional[np.ndarray] = None,
    z_max: Optional[float] = None, n_grid: Optional[int] = None,
) -> Path:
    """
    Write a scattering document; nonzero r goes to a sibling CSV referenced by relative path

    z_max defaults to the largest |z| of the written samples and n_grid to the
    document default, so loading the file resamples r over the range it was sampled on.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    reflection = "zero"
    if z is not None and r is not None and np.any(r):
        csv_path = path.with_suffix(".reflection.csv")
        write_csv(csv_path, REFLECTION_COLUMNS, zip(z, np.real(r), np.imag(r)))
        reflection = csv_path.name
    defaults = ScatteringFile()
    if z_max is None:
        z_max = float(np.max(np.abs(z))) if reflection != "zero" else defaults.z_max
    doc = ScatteringFile(
        poles=[pole_to_spec(p) for p in poles],
        reflection=reflection,
        z_max=float(z_max),
        n_grid=int(n_grid if n_grid is not None else defaults.n_grid),
    )
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(doc.model_dump(), f, sort_keys=True)
    return path


PATH_KEYS = ("scattering", "reference", "input", "exact")


def resolve_paths(config: RunConfig, base_dir: PathLike) -> RunConfig:
    """Resolve relative file keys of a run configuration against base_dir"""
    updates = {}
    for key in PATH_KEYS:
        value = getattr(config, key)
        if value and not Path(value).is_absolute():
            updates[key] = str(Path(base_dir) / value)
    return config.model_copy(update=updates)
