"""
Command-line front end

Usage:
    python -m ovsolve.cli soliton --config run.yaml
    python -m ovsolve.cli asympt --scattering data.yaml --t 20 50 --t-min 10
    python -m ovsolve.cli scatter --input u0.csv --z-max 8 --n-z 160
    python -m ovsolve.cli evolve --input u0.csv --oracle-T 20 --dt 5e-3
    python -m ovsolve.cli compare --scattering two.yaml --t 20 50 100 200

Exit codes: 0 success, 2 validation, 3 domain gate, 4 numerical failure.
"""
import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from ovsolve import __version__
from ovsolve.config import load_run_config
from ovsolve.core.errors import exit_code_for
from ovsolve.models import RunConfig
from ovsolve.services.runner import run


logger = logging.getLogger("ovsolve.cli")

THREADS_ENV = "OV_THREADS"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# flag dest -> RunConfig key (dotted for nested models)
OVERRIDES = {
    "scattering": "scattering",
    "reference": "reference",
    "input": "input",
    "exact": "exact",
    "output": "output",
    "t": "t_values",
    "t_min": "t_min",
    "y_min": "y.y_min",
    "y_max": "y.y_max",
    "n_y": "y.n_y",
    "quad_epsrel": "quad_epsrel",
    "diagnostics_xi": "diagnostics_xi",
    "z_max": "z_max",
    "n_z": "n_z",
    "x_match": "x_match",
    "x_check": "x_check",
    "modulus_min": "modulus_min",
    "modulus_max": "modulus_max",
    "L": "oracle.L",
    "modes": "oracle.modes",
    "dt": "oracle.dt",
    "oracle_T": "oracle.T",
    "snap_every": "oracle.snap_every",
    "threads": "threads",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ovsolve", description="Inverse scattering toolkit for the OV equation")
    parser.add_argument("--version", action="version", version=f"ovsolve {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="YAML run configuration")
    common.add_argument("--output", default=None, help="Output directory")
    common.add_argument("--threads", type=int, default=None, help=f"Worker threads (fallback: ${THREADS_ENV}, then 1)")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--t", type=float, nargs="+", default=None, help="Time values")
    common.add_argument("--y-min", type=float, default=None)
    common.add_argument("--y-max", type=float, default=None)
    common.add_argument("--n-y", type=int, default=None)

    p = sub.add_parser("soliton", parents=[common], help="N-loop soliton profiles")
    p.add_argument("--scattering", default=None, help="Scattering-data YAML")

    p = sub.add_parser("asympt", parents=[common], help="Long-time asymptotic profiles")
    p.add_argument("--scattering", default=None, help="Scattering-data YAML")
    p.add_argument("--t-min", type=float, default=None, help="Asymptotic gate")
    p.add_argument("--quad-epsrel", type=float, default=None)
    p.add_argument("--diagnostics-xi", type=float, default=None, help="y/t < 0 for the conjugation diagnostics dump")

    p = sub.add_parser("scatter", parents=[common], help="Direct scattering of an initial profile")
    p.add_argument("--input", default=None, help="Profile CSV with columns x, u")
    p.add_argument("--z-max", type=float, default=None)
    p.add_argument("--n-z", type=int, default=None)
    p.add_argument("--x-match", type=float, default=None)
    p.add_argument("--x-check", type=float, default=None)
    p.add_argument("--modulus-min", type=float, default=None)
    p.add_argument("--modulus-max", type=float, default=None)

    p = sub.add_parser("evolve", parents=[common], help="Pseudospectral evolution")
    p.add_argument("--input", default=None, help="Profile CSV with columns x, u")
    p.add_argument("--L", type=float, default=None, help="Periodic domain length")
    p.add_argument("--modes", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--oracle-T", type=float, default=None, help="Integration length")
    p.add_argument("--snap-every", type=int, default=None)

    p = sub.add_parser("compare", parents=[common], help="Resolution, oracle and stability error tables")
    p.add_argument("--scattering", default=None, help="Scattering-data YAML")
    p.add_argument("--reference", default=None, help="Reference scattering-data YAML")
    p.add_argument("--input", default=None, help="Oracle snapshot CSV with columns x, u")
    p.add_argument("--exact", default=None, help="Exact profile CSV with columns y, x, u")
    p.add_argument("--L", type=float, default=None, help="Periodic domain length of the snapshot")
    return parser


def _set(target: Dict[str, Any], dotted: str, value: Any):
    keys = dotted.split(".")
    for key in keys[:-1]:
        target = target.setdefault(key, {})
    target[keys[-1]] = value


def merge_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """
    Apply CLI flags on top of the YAML configuration

    Raises:
        pydantic.ValidationError: If the merged configuration is invalid
    """
    merged = config.model_dump()
    merged["subcommand"] = args.subcommand
    for dest, key in OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            _set(merged, key, value)
    if args.threads is None and config.threads == 1 and os.environ.get(THREADS_ENV):
        merged["threads"] = int(os.environ[THREADS_ENV])
    return RunConfig.model_validate(merged)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and return its exit code
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, force=True)
    try:
        config = merge_overrides(load_run_config(args.config), args)
        manifest = run(config)
    except ValidationError as exc:
        logger.error(f"❌ Invalid configuration: {exc}")
        return 2
    except Exception as exc:
        code = exit_code_for(exc)
        if code == 1:
            logger.exception(f"❌ {args.subcommand} failed")
        else:
            logger.error(f"❌ {args.subcommand} failed: {exc}")
        return code
    logger.info(f"✅ {args.subcommand} finished: {len(manifest['outputs'])} files in {config.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
