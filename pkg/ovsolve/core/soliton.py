"""
Reflectionless Riemann-Hilbert solver and N-loop-soliton reconstruction

Every residue condition has the form
  Res_{z=p} M[:, b] = v * M(p)[:, a]
and the solution is the partial-fraction expansion
  M(z) = I + sum_p R_p e_b^T / (z - p)
whose 3-vectors R_p solve one linear system with three right-hand sides:
  R_p - v_p * sum_{q: b_q = a_p} R_q / (p - q) = v_p * e_{a_p}

Reconstruction:
  x(y, t) = y + sum_j M1[j, 3] / sum_j M0[j, 3],   M(z) = M0 + M1 z + O(z^2)
  u(y, t) = d x / d t at fixed y
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ovsolve.core.errors import (
    ConfigurationError,
    DomainError,
    NumericalDegeneracyError,
    OVError,
    ReconstructionSingularityError,
    SingularProfileError,
)
from ovsolve.core.spectral import (
    OMEGA,
    SQRT3,
    BasePole,
    PoleKind,
    ScatteringData,
    phase_exponent,
)


logger = logging.getLogger(__name__)


# Constants
RENORMALIZED_LOG_LIMIT = 10.0   # max |log v| for the sqrt-renormalized system
RESIDUAL_TOL = 1e-10
POLE_GUARD = 1e-10              # eval_Msol refuses points this close to a pole
IMAG_TOL = 1e-9
DENOMINATOR_TOL = 1e-14
DEFAULT_STEP = 1e-4             # time step of the u = x_t difference, times max(1, t)

# column permutation of Gamma4 (1 -> 2 -> 3 -> 1) and of Gamma1 (1 <-> 2), 0-based
_ROTATE = (1, 2, 0)
_SWAP = (1, 0, 2)


@dataclass(frozen=True)
class ResidueCondition:
    """Res_{z=pole} M[:, out_col] = c * exp(log_scale) * M(pole)[:, in_col] (0-based columns)"""
    pole: complex
    in_col: int
    out_col: int
    c: complex
    log_scale: float
    base_index: int

    @property
    def log_abs(self) -> float:
        return float(np.log(abs(self.c)) + self.log_scale)

    def rotated(self) -> "ResidueCondition":
        # M(z) = Gamma4 M(omega z) Gamma4^-1
        w2 = complex(OMEGA ** 2)
        return ResidueCondition(
            w2 * self.pole, _ROTATE[self.in_col], _ROTATE[self.out_col],
            w2 * self.c, self.log_scale, self.base_index,
        )

    def conjugated(self) -> "ResidueCondition":
        # M(z) = Gamma1 conj(M(conj z)) Gamma1
        return ResidueCondition(
            self.pole.conjugate(), _SWAP[self.in_col], _SWAP[self.out_col],
            self.c.conjugate(), self.log_scale, self.base_index,
        )


@dataclass(frozen=True)
class ResidueCoefficients:
    """Solved residue vectors; blocks[k] = vectors[k] e_{out_cols[k]}^T is the residue matrix at poles[k]"""
    poles: np.ndarray
    in_cols: np.ndarray
    out_cols: np.ndarray
    vectors: np.ndarray
    residual: float
    mode: str
    y: float
    t: float

    @property
    def size(self) -> int:
        return int(self.poles.size)

    @property
    def blocks(self) -> List[np.ndarray]:
        out = []
        for k in range(self.size):
            q = np.zeros((3, 3), dtype=complex)
            q[:, self.out_cols[k]] = self.vectors[k]
            out.append(q)
        return out


@dataclass(frozen=True)
class OuterSolution:
    M0: np.ndarray
    M1: np.ndarray
    coeffs: ResidueCoefficients
    y: float
    t: float


@dataclass(frozen=True)
class ParametricProfile:
    y: np.ndarray
    x: np.ndarray
    u: np.ndarray
    t: float
    monotone_x: bool

    def rows(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.y.tolist(), self.x.tolist(), self.u.tolist()))


@dataclass(frozen=True)
class ClosedFormParameters:
    """(rho, phi, c_hat) of the single loop soliton plus the x offset of the pole type"""
    rho: float
    phi: float
    c_hat: float
    x_shift: float = 0.0

    @property
    def cos_term(self) -> float:
        return float(np.cos(self.phi + np.pi / 3))

    @property
    def regular(self) -> bool:
        return abs(self.cos_term) < 0.5


def residue_conditions(
    data: ScatteringData, y: float, t: float, frozen: Optional[Dict[int, float]] = None
) -> List[ResidueCondition]:
    """
    Six residue conditions per base pole at time t

    The orbit is seeded at i*rho, where the exponent is real, and completed
    with the rotation and conjugation symmetries.

    Args:
        data: Scattering data (poles only are used)
        y, t: Reciprocal coordinate and time
        frozen: Optional base index -> log scale override (+inf or -inf) used to
            freeze an orbit at its coefficient limit

    Returns:
        6N conditions ordered seed, two rotations, then their conjugates, per pole
    """
    frozen = frozen or {}
    conditions = []
    for n, pole in enumerate(data.poles):
        seed_point = complex(OMEGA) * pole.xi.conjugate()
        # 2 i t theta(i rho) = sqrt(3) (rho y + t / rho)
        s = phase_exponent(seed_point, y, t).real
        seed_c = pole.c.conjugate() * complex(OMEGA)
        if pole.kind is PoleKind.TYPE1:
            seed = ResidueCondition(seed_point, 0, 1, seed_c, -s, n)
        else:
            seed = ResidueCondition(seed_point, 1, 0, seed_c, s, n)
        if n in frozen:
            seed = ResidueCondition(seed.pole, seed.in_col, seed.out_col, seed.c, frozen[n], n)
        first = seed.rotated()
        second = first.rotated()
        triple = [seed, first, second]
        conditions.extend(triple + [cond.conjugated() for cond in triple])
    return conditions


def _solve_conditions(conditions: Sequence[ResidueCondition], y: float, t: float) -> ResidueCoefficients:
    n = len(conditions)
    if n == 0:
        empty = np.zeros(0, dtype=int)
        return ResidueCoefficients(
            np.zeros(0, dtype=complex), empty, empty, np.zeros((0, 3), dtype=complex),
            0.0, "empty", y, t,
        )

    poles = np.array([cond.pole for cond in conditions], dtype=complex)
    a = np.array([cond.in_col for cond in conditions])
    b = np.array([cond.out_col for cond in conditions])
    c = np.array([cond.c for cond in conditions], dtype=complex)
    g = np.array([cond.log_scale for cond in conditions], dtype=float)
    log_abs = np.log(np.abs(c)) + g

    coupled = (b[None, :] == a[:, None]) & ~np.eye(n, dtype=bool)
    diff = poles[:, None] - poles[None, :]
    np.fill_diagonal(diff, 1.0)
    kernel = np.where(coupled, 1.0 / diff, 0.0)
    unit = np.zeros((n, 3), dtype=complex)
    unit[np.arange(n), a] = 1.0

    if np.all(np.isfinite(log_abs)) and np.max(np.abs(log_abs)) <= RENORMALIZED_LOG_LIMIT:
        mode = "renormalized"
        root = np.sqrt(c) * np.exp(0.5 * g)
        A = np.eye(n) - root[:, None] * kernel * root[None, :]
        B = root[:, None] * unit
        scale_back = root[:, None]
    else:
        # rows with |v| > 1 are divided by v
        mode = "equilibrated"
        big = log_abs > 0
        v_small = c * np.exp(np.where(big, 0.0, g))
        inv_big = np.exp(-np.where(big, g, 0.0)) / c
        diag = np.where(big, inv_big, 1.0)
        row = np.where(big, 1.0, v_small)
        A = np.diag(diag) - row[:, None] * kernel
        B = row[:, None] * unit
        scale_back = np.ones((n, 1))

    try:
        X = np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise NumericalDegeneracyError(f"residue system is singular at y={y}, t={t}") from exc

    residual = float(np.max(np.abs(A @ X - B)))
    scale = max(1.0, float(np.max(np.abs(A))) * float(np.max(np.abs(X))))
    if not np.all(np.isfinite(X)) or residual > RESIDUAL_TOL * scale:
        raise NumericalDegeneracyError(
            f"residue system residual {residual:.3g} exceeds tolerance at y={y}, t={t}"
        )
    logger.debug(f"residue system n={n} mode={mode} residual={residual:.2e}")
    return ResidueCoefficients(poles, a, b, scale_back * X, residual, mode, y, t)


def _require_reflectionless(data: ScatteringData):
    if not data.is_reflectionless:
        raise ConfigurationError("the soliton engine needs reflectionless data (r = 0)")


def assemble_and_solve(data: ScatteringData, y: float, t: float) -> ResidueCoefficients:
    """
    Solve the residue linear system of reflectionless data at (y, t)

    Args:
        data: Reflectionless scattering data
        y: Reciprocal coordinate
        t: Time, t >= 0

    Returns:
        ResidueCoefficients with the residual of the solved system

    Raises:
        ConfigurationError: If r is not identically zero
        DomainError: If t < 0
        NumericalDegeneracyError: If the system is singular or the residual check fails
    """
    _require_reflectionless(data)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return _solve_conditions(residue_conditions(data, y, t), y, t)


def eval_Msol(coeffs: ResidueCoefficients, z: complex) -> np.ndarray:
    """
    M(z) = I + sum_p R_p e_b^T / (z - p)

    Raises:
        DomainError: If z is within POLE_GUARD of a pole
    """
    z = complex(z)
    M = np.eye(3, dtype=complex)
    if coeffs.size == 0:
        return M
    dist = z - coeffs.poles
    if np.min(np.abs(dist)) < POLE_GUARD:
        raise DomainError(f"z = {z} is a pole of the reflectionless solution")
    contrib = coeffs.vectors / dist[:, None]
    for col in range(3):
        M[:, col] += contrib[coeffs.out_cols == col].sum(axis=0)
    return M


def outer_taylor(coeffs: ResidueCoefficients) -> OuterSolution:
    """
    Taylor data at z = 0 from 1/(z - p) = -1/p - z/p^2 + O(z^2)

    Returns:
        OuterSolution with M0 = I - sum Q/p and M1 = -sum Q/p^2
    """
    M0 = np.eye(3, dtype=complex)
    M1 = np.zeros((3, 3), dtype=complex)
    for col in range(3):
        sel = coeffs.out_cols == col
        if not np.any(sel):
            continue
        p = coeffs.poles[sel]
        R = coeffs.vectors[sel]
        M0[:, col] -= (R / p[:, None]).sum(axis=0)
        M1[:, col] -= (R / (p ** 2)[:, None]).sum(axis=0)
    return OuterSolution(M0=M0, M1=M1, coeffs=coeffs, y=coeffs.y, t=coeffs.t)


def x_of_y(outer: OuterSolution, y: float) -> float:
    """
    x = y + sum_j M1[j, 3] / sum_j M0[j, 3]

    Raises:
        ReconstructionSingularityError: If the denominator vanishes or the
            correction is not real
    """
    den = outer.M0[:, 2].sum()
    num = outer.M1[:, 2].sum()
    if abs(den) < DENOMINATOR_TOL:
        raise ReconstructionSingularityError(f"sum of M0[:, 3] vanishes at y={y}, t={outer.t}")
    shift = num / den
    if abs(shift.imag) > IMAG_TOL * max(1.0, abs(shift.real)):
        raise ReconstructionSingularityError(
            f"x correction has imaginary part {shift.imag:.3g} at y={y}, t={outer.t}"
        )
    return float(y + shift.real)


def reconstruct_x(
    data: ScatteringData, y: float, t: float, frozen: Optional[Dict[int, float]] = None
) -> float:
    """x(y, t) for reflectionless data; t may be any real number"""
    coeffs = _solve_conditions(residue_conditions(data, y, t, frozen), y, t)
    return x_of_y(outer_taylor(coeffs), y)


def u_of_y(
    data: ScatteringData,
    y: float,
    t: float,
    step: Optional[float] = None,
    frozen: Optional[Dict[int, float]] = None,
) -> float:
    """
    u = x_t at fixed y by central differences with one Richardson step

    The exponent is entire in t, so the stencil may cross t = 0.

    Args:
        data: Reflectionless scattering data
        y: Reciprocal coordinate
        t: Time
        step: Difference step h (default 1e-4 * max(1, t))
        frozen: Orbit freezing passed to residue_conditions

    Returns:
        (4 D(h/2) - D(h)) / 3 with D the central difference
    """
    _require_reflectionless(data)
    if data.n_poles == 0:
        return 0.0
    h = step if step is not None else DEFAULT_STEP * max(1.0, abs(t))

    def central(hh: float) -> float:
        return (reconstruct_x(data, y, t + hh, frozen) - reconstruct_x(data, y, t - hh, frozen)) / (2 * hh)

    return (4.0 * central(h / 2) - central(h)) / 3.0


def _log_e_hat(rho: float, c_hat: complex, y: float, t: float) -> float:
    return float(np.log(abs(c_hat) / (2 * SQRT3 * rho)) - SQRT3 * rho * (y + t / rho ** 2))


def single_loop_soliton(rho: float, phi: float, c_hat: complex, y: float, t: float) -> Tuple[float, float]:
    """
    Closed-form single loop soliton in the reciprocal variable

    Formula:
        e = |c_hat| / (2 sqrt(3) rho) * exp(-sqrt(3) rho (y + t / rho^2)),  C = cos(phi + pi/3)
        u = (12 / rho^2) e (C - e + C e^2) / (1 - 4 C e + e^2)^2
        x = y + (2 sqrt(3) / rho) (e^2 - 2 C e) / (1 - 4 C e + e^2)

    For e > 1 both are evaluated in 1/e, which leaves u invariant.

    Raises:
        ValueError: If rho <= 0 or c_hat = 0
        SingularProfileError: If 1 - 4 C e + e^2 vanishes
    """
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if abs(c_hat) == 0:
        raise ValueError("c_hat must be nonzero")
    C = np.cos(phi + np.pi / 3)
    log_e = _log_e_hat(rho, c_hat, y, t)
    inverted = log_e > 0
    s = np.exp(-log_e) if inverted else np.exp(log_e)
    den = 1.0 - 4.0 * C * s + s * s
    if abs(den) < DENOMINATOR_TOL:
        raise SingularProfileError(f"closed-form denominator vanishes at y={y}, t={t}")
    u = 12.0 / rho ** 2 * s * (C - s + C * s * s) / den ** 2
    if inverted:
        g = (1.0 - 2.0 * C * s) / den
    else:
        g = (s * s - 2.0 * C * s) / den
    x = y + 2.0 * SQRT3 / rho * g
    return float(x), float(u)


def closed_form_parameters(pole: BasePole) -> ClosedFormParameters:
    """
    Single-soliton parameters equivalent to one base pole

    type1: rho = |xi|, phi = -arg c, c_hat = |c|
    type2: rho = |xi|, phi = arg c - pi/3, c_hat = 12 rho^2 / |c|, x shifted by -2 sqrt(3) / rho
    """
    rho = pole.rho
    if pole.kind is PoleKind.TYPE1:
        return ClosedFormParameters(rho=rho, phi=-float(np.angle(pole.c)), c_hat=abs(pole.c))
    return ClosedFormParameters(
        rho=rho,
        phi=float(np.angle(pole.c)) - np.pi / 3,
        c_hat=12.0 * rho ** 2 / abs(pole.c),
        x_shift=-2.0 * SQRT3 / rho,
    )


def closed_form_profile(pole: BasePole, y: float, t: float) -> Tuple[float, float]:
    """(x, u) of the single soliton generated by one base pole"""
    params = closed_form_parameters(pole)
    x, u = single_loop_soliton(params.rho, params.phi, params.c_hat, y, t)
    return x + params.x_shift, u


def _point(data, y, t, frozen=None) -> Tuple[float, float]:
    try:
        return reconstruct_x(data, y, t, frozen), u_of_y(data, y, t, frozen=frozen)
    except OVError as exc:
        raise type(exc)(f"{exc} (at y={y})") from exc


def profile(data: ScatteringData, y_grid: Sequence[float], t: float, threads: int = 1) -> ParametricProfile:
    """
    Sample (x(y, t), u(y, t)) on a y grid

    Args:
        data: Reflectionless scattering data
        y_grid: Strictly increasing y values
        t: Time, t >= 0
        threads: Worker threads for the grid sweep

    Returns:
        ParametricProfile; monotone_x is False when the curve folds into a loop

    Raises:
        ValueError: If y_grid is not strictly increasing
    """
    _require_reflectionless(data)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    y = np.asarray(y_grid, dtype=float)
    if y.ndim != 1 or y.size == 0 or np.any(np.diff(y) <= 0):
        raise ConfigurationError("y grid must be a non-empty strictly increasing 1-D array")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(lambda yy: _point(data, yy, t), y.tolist()))
    else:
        points = [_point(data, yy, t) for yy in y.tolist()]

    x = np.array([p[0] for p in points])
    u = np.array([p[1] for p in points])
    monotone = bool(np.all(np.diff(x) > 0))
    logger.info(f"profile t={t} N={data.n_poles} points={y.size} monotone_x={monotone}")
    return ParametricProfile(y=y, x=x, u=u, t=float(t), monotone_x=monotone)


def dressed_limits(data: ScatteringData, n: int) -> Dict[int, float]:
    """
    Coefficient limits of every orbit m != n along the trajectory of orbit n

    Orbit m has exponent sqrt(3) t (rho_n^2 - rho_m^2) / (rho_m rho_n^2) there;
    type1 coefficients carry exp(-s) and type2 coefficients exp(+s).
    """
    rho_n = data.poles[n].rho
    limits = {}
    for m, pole in enumerate(data.poles):
        if m == n:
            continue
        grows = pole.rho > rho_n
        if pole.kind is PoleKind.TYPE2:
            grows = not grows
        limits[m] = np.inf if grows else -np.inf
    return limits


def resolution_error(data: ScatteringData, y_grid: Sequence[float], t: float) -> float:
    """
    sup_y |u_N(y, t) - sum_n u_n^dressed(y, t)|

    u_n^dressed is the N-orbit solution with every other orbit frozen at its
    limit along the trajectory of orbit n.
    """
    _require_reflectionless(data)
    y = np.asarray(y_grid, dtype=float)
    full = np.array([u_of_y(data, yy, t) for yy in y])
    total = np.zeros_like(full)
    for n in range(data.n_poles):
        limits = dressed_limits(data, n)
        total += np.array([u_of_y(data, yy, t, frozen=limits) for yy in y])
    err = float(np.max(np.abs(full - total))) if y.size else 0.0
    logger.info(f"resolution error at t={t}: {err:.3e}")
    return err
