"""
Pseudospectral integrator for the OV equation on a periodic domain

Integrated form:
  u_t = -(u^2 / 2)_x + 3 * d_x^{-1} u
with the zero mode excluded from d_x^{-1}, 2/3-rule dealiasing of u^2 and
classical RK4 in time.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ovsolve.core.errors import CFLViolationError, ConfigurationError, NumericalError
from ovsolve.core.soliton import ParametricProfile


logger = logging.getLogger(__name__)


# Constants
MEAN_TOL = 1e-12
BOUNDARY_TOL = 1e-10
DEALIAS_HEALTH = 1e-3       # energy fraction allowed in the top third of modes
CFL_LIMIT = 1.0


@dataclass(frozen=True)
class FieldState:
    """u on the periodic grid x_j = -L/2 + j L / M"""
    u: np.ndarray
    t: float
    L: float

    @property
    def modes(self) -> int:
        return int(self.u.size)

    @property
    def x(self) -> np.ndarray:
        return grid(self.L, self.modes)

    @property
    def mean(self) -> float:
        return float(np.mean(self.u))

    def high_mode_fraction(self) -> float:
        """Energy share of the top third of the resolved wavenumbers"""
        spec = np.abs(np.fft.rfft(self.u)) ** 2
        total = spec[1:].sum()
        if total == 0:
            return 0.0
        cut = 2 * spec.size // 3
        return float(spec[cut:].sum() / total)

    def boundary_level(self) -> float:
        edge = max(1, self.modes // 50)
        return float(max(np.max(np.abs(self.u[:edge])), np.max(np.abs(self.u[-edge:]))))


def grid(L: float, modes: int) -> np.ndarray:
    return -L / 2 + L * np.arange(modes) / modes


class SpectralOperator:
    """Right-hand side of the integrated OV equation for a fixed (L, M)"""

    def __init__(self, L: float, modes: int):
        if L <= 0 or modes < 8:
            raise ConfigurationError(f"need L > 0 and at least 8 modes, got L={L}, modes={modes}")
        self.L = L
        self.modes = modes
        self.k = 2 * np.pi * np.fft.rfftfreq(modes, d=L / modes)
        self.dealias = np.abs(self.k) <= (2.0 / 3.0) * np.max(np.abs(self.k))
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(self.k != 0, 1.0 / (1j * self.k), 0.0)
        if modes % 2 == 0:
            inv[-1] = 0.0
        self.inverse_derivative = inv

    @property
    def k_max(self) -> float:
        return float(np.max(self.k[self.dealias]))

    @property
    def k_min(self) -> float:
        return float(self.k[1])

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u_hat = np.fft.rfft(u)
        flux_hat = np.fft.rfft(0.5 * u * u) * self.dealias
        rhs_hat = -1j * self.k * flux_hat + 3.0 * self.inverse_derivative * u_hat
        rhs_hat[0] = 0.0
        return np.fft.irfft(rhs_hat, n=self.modes)

    def max_dt(self, u: np.ndarray) -> float:
        """dt with dt * max(|u|_max k_max, 3 / k_min) = CFL_LIMIT"""
        rate = max(float(np.max(np.abs(u))) * self.k_max, 3.0 / self.k_min)
        return CFL_LIMIT / rate


def rk4_step(op: SpectralOperator, u: np.ndarray, dt: float) -> np.ndarray:
    k1 = op(u)
    k2 = op(u + 0.5 * dt * k1)
    k3 = op(u + 0.5 * dt * k2)
    k4 = op(u + dt * k3)
    return u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve(
    u0: FieldState,
    T: float,
    dt: float,
    snap_every: Optional[int] = None,
) -> List[FieldState]:
    """
    Integrate from u0.t to u0.t + T

    Args:
        u0: Initial state with zero mean
        T: Integration length
        dt: Time step; the last step is shortened to land on T
        snap_every: Keep every n-th step (default: first and last only)

    Returns:
        Snapshots including the initial and the final state

    Raises:
        ConfigurationError: If the mean of u0 is not zero or T, dt are invalid
        CFLViolationError: If dt exceeds the stability bound
        NumericalError: On NaN, with the last good state in the message
    """
    if T < 0 or dt <= 0:
        raise ConfigurationError(f"need T >= 0 and dt > 0, got T={T}, dt={dt}")
    if abs(u0.mean) > MEAN_TOL * max(1.0, float(np.max(np.abs(u0.u)))):
        raise ConfigurationError(f"initial mean {u0.mean:.3e} must vanish")
    op = SpectralOperator(u0.L, u0.modes)
    limit = op.max_dt(u0.u)
    if dt > limit:
        raise CFLViolationError(f"dt = {dt} exceeds the stability bound {limit:.4g}")

    n_steps = int(np.ceil(T / dt - 1e-12)) if T > 0 else 0
    u = u0.u.astype(float).copy()
    t = u0.t
    snaps = [FieldState(u=u.copy(), t=t, L=u0.L)]
    warned = False
    for step in range(1, n_steps + 1):
        h = min(dt, u0.t + T - t)
        new = rk4_step(op, u, h)
        if not np.all(np.isfinite(new)):
            raise NumericalError(f"NaN at step {step} (t = {t + h:.6g}); last good state at t = {t:.6g}")
        u, t = new, t + h
        if not warned:
            state = FieldState(u=u, t=t, L=u0.L)
            if state.boundary_level() > BOUNDARY_TOL:
                logger.warning(f"solution reaches the boundary at t = {t:.4g} (|u| = {state.boundary_level():.2e})")
                warned = True
        if (snap_every and step % snap_every == 0) or step == n_steps:
            snaps.append(FieldState(u=u.copy(), t=t, L=u0.L))
    final = snaps[-1]
    if final.high_mode_fraction() > DEALIAS_HEALTH:
        logger.warning(f"high-mode energy fraction {final.high_mode_fraction():.2e} at t = {final.t:.4g}")
    logger.info(f"evolved {n_steps} steps to t = {t:.6g} on L = {u0.L}, M = {u0.modes}")
    return snaps


def compare(
    exact: ParametricProfile,
    state: FieldState,
    window: Optional[Tuple[float, float]] = None,
    shift: float = 0.0,
) -> Tuple[float, float]:
    """
    Linf and L2 distance between an exact profile and an oracle state

    The exact curve is interpolated onto the oracle grid; grid points outside
    the exact samples count as u = 0.

    Raises:
        ConfigurationError: If the exact profile is not monotone in x
    """
    if not exact.monotone_x:
        raise ConfigurationError("exact profile folds into a loop; it has no single-valued x graph")
    x = state.x
    ref = np.interp(x, exact.x + shift, exact.u, left=0.0, right=0.0)
    diff = state.u - ref
    if window is not None:
        mask = (x >= window[0]) & (x <= window[1])
        diff = diff[mask]
    if diff.size == 0:
        return 0.0, 0.0
    dx = state.L / state.modes
    return float(np.max(np.abs(diff))), float(np.sqrt(np.sum(diff ** 2) * dx))


def state_from_samples(x: Sequence[float], u: Sequence[float], L: float, modes: int, t: float = 0.0) -> FieldState:
    """Interpolate samples onto the periodic grid and remove the mean"""
    xs = grid(L, modes)
    values = np.interp(xs, np.asarray(x, dtype=float), np.asarray(u, dtype=float), left=0.0, right=0.0)
    values = values - values.mean()
    return FieldState(u=values, t=t, L=L)
