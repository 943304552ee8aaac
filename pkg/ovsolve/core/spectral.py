"""
Spectral-plane constants, phase function, pole orbits and phase-point geometry

Conventions:
  omega = exp(2*pi*i/3)
  theta(z) = -(sqrt(3)/2) * (xi*z - 1/z),   xi = y/t
  2*i*t*theta(p) = -i*sqrt(3) * (y*p - t/p)   (well defined at t = 0)

Base poles live on the ray arg z = pi/6. Their six images are
  xi, omega*conj(xi), omega*xi, conj(omega*xi), conj(omega*conj(xi)), conj(xi)
with norming constants c, conj(c)*omega, c*omega, and their conjugates.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from ovsolve.core.errors import ConfigurationError, DomainError, DomainGateError


logger = logging.getLogger(__name__)


OMEGA = np.exp(2j * np.pi / 3)
SQRT3 = np.sqrt(3.0)

GAMMA1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
GAMMA2 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
GAMMA3 = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
GAMMA4 = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
GAMMA4_INV = GAMMA4.T.copy()

RAY_ARG = np.pi / 6
RAY_ARG_TOL = 1e-12          # absolute tolerance on arg(xi)
POLE_DISTANCE_TOL = 1e-10    # orbit poles closer than this are duplicates
R_DECAY_TOL = 1e-8           # |r| at +-Z_max must be below this
DEFAULT_Z_MAX = 20.0
DEFAULT_N_GRID = 4001


@dataclass(frozen=True)
class SymmetryConstants:
    """omega and the permutation matrices of the 3x3 problem"""
    omega: complex = complex(OMEGA)
    gamma1: np.ndarray = field(default_factory=lambda: GAMMA1.copy())
    gamma2: np.ndarray = field(default_factory=lambda: GAMMA2.copy())
    gamma3: np.ndarray = field(default_factory=lambda: GAMMA3.copy())
    gamma4: np.ndarray = field(default_factory=lambda: GAMMA4.copy())

    def check(self, tol: float = 1e-14) -> bool:
        """Verify omega^3 = 1, 1 + omega + omega^2 = 0, the involutions and Gamma4^3 = I"""
        w = self.omega
        eye = np.eye(3)
        ok = abs(w ** 3 - 1) < tol and abs(1 + w + w ** 2) < tol
        for g in (self.gamma1, self.gamma2, self.gamma3):
            ok = ok and np.allclose(g @ g, eye, atol=tol)
        g4 = self.gamma4
        ok = ok and np.allclose(g4 @ g4 @ g4, eye, atol=tol)
        ok = ok and abs(np.linalg.det(g4) - 1) < tol
        return bool(ok)


class PoleKind(str, Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"


class Region(str, Enum):
    I = "I"      # y/t < 0, six phase points
    II = "II"    # y/t > 0, no phase points


@dataclass(frozen=True)
class BasePole:
    """
    Discrete eigenvalue on the ray arg z = pi/6 with its norming constant

    Raises:
        ConfigurationError: If xi is off the ray, xi = 0 or c = 0
    """
    xi: complex
    c: complex
    kind: PoleKind = PoleKind.TYPE1

    def __post_init__(self):
        xi = complex(self.xi)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "kind", PoleKind(self.kind))
        if abs(xi) == 0:
            raise ConfigurationError("pole at the origin is not allowed")
        if abs(np.angle(xi) - RAY_ARG) > RAY_ARG_TOL:
            raise ConfigurationError(
                f"pole {xi} is off the ray arg z = pi/6 (arg = {np.angle(xi):.15g})"
            )
        if abs(self.c) == 0:
            raise ConfigurationError(f"pole {xi}: norming constant must be nonzero")

    @property
    def rho(self) -> float:
        return float(abs(self.xi))

    @classmethod
    def from_polar(cls, rho: float, c: complex, kind: PoleKind = PoleKind.TYPE1) -> "BasePole":
        """Build a pole at rho * exp(i*pi/6) without round-off leaving the ray"""
        return cls(xi=rho * np.exp(1j * RAY_ARG), c=c, kind=kind)


@dataclass(frozen=True)
class OrbitPole:
    """One of the 6N symmetric images; slot k means index n + k*N"""
    xi: complex
    c: complex
    slot: int
    base_index: int
    kind: PoleKind

    @property
    def upper(self) -> bool:
        return self.xi.imag > 0


class ReflectionCoefficient:
    """
    Sampled reflection coefficient on a symmetric uniform grid [-Z_max, Z_max]

    Off-grid values use monotone cubic (PCHIP) interpolation of the real and
    imaginary parts; outside the grid r is zero.
    """

    def __init__(self, z: Optional[np.ndarray] = None, values: Optional[np.ndarray] = None):
        if z is None:
            self.z = None
            self.values = None
            self._re = self._im = None
            return
        z = np.asarray(z, dtype=float)
        values = np.asarray(values, dtype=complex)
        if z.ndim != 1 or z.shape != values.shape or z.size < 2:
            raise ConfigurationError("reflection samples must be two equal-length 1-D arrays")
        if np.any(np.diff(z) <= 0):
            raise ConfigurationError("reflection grid must be strictly increasing")
        self.z = z
        self.values = values
        self._re = PchipInterpolator(z, values.real, extrapolate=False)
        self._im = PchipInterpolator(z, values.imag, extrapolate=False)

    @classmethod
    def zero(cls) -> "ReflectionCoefficient":
        return cls()

    @classmethod
    def from_function(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        z_max: float = DEFAULT_Z_MAX,
        n_grid: int = DEFAULT_N_GRID,
    ) -> "ReflectionCoefficient":
        """Sample func on the uniform grid of n_grid points over [-z_max, z_max]"""
        z = np.linspace(-z_max, z_max, n_grid)
        return cls(z, np.asarray(func(z), dtype=complex))

    @property
    def is_zero(self) -> bool:
        return self.z is None or not np.any(self.values)

    @property
    def z_max(self) -> float:
        return 0.0 if self.z is None else float(self.z[-1])

    def sup_abs(self) -> float:
        return 0.0 if self.is_zero else float(np.max(np.abs(self.values)))

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=float)
        if self.is_zero:
            return np.zeros_like(z_arr, dtype=complex) if z_arr.ndim else 0j
        re = np.nan_to_num(self._re(z_arr), nan=0.0)
        im = np.nan_to_num(self._im(z_arr), nan=0.0)
        out = re + 1j * im
        return out if z_arr.ndim else complex(out)


@dataclass(frozen=True)
class ScatteringData:
    """Reflection coefficient plus base poles; the reflectionless case is r = 0"""
    reflection: ReflectionCoefficient
    poles: Tuple[BasePole, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(self.poles))
        r = self.reflection
        if not r.is_zero:
            sup = r.sup_abs()
            if sup >= 1.0:
                raise ConfigurationError(f"sup |r| = {sup:.6g} must be < 1")
            edge = max(abs(r.values[0]), abs(r.values[-1]))
            if edge >= R_DECAY_TOL:
                raise ConfigurationError(
                    f"|r| = {edge:.3g} at the grid ends; r must decay below {R_DECAY_TOL:g}"
                )
        for i, a in enumerate(self.poles):
            for b in self.poles[i + 1:]:
                if abs(a.xi - b.xi) < POLE_DISTANCE_TOL:
                    raise ConfigurationError(f"base poles {a.xi} and {b.xi} coincide")

    @classmethod
    def reflectionless(cls, poles: Sequence[BasePole] = ()) -> "ScatteringData":
        return cls(ReflectionCoefficient.zero(), tuple(poles))

    @property
    def is_reflectionless(self) -> bool:
        return self.reflection.is_zero

    @property
    def n_poles(self) -> int:
        return len(self.poles)

    def with_poles(self, poles: Sequence[BasePole]) -> "ScatteringData":
        return ScatteringData(self.reflection, tuple(poles))

    def orbit(self) -> List[OrbitPole]:
        return expand_orbit(self.poles)


@dataclass(frozen=True)
class PhaseGeometry:
    xi_ratio: float
    region: Region
    kappa: Optional[float] = None
    phase_points: Tuple[complex, ...] = ()

    @property
    def interval(self) -> Tuple[Tuple[float, float], ...]:
        """I = (-inf, -kappa) U (kappa, inf) in region I, empty in region II"""
        if self.region is Region.II:
            return ()
        return ((-np.inf, -self.kappa), (self.kappa, np.inf))

    def point(self, n: int, j: int) -> complex:
        """kappa_{nj} = (-1)^j omega^n kappa"""
        if self.region is Region.II:
            raise DomainError("region II has no phase points")
        return complex((-1) ** j * OMEGA ** n * self.kappa)


def theta(z: complex, xi_ratio: float) -> complex:
    """
    Phase function theta(z) = -(sqrt(3)/2)(xi*z - 1/z)

    Raises:
        DomainError: If z = 0
    """
    z = complex(z)
    if z == 0:
        raise DomainError("theta is singular at z = 0")
    return -0.5 * SQRT3 * (xi_ratio * z - 1.0 / z)


def phase_derivative(z: complex, xi_ratio: float, rotation: int = 0) -> complex:
    """
    z-derivative of the rotated phase z -> theta(omega^(-rotation) z)

    rotation = 0 gives theta'(z) = -(sqrt(3)/2)(xi + 1/z^2); the phase point
    kappa_{nj} is stationary for rotation = n.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("theta is singular at z = 0")
    w = OMEGA ** (-rotation)
    zr = w * z
    return complex(w * (-0.5 * SQRT3) * (xi_ratio + 1.0 / zr ** 2))


def phase_exponent(xi_n: complex, y: float, t: float) -> complex:
    """
    Exponent 2*i*t*theta(xi_n) = -i*sqrt(3)*(y*xi_n - t/xi_n)

    Raises:
        DomainError: If xi_n = 0
    """
    xi_n = complex(xi_n)
    if xi_n == 0:
        raise DomainError("exponent is singular at xi_n = 0")
    return -1j * SQRT3 * (y * xi_n - t / xi_n)


def exp_factor(xi_n: complex, y: float, t: float) -> complex:
    """
    exp(2*i*t*theta(xi_n)) in the form exp(-i*sqrt(3)*(y*xi_n - t/xi_n))

    Example:
        exp_factor(xi, 0, 0) == 1 for any xi != 0
        |exp_factor(xi, y, t)| == exp(sqrt(3) * Im(xi) * (y + t/|xi|^2))
    """
    return complex(np.exp(phase_exponent(xi_n, y, t)))


def expand_orbit(poles: Sequence[BasePole]) -> List[OrbitPole]:
    """
    Expand base poles to the full 6N orbit

    Ordering follows the index rule n + k*N, k = 0..5; the first 3N entries
    lie in the upper half plane.

    Raises:
        ConfigurationError: If two orbit poles coincide
    """
    poles = list(poles)
    n_base = len(poles)
    w = complex(OMEGA)
    slots = [[None] * n_base for _ in range(6)]
    for n, p in enumerate(poles):
        xi, c = p.xi, p.c
        images = [
            (xi, c),
            (w * xi.conjugate(), c.conjugate() * w),
            (w * xi, c * w),
        ]
        images.append((images[2][0].conjugate(), images[2][1].conjugate()))
        images.append((images[1][0].conjugate(), images[1][1].conjugate()))
        images.append((xi.conjugate(), c.conjugate()))
        for k, (z, cz) in enumerate(images):
            slots[k][n] = OrbitPole(xi=z, c=cz, slot=k, base_index=n, kind=p.kind)

    orbit = [op for row in slots for op in row]
    for i, a in enumerate(orbit):
        for b in orbit[i + 1:]:
            if abs(a.xi - b.xi) < POLE_DISTANCE_TOL:
                raise ConfigurationError(
                    f"orbit poles coincide at {a.xi} (base poles too symmetric)"
                )
    return orbit


def classify_region(y: float, t: float) -> Region:
    """
    Raises:
        DomainGateError: If t <= 0 or y/t = 0 (transition zone is not modelled)
    """
    if t <= 0:
        raise DomainGateError(f"phase geometry needs t > 0, got t = {t}")
    if y == 0:
        raise DomainGateError("y/t = 0 separates regions I and II and is not modelled")
    return Region.I if y < 0 else Region.II


def phase_geometry(y: float, t: float) -> PhaseGeometry:
    """
    Region tag, kappa and the six phase points for xi = y/t

    Example:
        phase_geometry(-4, 4) -> kappa = 1, points {+-1, +-omega, +-omega^2}
        phase_geometry(-1, 4) -> kappa = sqrt(2)
    """
    region = classify_region(y, t)
    xi_ratio = y / t
    if region is Region.II:
        return PhaseGeometry(xi_ratio=xi_ratio, region=region)
    kappa = 1.0 / np.sqrt(abs(xi_ratio))
    points = tuple(
        complex((-1) ** j * OMEGA ** n * kappa) for n in range(3) for j in range(2)
    )
    return PhaseGeometry(xi_ratio=xi_ratio, region=region, kappa=float(kappa), phase_points=points)


def soliton_velocities(poles: Sequence[BasePole]) -> List[float]:
    """dy/dt = -1/rho^2 for each orbit representative"""
    return [-1.0 / p.rho ** 2 for p in poles]


def time_evolve(data: ScatteringData, t: float) -> List[Tuple[complex, complex]]:
    """Base poles with constants multiplied by the exponent at y = 0, time t"""
    return [(p.xi, p.c * exp_factor(p.xi, 0.0, t)) for p in data.poles]


def stability_bound(data: ScatteringData, reference: ScatteringData) -> float:
    """
    Sum over all 6N orbit poles of |xi - xi_ref| + |c - c_ref|

    Base poles are paired in order of increasing modulus.

    Raises:
        ConfigurationError: If the two data sets carry different numbers of poles
    """
    if data.n_poles != reference.n_poles:
        raise ConfigurationError(
            f"cannot pair {data.n_poles} poles with {reference.n_poles} reference poles"
        )
    ours = expand_orbit(sorted(data.poles, key=lambda p: p.rho))
    theirs = expand_orbit(sorted(reference.poles, key=lambda p: p.rho))
    return float(sum(abs(a.xi - b.xi) + abs(a.c - b.c) for a, b in zip(ours, theirs)))
