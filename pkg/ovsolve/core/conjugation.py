"""
Scalar conjugation functions of the steepest-descent deformation

  nu(s)    = -log(1 - |r(s)|^2) / (2 pi)
  delta(z) = exp(i * int_I nu(s) / (s - z) ds),  I = (-inf, -kappa) U (kappa, inf) in region I
  T(z)     = prod_{L1} (z - conj xi)/(z - xi) * prod_{L2} (z - w^2 conj xi)/(z - w xi) * delta(z)
  F1(z)    = T(z) / T(w^2 z),  F2(z) = F1(w z),  F3(z) = F1(w^2 z)

r vanishes outside its sample grid, so every integral over I is cut at +-Z_max.
Integrals use scipy.integrate.quad; points on I use the Cauchy weight for the
principal value plus +-i*pi*nu for the side.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from ovsolve.core.errors import DegenerateDirectionError, DomainError, NumericalError
from ovsolve.core.spectral import (
    OMEGA,
    SQRT3,
    BasePole,
    PhaseGeometry,
    PoleKind,
    ReflectionCoefficient,
    Region,
    ScatteringData,
    phase_geometry,
    theta,
)


logger = logging.getLogger(__name__)


# Constants
QUAD_EPSREL = 1e-10
QUAD_EPSABS = 1e-13
QUAD_LIMIT = 400
FACTOR_GUARD = 1e-12      # distance at which a T factor counts as hit
DIRECTION_TOL = 1e-14     # |Im theta| below this is a critical trajectory

_W = complex(OMEGA)


@dataclass(frozen=True)
class LambdaPartition:
    """Index sets over base poles; plus = L1 U L2, minus = L3 U L4"""
    lambda1: Tuple[int, ...] = ()
    lambda2: Tuple[int, ...] = ()
    lambda3: Tuple[int, ...] = ()
    lambda4: Tuple[int, ...] = ()

    @property
    def plus(self) -> Tuple[int, ...]:
        return tuple(sorted(self.lambda1 + self.lambda2))

    @property
    def minus(self) -> Tuple[int, ...]:
        return tuple(sorted(self.lambda3 + self.lambda4))


@dataclass(frozen=True)
class ConjugationValues:
    T: complex
    F1: complex
    F2: complex
    F3: complex

    def ratio(self, i: int, j: int) -> complex:
        """F_ij = F_i / F_j for i, j in 1..3"""
        values = (self.F1, self.F2, self.F3)
        return values[i - 1] / values[j - 1]


def nu(r: ReflectionCoefficient, z: float) -> float:
    """
    nu(z) = -log(1 - |r(z)|^2) / (2 pi)

    Raises:
        DomainError: If |r(z)| >= 1
    """
    mod2 = abs(r(z)) ** 2
    if mod2 >= 1.0:
        raise DomainError(f"|r({z})| = {np.sqrt(mod2):.6g} must be < 1")
    return float(-np.log1p(-mod2) / (2 * np.pi))


def _segments(interval: Sequence[Tuple[float, float]], z_max: float) -> List[Tuple[float, float]]:
    out = []
    for lo, hi in interval:
        a, b = max(lo, -z_max), min(hi, z_max)
        if b > a:
            out.append((a, b))
    return out


def _quad_real(func: Callable[[float], float], a: float, b: float, epsrel: float, **kwargs) -> float:
    value, err = quad(func, a, b, epsrel=epsrel, epsabs=QUAD_EPSABS, limit=QUAD_LIMIT, **kwargs)
    if not np.isfinite(value):
        raise NumericalError(f"quadrature over [{a}, {b}] returned {value}")
    return value


def cauchy_integral(
    density: Callable[[float], float],
    segments: Sequence[Tuple[float, float]],
    z: complex,
    side: Optional[str] = None,
    epsrel: float = QUAD_EPSREL,
) -> complex:
    """
    int density(s) / (s - z) ds over the segments, with boundary values on them

    Args:
        density: Real density on the segments
        segments: Finite real intervals
        z: Evaluation point
        side: '+' or '-' when z lies on a segment (limit from above / below)
        epsrel: Relative quadrature tolerance

    Raises:
        DomainError: If z lies on a segment without a side, or on an endpoint
    """
    z = complex(z)
    total = 0j
    on_axis = z.imag == 0.0
    hit = None
    for a, b in segments:
        if on_axis and (abs(z.real - a) < FACTOR_GUARD or abs(z.real - b) < FACTOR_GUARD):
            raise DomainError(f"z = {z.real} is an endpoint of I")
        if on_axis and a < z.real < b:
            if side not in ("+", "-"):
                raise DomainError(f"z = {z.real} lies on I; pass side '+' or '-'")
            hit = z.real
            total += _quad_real(density, a, b, epsrel, weight="cauchy", wvar=z.real)
            continue
        x0, y0 = z.real, z.imag
        points = [x0] if a < x0 < b else None
        re = _quad_real(lambda s: density(s) * (s - x0) / ((s - x0) ** 2 + y0 ** 2), a, b, epsrel, points=points)
        im = _quad_real(lambda s: density(s) * y0 / ((s - x0) ** 2 + y0 ** 2), a, b, epsrel, points=points)
        total += re + 1j * im
    if hit is not None:
        sign = 1.0 if side == "+" else -1.0
        total += sign * 1j * np.pi * density(hit)
    return total


def delta(
    r: ReflectionCoefficient,
    interval: Sequence[Tuple[float, float]],
    z: complex,
    side: Optional[str] = None,
    epsrel: float = QUAD_EPSREL,
) -> complex:
    """
    delta(z) = exp(i int_I nu(s) / (s - z) ds)

    Example:
        r = 0 or I empty            -> 1
        z on I, side '+' and '-'    -> delta_+ / delta_- = 1 - |r(z)|^2
    """
    segments = _segments(interval, r.z_max)
    if r.is_zero or not segments:
        return 1 + 0j
    integral = cauchy_integral(lambda s: nu(r, s), segments, z, side, epsrel)
    return complex(np.exp(1j * integral))


def lambda_partition(poles: Sequence[BasePole], xi_ratio: float) -> LambdaPartition:
    """
    Sort type1 poles by the sign of Im theta(xi_n), type2 by Im theta(w xi_n)

    Negative sign goes to L1 (type1) or L2 (type2), positive to L3 or L4.

    Raises:
        DegenerateDirectionError: If a pole lies on a critical trajectory
    """
    sets: Dict[int, List[int]] = {1: [], 2: [], 3: [], 4: []}
    for n, pole in enumerate(poles):
        point = pole.xi if pole.kind is PoleKind.TYPE1 else _W * pole.xi
        im = theta(point, xi_ratio).imag
        if abs(im) < DIRECTION_TOL * max(1.0, abs(theta(point, xi_ratio))):
            raise DegenerateDirectionError(f"pole {pole.xi} lies on Im theta = 0 for xi = {xi_ratio}")
        if pole.kind is PoleKind.TYPE1:
            sets[1 if im < 0 else 3].append(n)
        else:
            sets[2 if im < 0 else 4].append(n)
    return LambdaPartition(*(tuple(sets[k]) for k in (1, 2, 3, 4)))


def _blaschke(poles: Sequence[BasePole], partition: LambdaPartition, z: complex) -> complex:
    value = 1 + 0j
    for n in partition.lambda1:
        xi = poles[n].xi
        value *= _factor(z, xi.conjugate(), xi)
    for n in partition.lambda2:
        xi = poles[n].xi
        value *= _factor(z, _W ** 2 * xi.conjugate(), _W * xi)
    return value


def _factor(z: complex, zero: complex, pole: complex) -> complex:
    if abs(z - pole) < FACTOR_GUARD:
        raise DomainError(f"T has a pole at {pole}")
    if abs(z - zero) < FACTOR_GUARD:
        raise DomainError(f"T has a zero at {zero}")
    return (z - zero) / (z - pole)


def T_and_F(
    poles: Sequence[BasePole],
    partition: LambdaPartition,
    delta_fn: Callable[[complex, Optional[str]], complex],
    z: complex,
    side: Optional[str] = None,
) -> ConjugationValues:
    """
    T(z) and F1..F3 at z from T at z, w z and w^2 z

    F1 = T(z)/T(w^2 z), F2 = T(w z)/T(z), F3 = T(w^2 z)/T(w z), so F1 F2 F3 = 1.

    Args:
        poles: Base poles
        partition: Lambda partition at the current xi
        delta_fn: delta as a function of (point, side)
        z: Evaluation point
        side: Boundary side for any argument lying on I
    """
    z = complex(z)
    values = []
    for k in range(3):
        w = _W ** k * z
        on_axis = abs(w.imag) < FACTOR_GUARD
        s = side if on_axis else None
        if on_axis:
            w = complex(w.real, 0.0)
        values.append(_blaschke(poles, partition, w) * delta_fn(w, s))
    t0, t1, t2 = values
    return ConjugationValues(T=t0, F1=t0 / t2, F2=t1 / t0, F3=t2 / t1)


def F3_taylor(
    poles: Sequence[BasePole],
    partition: LambdaPartition,
    r: ReflectionCoefficient,
    kappa: Optional[float],
    epsrel: float = QUAD_EPSREL,
) -> Tuple[complex, complex]:
    """
    F3(z) = F3_0 + F3_1 z + O(z^2)

    F3_0 = prod_{minus} (w^2 conj xi * w xi)/(xi conj xi) * prod_{plus} (xi conj xi)/(w conj xi * w^2 xi)
    F3_1 = sqrt(3) F3_0 / pi * int_kappa^inf log(1 - |r(s)|^2) / s^2 ds,  zero when kappa is None

    Raises:
        DomainError: If |r| reaches 1 on the integration range
    """
    f0 = 1 + 0j
    for n in partition.minus:
        xi = poles[n].xi
        f0 *= (_W ** 2 * xi.conjugate() * _W * xi) / (xi * xi.conjugate())
    for n in partition.plus:
        xi = poles[n].xi
        f0 *= (xi * xi.conjugate()) / (_W * xi.conjugate() * _W ** 2 * xi)

    if kappa is None or r.is_zero or kappa >= r.z_max:
        return f0, 0j
    integral = _quad_real(lambda s: -2 * np.pi * nu(r, s) / s ** 2, kappa, r.z_max, epsrel)
    return f0, complex(SQRT3 * f0 / np.pi * integral)


def beta_at_phase_point(
    r: ReflectionCoefficient, kappa: float, j: int, epsrel: float = QUAD_EPSREL
) -> float:
    """
    Regularized beta(k, k) at k = (-1)^j kappa

    int_I (nu(s) - X(s) nu(k)) / (s - k) ds with X the indicator of the unit
    interval of I next to k. The integral is real.
    """
    k = (-1) ** j * kappa
    segments = _segments(((-np.inf, -kappa), (kappa, np.inf)), r.z_max)
    if r.is_zero or not segments:
        return 0.0
    nu_k = nu(r, k)
    near = (k, k + 1.0) if j == 0 else (k - 1.0, k)
    total = 0.0
    for a, b in segments:
        lo, hi = max(a, near[0]), min(b, near[1])
        if hi > lo:
            total += _quad_real(lambda s: (nu(r, s) - nu_k) / (s - k), lo, hi, epsrel)
            if lo > a:
                total += _quad_real(lambda s: nu(r, s) / (s - k), a, lo, epsrel)
            if b > hi:
                total += _quad_real(lambda s: nu(r, s) / (s - k), hi, b, epsrel)
        else:
            total += _quad_real(lambda s: nu(r, s) / (s - k), a, b, epsrel)
    # indicator interval reaching past the grid, where nu = 0
    overhang = near[1] - r.z_max if j == 0 else -r.z_max - near[0]
    if overhang > 0:
        sign = 1.0 if j == 0 else -1.0
        total += sign * nu_k * np.log(r.z_max - kappa)
    return float(total)


def F12_at_phase_point(
    poles: Sequence[BasePole],
    partition: LambdaPartition,
    r: ReflectionCoefficient,
    kappa: float,
    j: int,
    epsrel: float = QUAD_EPSREL,
) -> complex:
    """
    Unimodular constant F12^0 = f1 f2 exp(2 i beta) at the phase point (-1)^j kappa

    Example:
        no poles, r = 0 -> 1
    """
    k = (-1) ** j * kappa
    f1 = 1 + 0j
    for n in partition.lambda1:
        xi = poles[n].xi
        f1 *= ((k - xi) / (k - xi.conjugate())) ** 2
        f1 *= (k - _W * xi.conjugate()) / (k - _W * xi)
        f1 *= (k - _W ** 2 * xi.conjugate()) / (k - _W ** 2 * xi)
    f2 = 1 + 0j
    for n in partition.lambda2:
        xi = poles[n].xi
        f2 *= ((k - _W * xi) / (k - _W ** 2 * xi.conjugate())) ** 2
        f2 *= (k - xi.conjugate()) / (k - _W ** 2 * xi)
        f2 *= (k - _W * xi.conjugate()) / (k - xi)
    beta = beta_at_phase_point(r, kappa, j, epsrel)
    return complex(f1 * f2 * np.exp(2j * beta))


def shifted_norming_constants(
    poles: Sequence[BasePole],
    r: ReflectionCoefficient,
    interval: Sequence[Tuple[float, float]],
    epsrel: float = QUAD_EPSREL,
) -> List[complex]:
    """
    c_hat_n = c_n exp((i/pi) int_I log(1 - |r(s)|^2) / (s - xi_n) ds)

    Example:
        r = 0 -> c_hat_n = c_n
    """
    segments = _segments(interval, r.z_max)
    if r.is_zero or not segments:
        return [p.c for p in poles]
    out = []
    for pole in poles:
        integral = cauchy_integral(lambda s: np.log1p(-abs(r(s)) ** 2), segments, pole.xi, epsrel=epsrel)
        out.append(complex(pole.c * np.exp(1j / np.pi * integral)))
    return out


def diagnostics_table(
    r: ReflectionCoefficient, geometry: PhaseGeometry, n_points: int = 200
) -> List[Tuple[float, float, complex, complex]]:
    """(s, nu(s), delta_+(s), delta_-(s)) at interior points of I"""
    segments = _segments(geometry.interval, r.z_max)
    rows = []
    for a, b in segments:
        inner = np.linspace(a, b, n_points + 2)[1:-1]
        for s in inner:
            rows.append((
                float(s),
                nu(r, s),
                delta(r, geometry.interval, s, side="+"),
                delta(r, geometry.interval, s, side="-"),
            ))
    return rows


@dataclass
class ConjugationContext:
    """Everything the conjugation step needs at one (y, t)"""
    data: ScatteringData
    geometry: PhaseGeometry
    partition: LambdaPartition
    epsrel: float = QUAD_EPSREL
    _delta_cache: Dict[Tuple[complex, Optional[str]], complex] = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, data: ScatteringData, y: float, t: float, epsrel: float = QUAD_EPSREL) -> "ConjugationContext":
        geometry = phase_geometry(y, t)
        partition = lambda_partition(data.poles, geometry.xi_ratio)
        logger.debug(f"conjugation context xi={geometry.xi_ratio:.6g} region={geometry.region.value} partition={partition}")
        return cls(data=data, geometry=geometry, partition=partition, epsrel=epsrel)

    @property
    def reflection(self) -> ReflectionCoefficient:
        return self.data.reflection

    @property
    def kappa(self) -> Optional[float]:
        return self.geometry.kappa if self.geometry.region is Region.I else None

    def nu(self, s: float) -> float:
        return nu(self.reflection, s)

    def delta(self, z: complex, side: Optional[str] = None) -> complex:
        key = (complex(z), side)
        if key not in self._delta_cache:
            self._delta_cache[key] = delta(self.reflection, self.geometry.interval, z, side, self.epsrel)
        return self._delta_cache[key]

    def T_and_F(self, z: complex, side: Optional[str] = None) -> ConjugationValues:
        return T_and_F(self.data.poles, self.partition, self.delta, z, side)

    def F3_taylor(self) -> Tuple[complex, complex]:
        return F3_taylor(self.data.poles, self.partition, self.reflection, self.kappa, self.epsrel)

    def F12_at_phase_point(self, j: int) -> complex:
        if self.geometry.region is Region.II:
            raise DomainError("region II has no phase points")
        return F12_at_phase_point(self.data.poles, self.partition, self.reflection, self.kappa, j, self.epsrel)

    def shifted_norming_constants(self) -> List[complex]:
        return shifted_norming_constants(self.data.poles, self.reflection, self.geometry.interval, self.epsrel)

    def shifted_poles(self) -> List[BasePole]:
        return [
            BasePole(xi=p.xi, c=c_hat, kind=p.kind)
            for p, c_hat in zip(self.data.poles, self.shifted_norming_constants())
        ]
