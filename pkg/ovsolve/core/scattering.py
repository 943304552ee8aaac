"""
Direct scattering for an initial profile u0(x)

Lax x-equation in the normalized frame, column l:
  m' = q (Lambda - lambda_l) m + U m,   Lambda = z diag(w, w^2, 1)
  U  = q_x / (3 q) * K
with boundary values m_j = delta_jl at +inf when Re lambda_j >= Re lambda_l and
at -inf otherwise. U vanishes outside the profile grid [a, b], so the boundary
values move to a and b and every column becomes a two-point problem solved by
multiple shooting over segment propagators of phi' = (q Lambda + U) phi.

Reflection on the real line comes from the jump Psi_+ = Psi_- e^{y Lambda} S0 e^{-y Lambda}:
  r(z) = -J_21 exp(i sqrt(3) y z),   J = Psi_-^{-1} Psi_+
with the + side above the positive and below the negative real axis.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from ovsolve.core.errors import ConfigurationError, DomainError, NumericalError
from ovsolve.core.spectral import OMEGA, RAY_ARG, SQRT3, BasePole, PoleKind, ReflectionCoefficient


logger = logging.getLogger(__name__)


# Constants
END_TOL = 1e-10             # |u0|, |u0''| allowed at the grid ends
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12
SEGMENT_PHASE = 1.5         # max |z| * (y_{k+1} - y_k) per shooting segment
MIN_SEGMENTS = 8
SIDE_EPS = 1e-9             # offset used only to order Re lambda on the real axis
R_LIMIT = 1.0 - 1e-6
POLE_ACCEPT = 1e-6          # |d| at an accepted zero, relative to max |d| on the scan
RING_RADIUS = 1e-3
RING_POINTS = 16

_W = complex(OMEGA)
_K = np.array(
    [[0, 1 - _W ** 2, 1 - _W], [1 - _W, 0, 1 - _W ** 2], [1 - _W ** 2, 1 - _W, 0]], dtype=complex
)


def eigenvalues(z: complex) -> np.ndarray:
    """lambda_j = z w^j for j = 1, 2, 3"""
    return complex(z) * np.array([_W, _W ** 2, 1.0], dtype=complex)


@dataclass(frozen=True)
class InitialProfile:
    """u0 on a uniform grid with q = (1 - u0'')^(1/3) and y(x) = x - int_x^inf (q - 1) ds"""
    x: np.ndarray
    u0: np.ndarray
    q: np.ndarray
    qx: np.ndarray
    y: np.ndarray
    _q_spline: CubicSpline = field(repr=False, compare=False)
    _qx_spline: CubicSpline = field(repr=False, compare=False)

    @property
    def support(self) -> Tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    def q_at(self, x: float) -> float:
        a, b = self.support
        return 1.0 if x <= a or x >= b else float(self._q_spline(x))

    def qx_at(self, x: float) -> float:
        a, b = self.support
        return 0.0 if x <= a or x >= b else float(self._qx_spline(x))

    def y_at(self, x: float) -> float:
        return float(np.interp(x, self.x, self.y))

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.qx)


def _spectral_derivatives(x: np.ndarray, u: np.ndarray, orders: Sequence[int]) -> List[np.ndarray]:
    n = x.size
    dx = x[1] - x[0]
    k = 2 * np.pi * np.fft.rfftfreq(n, d=dx)
    u_hat = np.fft.rfft(u)
    out = []
    for order in orders:
        d_hat = (1j * k) ** order * u_hat
        if n % 2 == 0 and order % 2 == 1:
            d_hat[-1] = 0.0
        out.append(np.fft.irfft(d_hat, n=n))
    return out


def build_profile(x: Sequence[float], u0: Sequence[float]) -> InitialProfile:
    """
    Reciprocal-transform data of an initial profile

    Args:
        x: Uniform grid
        u0: Samples of u0 on the grid

    Returns:
        InitialProfile with q, q_x and the y map

    Raises:
        ConfigurationError: If the grid is not uniform or u0 has not decayed at the ends
        DomainError: If 1 - u0'' <= 0 somewhere
    """
    x = np.asarray(x, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if x.ndim != 1 or x.shape != u0.shape or x.size < 16:
        raise ConfigurationError("profile needs two equal-length 1-D arrays with at least 16 samples")
    steps = np.diff(x)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
        raise ConfigurationError("profile grid must be uniform and increasing")

    u2, u3 = _spectral_derivatives(x, u0, (2, 3))
    ends = max(abs(u0[0]), abs(u0[-1]), abs(u2[0]), abs(u2[-1]))
    if ends > END_TOL:
        raise ConfigurationError(f"profile has not decayed at the grid ends (|u0|, |u0''| up to {ends:.3g})")
    base = 1.0 - u2
    if np.min(base) <= 0:
        bad = x[int(np.argmin(base))]
        raise DomainError(f"1 - u0'' <= 0 at x = {bad:.6g}")

    q = np.cbrt(base)
    qx = -u3 / (3 * q ** 2)
    # y(x) = x - int_x^b (q - 1) ds, q = 1 beyond b
    running = cumulative_trapezoid(q - 1.0, x, initial=0.0)
    y = x - (running[-1] - running)
    logger.info(f"profile on [{x[0]:.4g}, {x[-1]:.4g}] with {x.size} samples, min q = {q.min():.6g}")
    return InitialProfile(
        x=x, u0=u0, q=q, qx=qx, y=y,
        _q_spline=CubicSpline(x, q), _qx_spline=CubicSpline(x, qx),
    )


@dataclass(frozen=True)
class SegmentPropagators:
    """Unshifted propagators phi(x_{k+1}) = P_k phi(x_k) and y increments over the shooting nodes"""
    z: complex
    nodes: np.ndarray
    props: np.ndarray
    dy: np.ndarray


def _rhs(profile: InitialProfile, lam: np.ndarray) -> Callable:
    def fun(x, state):
        phi = state[:9].reshape(3, 3)
        q = profile.q_at(x)
        A = q * np.diag(lam) + profile.qx_at(x) / (3 * q) * _K
        return np.concatenate([(A @ phi).ravel(), [q]])
    return fun


def shooting_nodes(profile: InitialProfile, z: complex, extra: Sequence[float] = ()) -> np.ndarray:
    a, b = profile.support
    span = profile.y[-1] - profile.y[0]
    count = max(MIN_SEGMENTS, int(np.ceil(abs(z) * span / SEGMENT_PHASE)))
    nodes = np.linspace(a, b, count + 1)
    if len(extra):
        nodes = np.unique(np.concatenate([nodes, np.clip(extra, a, b)]))
    return nodes


def segment_propagators(profile: InitialProfile, z: complex, extra_nodes: Sequence[float] = ()) -> SegmentPropagators:
    """
    Integrate phi' = (q Lambda + U) phi over each shooting segment with DOP853

    Raises:
        NumericalError: If the integrator fails on a segment
    """
    z = complex(z)
    lam = eigenvalues(z)
    nodes = shooting_nodes(profile, z, extra_nodes)
    props = np.empty((nodes.size - 1, 3, 3), dtype=complex)
    dy = np.empty(nodes.size - 1)
    fun = _rhs(profile, lam)
    start = np.concatenate([np.eye(3, dtype=complex).ravel(), [0.0]])
    for k in range(nodes.size - 1):
        if profile.is_trivial:
            step = profile.y_at(nodes[k + 1]) - profile.y_at(nodes[k])
            props[k] = np.diag(np.exp(lam * step))
            dy[k] = step
            continue
        sol = solve_ivp(fun, (nodes[k], nodes[k + 1]), start, method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL)
        if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
            raise NumericalError(f"Jost integration failed at z = {z} on [{nodes[k]:.4g}, {nodes[k + 1]:.4g}]: {sol.message}")
        props[k] = sol.y[:9, -1].reshape(3, 3)
        dy[k] = sol.y[9, -1].real
    return SegmentPropagators(z=z, nodes=nodes, props=props, dy=dy)


@dataclass(frozen=True)
class JostSolution:
    """Psi at the shooting nodes; side is '+', '-' or None off the real axis"""
    z: complex
    side: Optional[str]
    nodes: np.ndarray
    values: np.ndarray
    y_nodes: np.ndarray

    def at_node(self, x: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.nodes - x)))
        if abs(self.nodes[idx] - x) > 1e-12 * max(1.0, abs(x)):
            raise DomainError(f"x = {x} is not a shooting node; pass it as a matching point")
        return self.values[idx]

    @property
    def det(self) -> np.ndarray:
        return np.linalg.det(self.values)


def _ordering_point(z: complex, side: Optional[str]) -> complex:
    if z.imag != 0:
        return z
    if side not in ("+", "-"):
        raise DomainError(f"z = {z.real} is on the real axis; pass side '+' or '-'")
    # + lies above the positive and below the negative half line
    up = (side == "+") == (z.real > 0)
    return z + (1j if up else -1j) * SIDE_EPS * abs(z)


def jost_solve(
    profile: InitialProfile,
    z: complex,
    side: Optional[str] = None,
    match_points: Sequence[float] = (0.0,),
    propagators: Optional[SegmentPropagators] = None,
) -> JostSolution:
    """
    Normalized Jost matrix Psi(x; z) at the shooting nodes

    Args:
        profile: Initial profile
        z: Spectral parameter, z != 0
        side: Boundary side for real z
        match_points: x values guaranteed to be shooting nodes
        propagators: Precomputed segment propagators for the same z

    Raises:
        DomainError: If z = 0 or real z comes without a side
        NumericalError: If a column's two-point system is singular
    """
    z = complex(z)
    if z == 0:
        raise DomainError("z = 0 is excluded")
    ordering = eigenvalues(_ordering_point(z, side)).real
    lam = eigenvalues(z)
    segs = propagators or segment_propagators(profile, z, match_points)
    n_nodes = segs.nodes.size
    size = 3 * n_nodes
    values = np.empty((n_nodes, 3, 3), dtype=complex)

    for l in range(3):
        plus = [j for j in range(3) if ordering[j] >= ordering[l]]
        A = np.zeros((size, size), dtype=complex)
        rhs = np.zeros(size, dtype=complex)
        for k in range(n_nodes - 1):
            rows = slice(3 * k, 3 * k + 3)
            A[rows, 3 * k:3 * k + 3] = -segs.props[k] * np.exp(-lam[l] * segs.dy[k])
            A[rows, 3 * k + 3:3 * k + 6] = np.eye(3)
        row = 3 * (n_nodes - 1)
        for j in range(3):
            if j in plus:
                A[row, 3 * (n_nodes - 1) + j] = 1.0
                rhs[row] = 1.0 if j == l else 0.0
            else:
                A[row, j] = 1.0
            row += 1
        try:
            sol = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"Jost column {l + 1} is singular at z = {z}") from exc
        values[:, :, l] = sol.reshape(n_nodes, 3)

    y_nodes = np.array([profile.y_at(x) for x in segs.nodes])
    return JostSolution(z=z, side=side, nodes=segs.nodes, values=values, y_nodes=y_nodes)


@dataclass(frozen=True)
class ReflectionResult:
    z: np.ndarray
    r: np.ndarray
    diagnostics: Dict[str, float]

    def as_coefficient(self) -> ReflectionCoefficient:
        return ReflectionCoefficient(self.z, self.r)


def reflection_at(profile: InitialProfile, z: float, x_match: float = 0.0) -> Tuple[complex, Dict[str, float]]:
    """
    r(z) at one real z from the jump of Psi at x_match

    Returns:
        (r, diagnostics) with the S0-structure residuals and the det check
    """
    z = float(z)
    if z == 0:
        raise DomainError("r is not evaluated at z = 0")
    segs = segment_propagators(profile, z, (x_match,))
    plus = jost_solve(profile, z, "+", (x_match,), segs)
    minus = jost_solve(profile, z, "-", (x_match,), segs)
    psi_p, psi_m = plus.at_node(x_match), minus.at_node(x_match)
    J = np.linalg.solve(psi_m, psi_p)
    y0 = profile.y_at(x_match)
    phase = np.exp(1j * SQRT3 * y0 * z)
    r = complex(-J[1, 0] * phase)
    diag = {
        "s22_residual": float(abs(J[1, 1] - (1 - abs(r) ** 2))),
        "s12_residual": float(abs(J[0, 1] - np.conj(r) * phase)),
        "det_error": float(max(np.max(np.abs(plus.det - 1)), np.max(np.abs(minus.det - 1)))),
    }
    return r, diag


def reflection(
    profile: InitialProfile,
    z_grid: Sequence[float],
    x_match: float = 0.0,
    x_check: Optional[float] = None,
    threads: int = 1,
) -> ReflectionResult:
    """
    Sample the reflection coefficient on a real grid

    Args:
        profile: Initial profile
        z_grid: Real points, none equal to 0
        x_match: Matching point for the jump
        x_check: Optional second matching point; the largest discrepancy is reported
        threads: Worker threads across z

    Raises:
        DomainError: If |r| reaches 1 - 1e-6
    """
    z = np.asarray(z_grid, dtype=float)
    if profile.is_trivial:
        return ReflectionResult(z=z, r=np.zeros(z.size, dtype=complex), diagnostics={"sup_abs_r": 0.0})

    def one(zz):
        r, diag = reflection_at(profile, zz, x_match)
        if x_check is not None:
            r2, _ = reflection_at(profile, zz, x_check)
            diag["matching_discrepancy"] = float(abs(r - r2))
        return r, diag

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, z.tolist()))
    else:
        results = [one(zz) for zz in z.tolist()]

    r = np.array([res[0] for res in results], dtype=complex)
    sup = float(np.max(np.abs(r))) if r.size else 0.0
    if sup >= R_LIMIT:
        logger.warning(f"near-singular scattering: sup |r| = {sup:.8f}")
        raise DomainError(f"sup |r| = {sup:.8f} reaches the unit circle")
    summary = {"sup_abs_r": sup}
    for key in ("s22_residual", "s12_residual", "det_error", "matching_discrepancy"):
        vals = [res[1][key] for res in results if key in res[1]]
        if vals:
            summary[key] = float(max(vals))
    logger.info(f"reflection on {z.size} points: sup |r| = {sup:.3e}")
    return ReflectionResult(z=z, r=r, diagnostics=summary)


def scattering_denominators(profile: InitialProfile, z: complex) -> Tuple[complex, complex]:
    """
    Normalized minors whose zeros on the ray arg z = pi/6 are poles

    d1 = [prod P_k e^{-lambda_3 dy_k}]_33        (third column, type1)
    d2 = [prod P_k^-1 e^{lambda_1 dy_k}]_11      (adjoint first column, type2)

    Both products have bounded factors on the ray and equal 1 for u0 = 0.
    """
    segs = segment_propagators(profile, z)
    lam = eigenvalues(z)
    forward = np.eye(3, dtype=complex)
    backward = np.eye(3, dtype=complex)
    for k in range(segs.props.shape[0]):
        forward = segs.props[k] * np.exp(-lam[2] * segs.dy[k]) @ forward
        backward = backward @ (np.linalg.inv(segs.props[k]) * np.exp(lam[0] * segs.dy[k]))
    return complex(forward[2, 2]), complex(backward[0, 0])


def find_minima(func: Callable[[float], float], grid: Sequence[float]) -> List[Tuple[float, float]]:
    """Brackets (grid[i-1], grid[i+1]) around interior grid minima of func"""
    grid = list(grid)
    values = [func(g) for g in grid]
    out = []
    for i in range(1, len(grid) - 1):
        if values[i] <= values[i - 1] and values[i] < values[i + 1]:
            out.append((grid[i - 1], grid[i + 1]))
    return out


def refine_minimum(func: Callable[[float], float], a: float, b: float, xtol: float = 1e-12) -> float:
    """Minimizer of func on [a, b] by bounded Brent iteration"""
    result = minimize_scalar(func, bounds=(a, b), method="bounded", options={"xatol": xtol, "maxiter": 500})
    return float(result.x)


def ring_residue(func: Callable[[complex], np.ndarray], center: complex, radius: float) -> np.ndarray:
    """Residue of func at center from the mean of (z - center) func(z) on a small ring"""
    angles = 2 * np.pi * np.arange(RING_POINTS) / RING_POINTS
    ring = center + radius * np.exp(1j * angles)
    return np.mean([(p - center) * np.asarray(func(p)) for p in ring], axis=0)


def _residue_matrix(profile: InitialProfile, z: complex, x_match: float) -> np.ndarray:
    psi = jost_solve(profile, z, None, (x_match,)).at_node(x_match)
    cof = np.cross(psi[:, 1], psi[:, 2])
    return np.column_stack([cof, psi[:, 1], psi[:, 2]])


def _norming_constant(profile: InitialProfile, xi: complex, kind: PoleKind, x_match: float) -> complex:
    # type1: Res col 3 = c e^{(l1 - l3) y} col 1;  type2: Res col 1 = c e^{(l3 - l1) y} col 3
    if kind is PoleKind.TYPE1:
        solve = lambda p: jost_solve(profile, p, None, (x_match,)).at_node(x_match)
        a_col, b_col = 0, 2
    else:
        solve = lambda p: _residue_matrix(profile, p, x_match)
        a_col, b_col = 2, 0
    # both averages use the same ring points
    cache: Dict[complex, np.ndarray] = {}

    def matrix(p: complex) -> np.ndarray:
        if p not in cache:
            cache[p] = solve(p)
        return cache[p]

    radius = RING_RADIUS * abs(xi)
    res = ring_residue(lambda p: matrix(p)[:, b_col], xi, radius)
    at_pole = ring_residue(lambda p: matrix(p)[:, a_col] / (p - xi), xi, radius)
    lam = eigenvalues(xi)
    y0 = profile.y_at(x_match)
    ratio = np.vdot(at_pole, res) / np.vdot(at_pole, at_pole)
    return complex(ratio * np.exp(-(lam[a_col] - lam[b_col]) * y0))


def ray_zeros(func: Callable[[float], complex], grid: Sequence[float]) -> List[float]:
    """
    Moduli rho where a complex function of the ray position vanishes

    Local minima of |func| on the grid are refined by bounded Brent iteration
    and kept when |func| there is below POLE_ACCEPT times its scan maximum.
    """
    modulus = lambda rho: abs(func(rho))
    scale = max(modulus(g) for g in grid)
    roots: List[float] = []
    for a, b in find_minima(modulus, grid):
        rho = refine_minimum(modulus, a, b)
        if modulus(rho) <= POLE_ACCEPT * scale and all(abs(rho - r) > 1e-8 for r in roots):
            roots.append(rho)
        else:
            logger.debug(f"minimum |d| = {modulus(rho):.3g} at rho = {rho:.6g} rejected")
    return roots


def pole_search(
    profile: InitialProfile,
    modulus_range: Tuple[float, float],
    n_scan: int = 200,
    x_match: float = 0.0,
) -> List[BasePole]:
    """
    Discrete eigenvalues on the ray arg z = pi/6

    Zeros of both normalized minors along the ray come from ray_zeros; each zero
    gets its norming constant from ring averages of the Jost columns.

    Returns:
        Poles sorted by modulus; empty when nothing converges
    """
    lo, hi = modulus_range
    if lo <= 0 or hi <= lo:
        raise ConfigurationError(f"modulus range must satisfy 0 < lo < hi, got {modulus_range}")
    if profile.is_trivial:
        return []
    ray = np.exp(1j * RAY_ARG)
    grid = np.linspace(lo, hi, n_scan)
    cache: Dict[float, Tuple[complex, complex]] = {}

    def dens(rho: float) -> Tuple[complex, complex]:
        if rho not in cache:
            cache[rho] = scattering_denominators(profile, rho * ray)
        return cache[rho]

    found: List[BasePole] = []
    for index, kind in ((0, PoleKind.TYPE1), (1, PoleKind.TYPE2)):
        for rho in ray_zeros(lambda rho, index=index: dens(rho)[index], grid):
            xi = rho * ray
            c = _norming_constant(profile, xi, kind, x_match)
            logger.info(f"pole {kind.value} at |xi| = {rho:.10g}, c = {c:.6g}")
            found.append(BasePole(xi=xi, c=c, kind=kind))
    return sorted(found, key=lambda p: p.rho)
