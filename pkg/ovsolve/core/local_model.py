"""
Parabolic cylinder model and the long-time asymptotic formulas

Region II:  u = u_sol(y, t),                        x = y + g(y, t)
Region I:   u = u_sol(y, t) + t^(-1/2) f_t(y, t),   x = y + g(y, t) + t^(-1/2) f(y, t)

u_sol is the reflectionless solution with the shifted norming constants.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import loggamma

from ovsolve.core.conjugation import QUAD_EPSREL, ConjugationContext
from ovsolve.core.errors import DomainError, DomainGateError, NumericalError, ReconstructionSingularityError
from ovsolve.core.soliton import (
    DENOMINATOR_TOL,
    IMAG_TOL,
    OuterSolution,
    assemble_and_solve,
    eval_Msol,
    outer_taylor,
    reconstruct_x,
    u_of_y,
)
from ovsolve.core.spectral import GAMMA1, GAMMA4, GAMMA4_INV, OMEGA, SQRT3, Region, ScatteringData, phase_geometry


logger = logging.getLogger(__name__)


# Constants
DEFAULT_T_MIN = 10.0
F_STEP = 1e-3           # relative t step for f_t
SYMMETRY_TOL = 1e-8     # relative Gamma1 defect allowed in A0, A1 and f
ERROR_ORDER = {Region.I: "t^-3/4", Region.II: "t^-1"}


@dataclass(frozen=True)
class PCData:
    r0: complex
    nu: float
    beta12: complex
    beta21: complex
    M1pc: np.ndarray


@dataclass(frozen=True)
class AsymptoticResult:
    u: float
    x: float
    region: Region
    error_order: str
    diagnostics: Dict[str, float] = field(default_factory=dict)


def complex_gamma(z: complex) -> complex:
    """Gamma(z) for complex z via scipy.special.loggamma"""
    return complex(np.exp(loggamma(complex(z))))


def pc_coefficients(r0: complex) -> PCData:
    """
    Coefficients of the parabolic cylinder model

    beta12 = sqrt(2 pi) e^{i pi/4}  e^{-pi nu/2} / (r0 Gamma(-i nu))
    beta21 = sqrt(2 pi) e^{-i pi/4} e^{-pi nu/2} / (conj(r0) Gamma(i nu)) = conj(beta12)
    M1pc   = [[0, -i beta12, 0], [i beta21, 0, 0], [0, 0, 0]]

    |beta12| = |beta21| = sqrt(nu), beta12 * beta21 = nu and M1pc = Gamma1 conj(M1pc) Gamma1,
    the reduction 1 - |r0|^2 > 0 of the model problem.

    Raises:
        DomainError: If |r0| >= 1
    """
    r0 = complex(r0)
    mod = abs(r0)
    if mod >= 1.0:
        raise DomainError(f"|r0| = {mod:.6g} must be < 1")
    if mod == 0.0:
        return PCData(r0=r0, nu=0.0, beta12=0j, beta21=0j, M1pc=np.zeros((3, 3), dtype=complex))
    nu = float(-np.log1p(-mod ** 2) / (2 * np.pi))
    front = np.sqrt(2 * np.pi) * np.exp(-np.pi * nu / 2)
    beta12 = front * np.exp(1j * np.pi / 4) / (r0 * complex_gamma(-1j * nu))
    beta21 = front * np.exp(-1j * np.pi / 4) / (r0.conjugate() * complex_gamma(1j * nu))
    M1pc = np.zeros((3, 3), dtype=complex)
    M1pc[0, 1] = -1j * beta12
    M1pc[1, 0] = 1j * beta21
    return PCData(r0=r0, nu=nu, beta12=complex(beta12), beta21=complex(beta21), M1pc=M1pc)


def scale_constant(kappa: float) -> float:
    """|c_nj| = 2 sqrt(3) / kappa^3, the same at all six phase points"""
    return 2 * SQRT3 / kappa ** 3


def r0_at(j: int, t: float, ctx: ConjugationContext) -> complex:
    """
    r0 = -conj(r(k)) / F12^0(k) * exp(-2 i nu log sqrt(|c| t)) * (8 sqrt(3) t / kappa)^(-i nu)

    at k = (-1)^j kappa; every factor but conj(r(k)) is unimodular.

    Raises:
        DomainError: In region II or for t <= 0
    """
    if ctx.geometry.region is Region.II:
        raise DomainError("r0 is defined at phase points of region I only")
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    kappa = ctx.kappa
    k = (-1) ** j * kappa
    r_k = ctx.reflection(k)
    if r_k == 0:
        return 0j
    nu_k = ctx.nu(k)
    g0 = ctx.F12_at_phase_point(j)
    phase = np.exp(-2j * nu_k * np.log(np.sqrt(scale_constant(kappa) * t)))
    phase *= np.exp(-1j * nu_k * np.log(8 * SQRT3 * t / kappa))
    return complex(-np.conj(r_k) / g0 * phase)


def A_matrices(
    outer: Optional[OuterSolution], ctx: ConjugationContext, t: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    A_k = sum over the six phase points of M(k) M1pc(k) M(k)^-1 / (sqrt(c_nj) k^k)

    M1pc at w^n k_0j is Gamma4^-1 M1pc Gamma4 for n = 1 and Gamma4 M1pc Gamma4^-1 for n = 2.
    The local variable at w^n k_0j is w^-n sqrt(|c| t) (z - w^n k_0j), so sqrt(c_nj) = w^-n sqrt(|c|)
    with the real |c| = 2 sqrt(3) / kappa^3 at both real points. outer = None stands for M = I.

    Both matrices satisfy A_k = Gamma1 conj(A_k) Gamma1.

    Raises:
        NumericalError: If M is singular at a phase point or the symmetry check fails
    """
    A0 = np.zeros((3, 3), dtype=complex)
    A1 = np.zeros((3, 3), dtype=complex)
    if ctx.geometry.region is Region.II or ctx.reflection.is_zero:
        return A0, A1
    scale = np.sqrt(scale_constant(ctx.kappa))
    for j in range(2):
        base = pc_coefficients(r0_at(j, t, ctx)).M1pc
        if not np.any(base):
            continue
        rotated = (base, GAMMA4_INV @ base @ GAMMA4, GAMMA4 @ base @ GAMMA4_INV)
        for n in range(3):
            point = ctx.geometry.point(n, j)
            if outer is None:
                term = rotated[n]
            else:
                M = eval_Msol(outer.coeffs, point)
                try:
                    term = M @ rotated[n] @ np.linalg.inv(M)
                except np.linalg.LinAlgError as exc:
                    raise NumericalError(f"outer solution is singular at phase point {point}") from exc
            term = term * OMEGA ** n / scale
            A0 += term
            A1 += term / point
    for name, A in (("A0", A0), ("A1", A1)):
        defect = symmetry_defect(A)
        if defect > SYMMETRY_TOL * max(1.0, float(np.abs(A).max())):
            raise NumericalError(f"{name} breaks the Gamma1 symmetry by {defect:.3g}")
    return A0, A1


def symmetry_defect(A: np.ndarray) -> float:
    """max |A - Gamma1 conj(A) Gamma1|"""
    return float(np.abs(A - GAMMA1 @ A.conj() @ GAMMA1).max())


def _column_ratio(numerator: np.ndarray, M0: np.ndarray) -> complex:
    den = M0[:, 2].sum()
    if abs(den) < DENOMINATOR_TOL:
        raise ReconstructionSingularityError("sum of M0[:, 3] vanishes")
    return complex(numerator[:, 2].sum() / den)


def g_value(M0: np.ndarray, M1: np.ndarray, F3: Tuple[complex, complex]) -> complex:
    f0, f1 = F3
    return f1 / f0 + _column_ratio(M1, M0)


def g_correction(outer: Optional[OuterSolution], F3: Tuple[complex, complex]) -> float:
    """
    g = F3_1 / F3_0 + sum_j M1[j, 3] / sum_j M0[j, 3]

    Raises:
        ReconstructionSingularityError: On a vanishing denominator or a non-real value
    """
    M0 = np.eye(3, dtype=complex) if outer is None else outer.M0
    M1 = np.zeros((3, 3), dtype=complex) if outer is None else outer.M1
    g = g_value(M0, M1, F3)
    if abs(g.imag) > IMAG_TOL * max(1.0, abs(g.real)):
        raise ReconstructionSingularityError(f"g has imaginary part {g.imag:.3g}")
    return float(g.real)


def f_value(
    outer: Optional[OuterSolution], F3: Tuple[complex, complex], A0: np.ndarray, A1: np.ndarray
) -> complex:
    """f = F3_1 / F3_0 + sum_j [A1 M0]_{j3} / sum_j [M0]_{j3} + sum_j [A0 M1]_{j3} / sum_j [M0]_{j3}"""
    M0 = np.eye(3, dtype=complex) if outer is None else outer.M0
    M1 = np.zeros((3, 3), dtype=complex) if outer is None else outer.M1
    f0, f1 = F3
    return f1 / f0 + _column_ratio(A1 @ M0, M0) + _column_ratio(A0 @ M1, M0)


def f_correction(
    outer: Optional[OuterSolution], F3: Tuple[complex, complex], A0: np.ndarray, A1: np.ndarray
) -> float:
    """
    Real f of region I

    Raises:
        NumericalError: If f has an imaginary part above SYMMETRY_TOL
    """
    f = f_value(outer, F3, A0, A1)
    if abs(f.imag) > SYMMETRY_TOL * max(1.0, abs(f.real)):
        raise NumericalError(f"f has imaginary part {f.imag:.3g}")
    return float(f.real)


def _outer_for(shifted: ScatteringData, y: float, t: float) -> Optional[OuterSolution]:
    if shifted.n_poles == 0:
        return None
    return outer_taylor(assemble_and_solve(shifted, y, t))


def dispersive_correction(data: ScatteringData, y: float, t: float, epsrel: float = QUAD_EPSREL) -> float:
    """f(y, t) of region I; zero in region II and for r = 0"""
    ctx = ConjugationContext.build(data, y, t, epsrel)
    if ctx.geometry.region is Region.II or data.is_reflectionless:
        return 0.0
    outer = _outer_for(ScatteringData.reflectionless(ctx.shifted_poles()), y, t)
    A0, A1 = A_matrices(outer, ctx, t)
    return f_correction(outer, ctx.F3_taylor(), A0, A1)


def asymptotic_solution(
    data: ScatteringData, y: float, t: float, t_min: float = DEFAULT_T_MIN, epsrel: float = QUAD_EPSREL,
) -> AsymptoticResult:
    """
    Leading long-time formulas for u and x at (y, t)

    Args:
        data: Scattering data with reflection and poles
        y: Reciprocal coordinate
        t: Time, t >= t_min
        t_min: Gate below which the formulas are refused
        epsrel: Relative tolerance of the Cauchy quadratures

    Returns:
        AsymptoticResult with intermediate scalars in diagnostics

    Raises:
        DomainGateError: If t < t_min or y = 0
        NumericalError: If A0, A1 or f lose their reality
    """
    if t < t_min:
        raise DomainGateError(f"t = {t} is below the asymptotic gate t_min = {t_min}")
    geometry = phase_geometry(y, t)
    region = geometry.region
    if data.is_reflectionless:
        x = reconstruct_x(data, y, t)
        u = u_of_y(data, y, t)
        return AsymptoticResult(u=u, x=x, region=region, error_order=ERROR_ORDER[region])

    ctx = ConjugationContext.build(data, y, t, epsrel)
    shifted = ScatteringData.reflectionless(ctx.shifted_poles())
    outer = _outer_for(shifted, y, t)
    F3 = ctx.F3_taylor()
    g = g_correction(outer, F3)
    u = u_of_y(shifted, y, t)
    x = y + g
    diagnostics = {"F3_0_re": F3[0].real, "F3_0_im": F3[0].imag, "F3_1_re": F3[1].real, "g": g}

    if region is Region.I:
        A0, A1 = A_matrices(outer, ctx, t)
        f = f_correction(outer, F3, A0, A1)
        h = F_STEP * t
        ft_h = (dispersive_correction(data, y, t + h, epsrel) - dispersive_correction(data, y, t - h, epsrel)) / (2 * h)
        h2 = h / 2
        ft_h2 = (dispersive_correction(data, y, t + h2, epsrel) - dispersive_correction(data, y, t - h2, epsrel)) / (2 * h2)
        f_t = (4 * ft_h2 - ft_h) / 3
        logger.debug(f"f = {f:.6g}, f_t = {f_t:.6g} at y={y}, t={t}")
        u += f_t / np.sqrt(t)
        x += f / np.sqrt(t)
        diagnostics.update({
            "f": f,
            "f_t": f_t,
            "nu_plus": ctx.nu(geometry.kappa),
            "nu_minus": ctx.nu(-geometry.kappa),
        })

    return AsymptoticResult(u=u, x=x, region=region, error_order=ERROR_ORDER[region], diagnostics=diagnostics)
