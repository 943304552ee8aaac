"""
Tests for the parabolic cylinder model and the asymptotic formulas
"""
import mpmath
import numpy as np
import pytest

from ovsolve.core.conjugation import ConjugationContext
from ovsolve.core.errors import DomainError, DomainGateError, NumericalError
from ovsolve.core.local_model import (
    A_matrices,
    asymptotic_solution,
    complex_gamma,
    dispersive_correction,
    f_correction,
    pc_coefficients,
    r0_at,
    scale_constant,
    symmetry_defect,
)
from ovsolve.core.soliton import assemble_and_solve, outer_taylor, reconstruct_x, u_of_y
from ovsolve.core.spectral import GAMMA1, SQRT3, BasePole, ReflectionCoefficient, Region, ScatteringData, phase_geometry


def bump(amplitude: float = 0.25) -> ReflectionCoefficient:
    return ReflectionCoefficient.from_function(
        lambda z: amplitude * np.exp(-(z ** 2 - 1) ** 2), z_max=10.0, n_grid=4001
    )


def twisted_bump(amplitude: float = 0.25) -> ReflectionCoefficient:
    """Complex r with a phase that varies along the axis"""
    return ReflectionCoefficient.from_function(
        lambda z: amplitude * np.exp(-(z ** 2 - 1) ** 2) * np.exp(0.3j * z), z_max=10.0, n_grid=4001
    )


def loop_pole(rho: float = 1.0) -> BasePole:
    return BasePole.from_polar(rho, 2 * SQRT3 * rho * np.exp(-1j * np.pi / 6))


@pytest.mark.parametrize("z", [0.5 + 0.3j, -0.4j, 0.01j, 2.5 - 1.2j, -1.5 + 0.7j])
def test_complex_gamma_matches_mpmath(z):
    """scipy loggamma agrees with mpmath.gamma"""
    expected = complex(mpmath.gamma(mpmath.mpc(z.real, z.imag)))
    assert complex_gamma(z) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("modulus", [0.01, 0.3, 0.7, 0.9, 0.9999])
def test_pc_coefficient_identities(modulus):
    """|beta12| = |beta21| = sqrt(nu), beta21 = conj(beta12) and M1pc is Gamma1-symmetric"""
    r0 = modulus * np.exp(0.8j)
    pc = pc_coefficients(r0)
    assert pc.nu == pytest.approx(-np.log(1 - modulus ** 2) / (2 * np.pi))
    assert abs(pc.beta12) == pytest.approx(np.sqrt(pc.nu), rel=1e-10)
    assert abs(pc.beta21) == pytest.approx(np.sqrt(pc.nu), rel=1e-10)
    assert pc.beta12 * pc.beta21 == pytest.approx(pc.nu, rel=1e-10)
    assert pc.beta21 == pytest.approx(pc.beta12.conjugate(), rel=1e-12)
    assert np.allclose(pc.M1pc, GAMMA1 @ pc.M1pc.conj() @ GAMMA1, atol=1e-14)
    assert pc.M1pc[0, 1] == pytest.approx(-1j * pc.beta12)
    assert pc.M1pc[1, 0] == pytest.approx(1j * pc.beta21)


def test_pc_coefficients_edge_cases():
    """r0 = 0 gives a zero model; |r0| >= 1 is refused"""
    pc = pc_coefficients(0j)
    assert pc.nu == 0.0
    assert not np.any(pc.M1pc)
    with pytest.raises(DomainError):
        pc_coefficients(1.0)


def test_scale_constant_at_every_phase_point():
    """|2 sqrt(3) / k^3| is the same at all six phase points"""
    geo = phase_geometry(-2.0, 5.0)
    for n in range(3):
        for j in range(2):
            point = geo.point(n, j)
            assert abs(2 * SQRT3 / point ** 3) == pytest.approx(scale_constant(geo.kappa))


def test_r0_modulus():
    """Only conj(r(k)) changes the modulus of r0"""
    data = ScatteringData(bump(), (loop_pole(0.5),))
    ctx = ConjugationContext.build(data, -40.0, 40.0)
    for j in (0, 1):
        k = (-1) ** j * ctx.kappa
        assert abs(r0_at(j, 40.0, ctx)) == pytest.approx(abs(data.reflection(k)), rel=1e-8)


def test_r0_region_two_refused():
    ctx = ConjugationContext.build(ScatteringData(bump()), 10.0, 20.0)
    with pytest.raises(DomainError):
        r0_at(0, 20.0, ctx)


def test_A_matrices_vanish_without_reflection():
    """A0 = A1 = 0 for r = 0 and in region II"""
    ctx = ConjugationContext.build(ScatteringData.reflectionless([loop_pole()]), -20.0, 20.0)
    A0, A1 = A_matrices(None, ctx, 20.0)
    assert not np.any(A0) and not np.any(A1)
    ctx = ConjugationContext.build(ScatteringData(bump()), 20.0, 20.0)
    A0, A1 = A_matrices(None, ctx, 20.0)
    assert not np.any(A0) and not np.any(A1)


def test_gate():
    """t below t_min is refused"""
    with pytest.raises(DomainGateError):
        asymptotic_solution(ScatteringData(bump()), -5.0, 5.0, t_min=10.0)


def test_reflectionless_reduces_to_soliton():
    """r = 0 returns the reflectionless x and u exactly"""
    data = ScatteringData.reflectionless([loop_pole(1.0)])
    for y in (-25.0, -20.0, 3.0):
        result = asymptotic_solution(data, y, 20.0)
        assert result.x == reconstruct_x(data, y, 20.0)
        assert result.u == u_of_y(data, y, 20.0)


def test_region_two_ignores_reflection():
    """For y/t > 0 only the solitons contribute"""
    pole = loop_pole(1.0)
    data = ScatteringData(bump(), (pole,))
    clean = ScatteringData.reflectionless([pole])
    result = asymptotic_solution(data, 5.0, 20.0)
    assert result.region is Region.II
    assert result.error_order == "t^-1"
    assert result.x == pytest.approx(reconstruct_x(clean, 5.0, 20.0), abs=1e-10)
    assert result.u == pytest.approx(u_of_y(clean, 5.0, 20.0), abs=1e-10)


def test_region_one_result():
    """Region I carries the t^-1/2 correction and its diagnostics"""
    result = asymptotic_solution(ScatteringData(bump()), -20.0, 20.0)
    assert result.region is Region.I
    assert result.error_order == "t^-3/4"
    assert np.isfinite(result.x) and np.isfinite(result.u)
    for key in ("g", "f", "f_t", "nu_plus", "nu_minus", "F3_0_re"):
        assert key in result.diagnostics
    assert result.x == pytest.approx(-20.0 + result.diagnostics["g"] + result.diagnostics["f"] / np.sqrt(20.0))


def test_dispersive_correction_zero_cases():
    """f vanishes for r = 0 and in region II"""
    assert dispersive_correction(ScatteringData.reflectionless([loop_pole()]), -20.0, 20.0) == 0
    assert dispersive_correction(ScatteringData(bump()), 20.0, 20.0) == 0


def test_A_matrices_gamma1_symmetric():
    """A_k = Gamma1 conj(A_k) Gamma1 with a complex r and a soliton"""
    data = ScatteringData(twisted_bump(), (loop_pole(1.0),))
    y, t = -30.0, 40.0
    ctx = ConjugationContext.build(data, y, t)
    outer = outer_taylor(assemble_and_solve(ScatteringData.reflectionless(ctx.shifted_poles()), y, t))
    A0, A1 = A_matrices(outer, ctx, t)
    assert np.abs(A0).max() > 1e-3
    assert np.abs(A1).max() > 1e-3
    assert symmetry_defect(A0) < 1e-8 * np.abs(A0).max()
    assert symmetry_defect(A1) < 1e-8 * np.abs(A1).max()
    assert np.isfinite(dispersive_correction(data, y, t))


def test_f_without_solitons():
    """M = I: f = F3_1 / F3_0 + sum_j 2 Im(beta12_j) / (sqrt|c| k_0j)"""
    data = ScatteringData(twisted_bump())
    y, t = -30.0, 40.0
    ctx = ConjugationContext.build(data, y, t)
    f0, f1 = ctx.F3_taylor()
    expected = (f1 / f0).real
    for j, sign in ((0, 1.0), (1, -1.0)):
        beta = pc_coefficients(r0_at(j, t, ctx)).beta12
        expected += sign * 2 * beta.imag / (np.sqrt(scale_constant(ctx.kappa)) * ctx.kappa)
    assert dispersive_correction(data, y, t) == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_f_correction_refuses_complex_values():
    """A non-real f is an error, not a truncation"""
    A0 = np.zeros((3, 3), dtype=complex)
    A1 = np.zeros((3, 3), dtype=complex)
    A1[0, 2] = 0.5j
    with pytest.raises(NumericalError):
        f_correction(None, (1 + 0j, 0j), A0, A1)
    A1[0, 2] = 0.5
    assert f_correction(None, (1 + 0j, 0.25 + 0j), A0, A1) == pytest.approx(0.75)
