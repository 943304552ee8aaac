"""
Tests for spectral-plane constants, pole orbits and phase geometry
"""
import numpy as np
import pytest

from ovsolve.core.errors import ConfigurationError, DomainError, DomainGateError
from ovsolve.core.spectral import (
    OMEGA,
    SQRT3,
    BasePole,
    PoleKind,
    ReflectionCoefficient,
    Region,
    ScatteringData,
    SymmetryConstants,
    classify_region,
    exp_factor,
    expand_orbit,
    phase_derivative,
    phase_exponent,
    phase_geometry,
    soliton_velocities,
    stability_bound,
    theta,
    time_evolve,
)


RAY = np.exp(1j * np.pi / 6)


def test_symmetry_constants():
    """omega is a primitive cube root of unity and the Gammas are involutions / order three"""
    assert SymmetryConstants().check()


def test_theta_values():
    """Direct evaluations of the phase function"""
    assert theta(1.0, -1.0) == pytest.approx(SQRT3)
    assert theta(1j, 0.0) == pytest.approx(-0.5j * SQRT3)


def test_theta_rejects_origin():
    """theta is singular at z = 0"""
    with pytest.raises(DomainError):
        theta(0.0, 1.0)


def test_theta_schwarz_symmetry():
    """conj(theta(conj z)) = theta(z) for real xi"""
    rng = np.random.default_rng(7)
    for z in rng.normal(size=20) + 1j * rng.normal(size=20):
        for xi in (-2.0, -0.3, 0.5, 3.0):
            assert np.conj(theta(np.conj(z), xi)) == pytest.approx(theta(z, xi), abs=1e-12)


def test_exp_factor_at_origin_of_time():
    """Zero exponent at y = t = 0"""
    assert exp_factor(2.0 * RAY, 0.0, 0.0) == pytest.approx(1.0)


def test_exp_factor_modulus():
    """|exp_factor| = exp(sqrt(3) Im(xi) (y + t/|xi|^2))"""
    xi = 1.3 * RAY
    for y, t in [(0.4, 0.0), (-1.0, 2.0), (2.0, 0.5)]:
        expected = np.exp(SQRT3 * xi.imag * (y + t / abs(xi) ** 2))
        assert abs(exp_factor(xi, y, t)) == pytest.approx(expected, rel=1e-12)


def test_exp_factor_unit_pole():
    """xi = e^{i pi/6}, y = 1, t = 0 gives exp(sqrt(3)/2) exp(-3i/2)"""
    expected = np.exp(SQRT3 / 2) * np.exp(-1.5j)
    assert exp_factor(RAY, 1.0, 0.0) == pytest.approx(expected, abs=1e-14)


def test_exp_factor_matches_theta():
    """The simplified exponent equals 2 i t theta(xi_n) with xi = y/t"""
    xi_n, y, t = 0.8 * RAY, -1.5, 3.0
    assert phase_exponent(xi_n, y, t) == pytest.approx(2j * t * theta(xi_n, y / t), abs=1e-12)


def test_base_pole_validation():
    """Off-ray poles, the origin and a zero constant are configuration errors"""
    with pytest.raises(ConfigurationError):
        BasePole(xi=1.0 + 1.0j, c=1.0)
    with pytest.raises(ConfigurationError):
        BasePole(xi=0.0, c=1.0)
    with pytest.raises(ConfigurationError):
        BasePole(xi=RAY, c=0.0)
    pole = BasePole.from_polar(2.0, 1.0 + 1.0j, PoleKind.TYPE2)
    assert pole.rho == pytest.approx(2.0)
    assert pole.kind is PoleKind.TYPE2


def test_expand_orbit_unit_pole():
    """A unit-modulus pole expands to six points on the unit circle"""
    orbit = expand_orbit([BasePole(xi=RAY, c=1.0)])
    expected = [RAY, 1j, np.exp(5j * np.pi / 6), np.exp(-5j * np.pi / 6), -1j, np.exp(-1j * np.pi / 6)]
    assert len(orbit) == 6
    for op, z in zip(orbit, expected):
        assert op.xi == pytest.approx(z, abs=1e-14)


def test_expand_orbit_constants():
    """c_{n+N} = conj(c) omega, c_{n+2N} = c omega and conjugates"""
    c = 0.3 - 1.2j
    orbit = expand_orbit([BasePole(xi=RAY, c=c)])
    w = complex(OMEGA)
    expected = [c, np.conj(c) * w, c * w, np.conj(c * w), np.conj(np.conj(c) * w), np.conj(c)]
    for op, value in zip(orbit, expected):
        assert op.c == pytest.approx(value, abs=1e-14)


def test_expand_orbit_empty():
    """No base poles, no orbit"""
    assert expand_orbit([]) == []


def test_expand_orbit_counts_and_conjugation():
    """6N entries, 3N upper, closed under conjugation"""
    poles = [BasePole.from_polar(0.7, 1.0), BasePole.from_polar(1.9, -2.0j, PoleKind.TYPE2)]
    orbit = expand_orbit(poles)
    assert len(orbit) == 12
    assert sum(op.upper for op in orbit) == 6
    points = [op.xi for op in orbit]
    for z in points:
        assert min(abs(np.conj(z) - p) for p in points) < 1e-12


def test_duplicate_poles_rejected():
    """Coinciding base poles are a configuration error"""
    with pytest.raises(ConfigurationError):
        ScatteringData.reflectionless([BasePole(xi=RAY, c=1.0), BasePole(xi=RAY, c=2.0)])


def test_phase_geometry_region_one():
    """y = -4, t = 4: kappa = 1 and the six points +-1, +-omega, +-omega^2"""
    geo = phase_geometry(-4.0, 4.0)
    assert geo.region is Region.I
    assert geo.kappa == pytest.approx(1.0)
    w = complex(OMEGA)
    expected = [1, -1, w, -w, w ** 2, -w ** 2]
    for p in expected:
        assert min(abs(p - q) for q in geo.phase_points) < 1e-14
    assert geo.interval == ((-np.inf, -1.0), (1.0, np.inf))


def test_phase_geometry_kappa():
    """y = -1, t = 4 gives kappa = sqrt(2)"""
    assert phase_geometry(-1.0, 4.0).kappa == pytest.approx(np.sqrt(2.0))


def test_phase_geometry_region_two():
    """y/t > 0 has no phase points and an empty interval"""
    geo = phase_geometry(1.0, 1.0)
    assert geo.region is Region.II
    assert geo.phase_points == ()
    assert geo.interval == ()
    with pytest.raises(DomainError):
        geo.point(0, 0)


def test_phase_points_are_stationary():
    """The rotated phase derivative vanishes at every phase point"""
    geo = phase_geometry(-3.0, 2.0)
    for n in range(3):
        for j in range(2):
            p = geo.point(n, j)
            assert abs(p) == pytest.approx(geo.kappa)
            assert abs(phase_derivative(p, geo.xi_ratio, n)) < 1e-12


def test_region_boundary_rejected():
    """y/t = 0 and t <= 0 are refused"""
    with pytest.raises(DomainGateError):
        classify_region(0.0, 1.0)
    with pytest.raises(DomainGateError):
        classify_region(-1.0, 0.0)


def test_reflection_coefficient_interpolation():
    """Grid values are reproduced and r vanishes outside the grid"""
    r = ReflectionCoefficient.from_function(lambda z: 0.5 * np.exp(-z ** 2), z_max=10.0, n_grid=2001)
    assert r(0.0) == pytest.approx(0.5)
    assert r(0.3) == pytest.approx(0.5 * np.exp(-0.09), abs=1e-4)
    assert r(12.0) == 0
    assert r.sup_abs() == pytest.approx(0.5)


def test_reflection_coefficient_bounds():
    """sup |r| >= 1 and undecayed edges are rejected"""
    with pytest.raises(ConfigurationError):
        ScatteringData(ReflectionCoefficient.from_function(lambda z: 1.2 * np.exp(-z ** 2), 10.0, 101))
    with pytest.raises(ConfigurationError):
        ScatteringData(ReflectionCoefficient.from_function(lambda z: 0.1 + 0 * z, 10.0, 101))


def test_velocities_and_time_evolution():
    """dy/dt = -1/rho^2 and time-t constants carry the exponent at y = 0"""
    pole = BasePole.from_polar(2.0, 1.0 - 1.0j)
    assert soliton_velocities([pole]) == [pytest.approx(-0.25)]
    data = ScatteringData.reflectionless([pole])
    (xi, c_t), = time_evolve(data, 3.0)
    assert c_t == pytest.approx(pole.c * exp_factor(pole.xi, 0.0, 3.0))


def test_stability_bound():
    """Identical data give zero; a shifted constant counts six times"""
    a = ScatteringData.reflectionless([BasePole.from_polar(1.0, 1.0)])
    b = ScatteringData.reflectionless([BasePole.from_polar(1.0, 1.01)])
    assert stability_bound(a, a) == 0.0
    assert stability_bound(a, b) == pytest.approx(0.06, rel=1e-12)
    with pytest.raises(ConfigurationError):
        stability_bound(a, ScatteringData.reflectionless())
