"""
Tests for the periodic pseudospectral integrator
"""
import numpy as np
import pytest

from ovsolve.core.errors import CFLViolationError, ConfigurationError
from ovsolve.core.oracle import FieldState, SpectralOperator, compare, evolve, grid, state_from_samples
from ovsolve.core.soliton import ParametricProfile


L = 2 * np.pi


def wave(amplitude: float, k: int, modes: int = 64) -> FieldState:
    x = grid(L, modes)
    return FieldState(u=amplitude * np.cos(k * x), t=0.0, L=L)


def test_linear_dispersion():
    """A small cos(k x) moves with omega = 3 / k"""
    state = wave(1e-6, 4)
    rhs = SpectralOperator(L, 64)(state.u)
    assert np.allclose(rhs, 3e-6 / 4 * np.sin(4 * state.x), atol=1e-10)

    final = evolve(state, T=1.0, dt=0.01)[-1]
    assert final.t == pytest.approx(1.0)
    assert np.allclose(final.u, 1e-6 * np.cos(4 * final.x - 0.75), atol=1e-10)


def test_fourth_order_in_time():
    """Halving dt cuts the error by about 2^4"""
    x = grid(L, 32)
    state = FieldState(u=0.1 * np.sin(x), t=0.0, L=L)
    reference = evolve(state, T=2.0, dt=0.0125)[-1].u
    errors = [np.max(np.abs(evolve(state, T=2.0, dt=dt)[-1].u - reference)) for dt in (0.2, 0.1)]
    assert errors[0] / errors[1] > 12.0


def test_mean_preserved():
    x = grid(L, 64)
    state = FieldState(u=0.2 * np.sin(x) + 0.1 * np.cos(3 * x), t=0.0, L=L)
    for snap in evolve(state, T=1.0, dt=0.01, snap_every=25):
        assert abs(snap.mean) < 1e-14


def test_snapshots():
    """snap_every keeps the initial state, every n-th step and the final state"""
    snaps = evolve(wave(0.1, 1), T=1.0, dt=0.1, snap_every=5)
    assert [s.t for s in snaps] == pytest.approx([0.0, 0.5, 1.0])
    assert evolve(wave(0.1, 1), T=0.0, dt=0.1)[0].t == 0.0


def test_cfl_violation():
    with pytest.raises(CFLViolationError):
        evolve(wave(0.1, 1), T=1.0, dt=1.0)


def test_nonzero_mean_rejected():
    state = FieldState(u=0.1 + np.sin(grid(L, 64)), t=0.0, L=L)
    with pytest.raises(ConfigurationError):
        evolve(state, T=1.0, dt=0.01)


def test_bad_parameters():
    with pytest.raises(ConfigurationError):
        evolve(wave(0.1, 1), T=-1.0, dt=0.01)
    with pytest.raises(ConfigurationError):
        SpectralOperator(L, 4)


def test_state_from_samples_removes_mean():
    state = state_from_samples([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0], L=10.0, modes=64)
    assert state.modes == 64
    assert abs(state.mean) < 1e-15


def test_compare():
    """An exact copy has zero error; a looped profile is refused"""
    state = wave(0.1, 1)
    x = state.x
    exact = ParametricProfile(y=x, x=x, u=state.u.copy(), t=0.0, monotone_x=True)
    linf, l2 = compare(exact, state)
    assert linf == pytest.approx(0.0, abs=1e-15)
    assert l2 == pytest.approx(0.0, abs=1e-15)

    folded = ParametricProfile(y=x, x=x[::-1], u=state.u, t=0.0, monotone_x=False)
    with pytest.raises(ConfigurationError):
        compare(folded, state)


def test_compare_window():
    """Only grid points inside the window count"""
    state = wave(0.1, 1)
    x = state.x
    exact = ParametricProfile(y=x, x=x, u=np.zeros_like(x), t=0.0, monotone_x=True)
    linf, _ = compare(exact, state, window=(-0.5, 0.5))
    assert linf == pytest.approx(0.1, rel=1e-2)
    assert compare(exact, state, window=(100.0, 101.0)) == (0.0, 0.0)
