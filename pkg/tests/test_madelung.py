import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhydro import (
    ContractError,
    DegenerateStateError,
    Grid1D,
    HydroState,
    Params,
    PressureVariant,
    WaveState,
    quantum_potential,
    quantum_pressure,
    to_hydro,
    to_wavefn,
)
from qhydro.core import derivative, integrate

P = Params()


def gaussian(g, sigma2=1.0, x0=0.0):
    rho = np.exp(-((g.x - x0) ** 2) / (2 * sigma2))
    return rho / integrate(rho, g)


def test_real_gaussian_has_zero_velocity():
    g = Grid1D(-10, 10, 401)
    psi = np.sqrt(gaussian(g))
    h = to_hydro(WaveState(0.0, psi), g, P)
    assert np.all(h.v == 0)
    assert np.allclose(h.rho, psi**2)


def test_plane_wave_velocity():
    g = Grid1D(-10, 10, 401)
    psi = np.sqrt(gaussian(g, 4.0)) * np.exp(0.5j * g.x)
    h = to_hydro(WaveState(0.0, psi), g, P)
    reliable = h.rho > 1e-12
    assert np.allclose(h.v[reliable], 0.5, atol=1e-6)


def test_all_zero_wavefunction_is_degenerate():
    g = Grid1D(-1, 1, 11)
    with pytest.raises(DegenerateStateError):
        to_hydro(WaveState(0.0, np.zeros(11)), g, P)


def test_to_wavefn_phase_conventions():
    g = Grid1D(-5, 5, 401)
    rho = gaussian(g)
    assert np.all(to_wavefn(HydroState(0, rho, np.zeros(g.n)), g, P).psi.imag == 0)
    w = to_wavefn(HydroState(0, rho, np.full(g.n, 0.3)), g, P)
    assert np.allclose(np.unwrap(np.angle(w.psi)), 0.3 * (g.x - g.x[0]), atol=1e-8)
    with pytest.raises(ContractError):
        to_wavefn(HydroState(0, rho - 1.0, np.zeros(g.n)), g, P)


def test_round_trip_sinusoidal_velocity():
    # Known to fail: central difference of the trapezoid phase returns
    # (v[i-1] + 2 v[i] + v[i+1]) / 4 = v + dx^2 v''/4, i.e. 1.6e-5 here.
    g = Grid1D(-5, 5, 401)
    h = HydroState(0.0, gaussian(g), 0.1 * np.sin(g.x))
    back = to_hydro(to_wavefn(h, g, P), g, P)
    assert np.abs(back.rho - h.rho).max() < 1e-8
    err = float(np.abs(back.v - h.v).max())
    assert err < 1e-6


def test_round_trip_velocity_is_the_three_point_average():
    g = Grid1D(-5, 5, 401)
    v = 0.1 * np.sin(g.x)
    back = to_hydro(to_wavefn(HydroState(0.0, gaussian(g), v), g, P), g, P)
    avg = 0.25 * (v[:-2] + 2 * v[1:-1] + v[2:])
    assert np.abs(back.v[1:-1] - avg).max() < 1e-12


def test_round_trip_smooth_state_within_1e8():
    # linear velocity: trapezoid integration and central differences are both exact
    g = Grid1D(-6, 6, 601)
    h = HydroState(0.0, gaussian(g, 2.0) + 1e-3, 0.2 * g.x - 0.1)
    back = to_hydro(to_wavefn(h, g, P), g, P)
    assert np.abs(back.v - h.v).max() < 1e-8
    assert np.abs(back.rho - h.rho).max() < 1e-8


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * np.pi))
def test_global_phase_does_not_change_fields(alpha):
    g = Grid1D(-8, 8, 321)
    psi = np.sqrt(gaussian(g, 2.0)) * np.exp(0.4j * g.x + 0.05j * g.x**2)
    a = to_hydro(WaveState(0, psi), g, P)
    b = to_hydro(WaveState(0, psi * np.exp(1j * alpha)), g, P)
    assert np.allclose(a.v, b.v, atol=1e-10)
    assert np.allclose(a.rho, b.rho, rtol=1e-13, atol=0)


def test_normalization_preserved_by_to_hydro():
    g = Grid1D(-8, 8, 321)
    psi = np.sqrt(gaussian(g)) * np.exp(1j * g.x)
    w = WaveState(0, psi)
    assert integrate(to_hydro(w, g, P).rho, g) == integrate(np.abs(psi) ** 2, g)


def test_quantum_potential_uniform_density_vanishes():
    g = Grid1D(0, 1, 50)
    assert np.allclose(quantum_potential(np.full(50, 0.7), g, P), 0, atol=1e-12)


def test_quantum_potential_of_unit_gaussian():
    g = Grid1D(-10, 10, 801)
    Uq = quantum_potential(gaussian(g), g, P)
    assert abs(Uq[400] - 0.25) < 1e-4
    assert np.allclose(Uq, 0.25 - g.x**2 / 8, atol=1e-8)


def test_quantum_potential_balances_oscillator(ground, grid, osc):
    total = quantum_potential(ground.rho_s, grid, osc) + 0.01 * grid.x**2
    assert np.ptp(total) < 1e-4
    assert total.mean() == pytest.approx(np.sqrt(0.02) / 2, abs=1e-4)


@pytest.mark.parametrize("variant", list(PressureVariant))
def test_pressure_of_uniform_density_vanishes(variant):
    g = Grid1D(0, 1, 50)
    assert np.allclose(quantum_pressure(np.full(50, 0.3), g, P, variant), 0, atol=1e-12)


def test_p2_field_of_unit_gaussian():
    # (hbar^2/4m) (ln rho)'' = -1/4 for unit variance, i.e. -P2/rho
    g = Grid1D(-10, 10, 801)
    rho = gaussian(g)
    P2 = quantum_pressure(rho, g, P, PressureVariant.P2)
    inner = slice(40, -40)
    assert np.allclose((-P2 / rho)[inner], -0.25, atol=1e-4)


@pytest.mark.parametrize("variant", list(PressureVariant))
def test_pressure_gradient_identity(variant, ground, grid, osc):
    Pq = quantum_pressure(ground.rho_s, grid, osc, variant)
    rhs = ground.rho_s * derivative(quantum_potential(ground.rho_s, grid, osc), grid)
    assert np.abs(derivative(Pq, grid) - rhs).max() < 1e-3


@pytest.mark.parametrize("variant", list(PressureVariant))
def test_pressure_identity_converges_second_order(variant):
    errs = []
    for n in (201, 401, 801):
        g = Grid1D(-6, 6, n)
        rho = gaussian(g, 1.0, 0.3) + 0.5 * gaussian(g, 0.5, -1.0)
        Pq = quantum_pressure(rho, g, P, variant)
        res = derivative(Pq, g) - rho * derivative(quantum_potential(rho, g, P), g)
        errs.append(np.abs(res[5:-5]).max())
    assert errs[0] / errs[1] > 3.0 and errs[1] / errs[2] > 3.0
