import warnings

import numpy as np
import pytest

from qhydro import (
    BoundaryDecayError,
    ContractError,
    Free,
    Grid1D,
    Harmonic,
    NodeWarning,
    NotFoundError,
    Params,
    Tabulated,
    Uniform,
    oscillator_eigenstate,
    quantum_potential,
    solve_stationary,
)
from qhydro.core import integrate
from qhydro import hydro

OMEGA = np.sqrt(0.02)


def test_ground_state_energy_and_width(ground, grid):
    assert abs(ground.E_s - OMEGA / 2) < 1e-10
    assert integrate(grid.x**2 * ground.rho_s, grid) == pytest.approx(1 / (2 * OMEGA), rel=1e-8)
    assert integrate(ground.rho_s, grid) == pytest.approx(1.0, abs=1e-12)
    assert not ground.has_nodes


def test_ground_state_residual(ground, grid, osc):
    res = quantum_potential(ground.rho_s, grid, osc) + 0.01 * grid.x**2 - ground.E_s
    assert np.abs(res).max() < 1e-3


def test_first_excited_state_has_node_at_origin(grid, osc):
    with pytest.warns(NodeWarning):
        s = oscillator_eigenstate(1, grid, osc)
    assert s.rho_s[400] == 0.0
    assert s.E_s == pytest.approx(1.5 * OMEGA)
    assert s.has_nodes


def test_excited_states_match_eigensolver(grid, osc):
    for n in (1, 2, 3):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NodeWarning)
            exact = oscillator_eigenstate(n, grid, osc)
            num = solve_stationary(Harmonic(0.02), exact.E_s, grid, osc)
        assert num.E_s == pytest.approx(exact.E_s, rel=1e-6)
        assert np.abs(num.rho_s - exact.rho_s).max() < 1e-4


def test_narrow_grid_fails_decay_check(osc):
    with pytest.raises(BoundaryDecayError):
        oscillator_eigenstate(0, Grid1D(-5, 5, 201), osc)


def test_needs_harmonic_potential(grid):
    with pytest.raises(ContractError):
        oscillator_eigenstate(0, grid, Params())
    with pytest.raises(ContractError):
        oscillator_eigenstate(-1, grid, Params(potential=Harmonic(1.0)))


def test_eigensolver_matches_analytic_ground_state(ground, grid, osc):
    s = solve_stationary(Harmonic(0.02), 0.05, grid, osc)
    assert abs(s.E_s / ground.E_s - 1) < 1e-6
    assert integrate(s.rho_s, grid) == pytest.approx(1.0, abs=1e-9)
    assert np.all(s.rho_s >= 0)


def test_eigensolver_residual_on_occupied_nodes(grid, osc):
    s = solve_stationary(Harmonic(0.02), 0.05, grid, osc)
    occupied = s.rho_s > 1e-6
    res = quantum_potential(s.rho_s, grid, osc) + 0.01 * grid.x**2 - s.E_s
    assert np.abs(res[occupied]).max() < 1e-3


def test_constant_shift_moves_energy_only(grid, osc):
    U = Harmonic(0.02).evaluate(grid)
    a = solve_stationary(Tabulated(tuple(U)), 0.05, grid, osc)
    b = solve_stationary(Tabulated(tuple(U + 1.25)), 1.30, grid, osc)
    assert b.E_s - a.E_s == pytest.approx(1.25, abs=1e-9)
    assert np.abs(a.rho_s - b.rho_s).max() < 1e-12


def test_free_particle_has_no_bound_state(grid):
    with pytest.raises(NotFoundError):
        solve_stationary(Free(), 0.01, grid, Params())


def test_uniform_field_has_no_bound_state(grid):
    with pytest.raises(NotFoundError):
        solve_stationary(Uniform(0.1), 0.0, grid, Params())


def test_search_window(grid, osc):
    with pytest.raises(NotFoundError):
        solve_stationary(Harmonic(0.02), 10.0, grid, osc, window=0.5)


@pytest.mark.parametrize("k", [0.0, 0.1, 1.0])
def test_stationary_state_is_a_fixed_point(k, grid):
    p = Params(k=k, potential=Harmonic(0.02))
    s = solve_stationary(Harmonic(0.02), 0.05, grid, p)
    cfg = hydro.SolverConfig(dt=hydro.stable_dt(grid, p))
    h = s.as_hydro()
    for _ in range(50):
        h = hydro.step(h, grid, p, cfg)
    assert np.abs(h.rho - s.rho_s).max() < 1e-10
