"""Observables along trajectories: distances to a stationary state, current, energy."""
from __future__ import annotations

import math

import numpy as np

from .core import ContractError, Grid1D, HydroState, Params, StationaryState, derivative, integrate
from .stability import energy_density


def _pair(a, b, grid: Grid1D):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (grid.n,) or b.shape != (grid.n,):
        raise ContractError(f"fields must have {grid.n} nodes, got {a.shape} and {b.shape}")
    return a, b


def l2_distance(rho, rho_ref, grid: Grid1D) -> float:
    rho, rho_ref = _pair(rho, rho_ref, grid)
    return math.sqrt(integrate((rho - rho_ref) ** 2, grid))


def sobolev_distance(h: HydroState, s: StationaryState, grid: Grid1D) -> float:
    """sqrt(int (rho - rho_s)^2 + v^2 + ((rho - rho_s)')^2 dx)."""
    rho, rho_s = _pair(h.rho, s.rho_s, grid)
    d = rho - rho_s
    return math.sqrt(integrate(d * d + h.v * h.v + derivative(d, grid) ** 2, grid))


def probability_current(h: HydroState) -> np.ndarray:
    return h.rho * h.v


def energy_expectation(h: HydroState, grid: Grid1D, params: Params) -> float:
    """<H> in hydrodynamic form; equals liapunov(h, s) + E_s for normalized h."""
    return integrate(energy_density(h, grid, params), grid)


def norm(h: HydroState, grid: Grid1D) -> float:
    return integrate(h.rho, grid)
