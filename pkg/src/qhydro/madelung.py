"""Wavefunction <-> hydrodynamic fields, the quantum potential and quantum pressure.

In one dimension the velocity field is always a gradient, so the zero-vorticity
condition holds identically and is not checked.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .core import (
    RHO_FLOOR,
    ContractError,
    DegenerateStateError,
    Grid1D,
    HydroState,
    Params,
    WaveState,
    cumulative_integral,
    GUARD_FLOOR,
    derivative,
    second_derivative,
)


class PressureVariant(Enum):
    P1 = "P1"
    P2 = "P2"


def unwrapped_phase(psi: np.ndarray, rho_floor: float = RHO_FLOOR) -> np.ndarray:
    """Continuous phase of psi along the grid.

    Nodes with |psi|^2 below `rho_floor` carry no usable phase; they copy the
    unwrapped phase of the nearest reliable node.
    """
    psi = np.asarray(psi, dtype=complex)
    ok = np.abs(psi) ** 2 >= rho_floor
    if not ok.any():
        raise DegenerateStateError("wavefunction vanishes (below the density floor) everywhere")
    if ok.all():
        return np.unwrap(np.angle(psi))
    idx = np.flatnonzero(ok)
    unwrapped = np.unwrap(np.angle(psi[idx]))
    pos = np.arange(psi.size)
    j = np.searchsorted(idx, pos)
    right = np.clip(j, 0, idx.size - 1)
    left = np.clip(j - 1, 0, idx.size - 1)
    pick = np.where(np.abs(pos - idx[left]) <= np.abs(idx[right] - pos), left, right)
    return unwrapped[pick]


def to_hydro(w: WaveState, grid: Grid1D, params: Params, rho_floor: float = RHO_FLOOR) -> HydroState:
    w.check_grid(grid)
    psi = w.psi
    rho = np.abs(psi) ** 2
    if not np.any(rho > 0):
        raise DegenerateStateError("all-zero wavefunction")
    S = unwrapped_phase(psi, rho_floor)
    v = (params.hbar / params.m) * derivative(S, grid)
    v = np.where(rho < rho_floor, 0.0, v)
    return HydroState(w.t, rho, v)


def to_wavefn(h: HydroState, grid: Grid1D, params: Params) -> WaveState:
    h.check_grid(grid)
    if np.any(h.rho < 0):
        raise ContractError("density must be non-negative")
    S = (params.m / params.hbar) * cumulative_integral(h.v, grid)
    return WaveState(h.t, np.sqrt(h.rho) * np.exp(1j * S))


def quantum_potential(rho, grid: Grid1D, params: Params, rho_floor: float = GUARD_FLOOR) -> np.ndarray:
    """U_q = -(hbar^2 / 2m) R''/R with R = sqrt(rho).

    R''/R is evaluated as (ln rho)''/2 + ((ln rho)')^2/4, which involves no
    division by small R and is exact on the grid for Gaussian densities.
    rho is clamped below by `rho_floor` before the logarithm.
    """
    L = np.log(np.maximum(np.asarray(rho, dtype=float), rho_floor))
    d1 = derivative(L, grid)
    return -(params.hbar**2 / (2 * params.m)) * (0.5 * second_derivative(L, grid) + 0.25 * d1 * d1)


def quantum_pressure(rho, grid: Grid1D, params: Params,
                     variant: PressureVariant = PressureVariant.P2,
                     rho_floor: float = GUARD_FLOOR) -> np.ndarray:
    """Scalar quantum pressure whose gradient equals rho * dU_q/dx.

    P1 = -(hbar^2/4m) (rho'' - rho'^2/rho) and P2 = -(hbar^2/4m) rho (ln rho)''.
    The two agree analytically in 1D; they are discretised differently.
    """
    variant = PressureVariant(variant)
    rho = np.maximum(np.asarray(rho, dtype=float), rho_floor)
    c = params.hbar**2 / (4 * params.m)
    if variant is PressureVariant.P1:
        d1 = derivative(rho, grid)
        return -c * (second_derivative(rho, grid) - d1**2 / rho)
    return -c * rho * second_derivative(np.log(rho), grid)
