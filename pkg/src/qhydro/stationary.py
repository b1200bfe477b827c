"""Stationary states: rho_s with v_s = 0 and U_q(rho_s) + U = E_s.

The stationarity condition is the linear eigenproblem
-(hbar^2/2m) R'' + U R = E R for R = sqrt(rho_s), solved here directly.
"""
from __future__ import annotations

import math
import warnings
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal

from .core import (
    BoundaryDecayError,
    ContractError,
    Grid1D,
    Harmonic,
    NotFoundError,
    Params,
    PotentialSpec,
    SolverFailure,
    StationaryState,
    Tabulated,
    edge_slice,
    integrate,
)

EDGE_RHO_MAX = 1e-10


class NodeWarning(UserWarning):
    """The state has interior zeros of the density, where the velocity is undefined."""


def _edge_density(rho, grid: Grid1D) -> float:
    e = edge_slice(grid)
    return float(max(rho[:e].max(), rho[-e:].max()))


def oscillator_eigenstate(n: int, grid: Grid1D, params: Params) -> StationaryState:
    """n-th harmonic oscillator eigenstate, rho_s = |phi_n|^2, E_s = hbar omega (n + 1/2)."""
    if int(n) != n or n < 0:
        raise ContractError("n must be a non-negative integer")
    if not isinstance(params.potential, Harmonic):
        raise ContractError("oscillator_eigenstate needs a Harmonic potential")
    n = int(n)
    omega = params.omega
    scale = math.sqrt(params.m * omega / params.hbar)
    xi = scale * grid.x
    # normalized Hermite functions by the stable three-term recurrence
    prev = np.zeros_like(xi)
    phi = (scale**2 / math.pi) ** 0.25 * np.exp(-0.5 * xi**2)
    for j in range(n):
        phi, prev = math.sqrt(2.0 / (j + 1)) * xi * phi - math.sqrt(j / (j + 1)) * prev, phi
    rho = phi**2
    rho /= integrate(rho, grid)
    edge = _edge_density(rho, grid)
    if edge >= EDGE_RHO_MAX:
        raise BoundaryDecayError(
            f"rho_s = {edge:.3g} near the grid ends; widen the grid (need < {EDGE_RHO_MAX:g})")
    if n > 0:
        warnings.warn(f"eigenstate n={n} has {n} density node(s)", NodeWarning, stacklevel=2)
    return StationaryState(rho, params.hbar * omega * (n + 0.5), has_nodes=n > 0)


def _tridiagonal(U: np.ndarray, h: float, params: Params):
    c = params.hbar**2 / (2 * params.m * h * h)
    return 2 * c + U, np.full(U.size - 1, -c)


def _eigenvalue(grid: Grid1D, potential: PotentialSpec, params: Params, index: int) -> float:
    d, e = _tridiagonal(potential.evaluate(grid), grid.dx, params)
    return float(eigh_tridiagonal(d, e, eigvals_only=True, select="i",
                                  select_range=(index, index))[0])


def solve_stationary(potential: PotentialSpec, E_guess: float, grid: Grid1D, params: Params,
                     window: Optional[float] = None) -> StationaryState:
    """Eigenstate of the discretized operator whose eigenvalue is nearest E_guess.

    The operator is the three-point Laplacian plus the diagonal potential with
    R = 0 just outside the grid. rho_s is the eigenvector on `grid`. The
    reported E_s is Richardson-extrapolated from `grid` and its refinement,
    removing the O(dx^2) bias of the three-point stencil.

    `window`, if given, bounds |E_s - E_guess|.
    """
    U = potential.evaluate(grid)
    if U.size != grid.n or not np.all(np.isfinite(U)):
        raise ContractError("potential must be finite on every grid node")
    d, e = _tridiagonal(U, grid.dx, params)
    evals = eigh_tridiagonal(d, e, eigvals_only=True)
    index = int(np.argmin(np.abs(evals - E_guess)))
    E_h = float(evals[index])
    if window is not None and abs(E_h - E_guess) > window:
        raise NotFoundError(f"no eigenvalue within {window:g} of {E_guess:g} (nearest {E_h:g})")
    _, vec = eigh_tridiagonal(d, e, select="i", select_range=(index, index))
    R = vec[:, 0]
    if index == 0:
        # ground state is single-signed; fix the sign and reject anything else
        R = R if R.sum() >= 0 else -R
        if R.min() < -1e-12 * R.max():
            raise SolverFailure("ground-state eigenvector changes sign")
        R = np.maximum(R, 0.0)
    rho = R * R
    rho /= integrate(rho, grid)
    edge = _edge_density(rho, grid)
    if edge >= EDGE_RHO_MAX:
        raise NotFoundError(
            f"eigenstate near E = {E_h:g} does not decay at the grid ends "
            f"(rho = {edge:.3g}); no normalizable stationary state found")
    E_fine = _eigenvalue(grid.refined(), _refined_potential(potential, grid), params, index)
    E_s = (4 * E_fine - E_h) / 3
    if index > 0:
        warnings.warn(f"stationary state #{index} has density nodes", NodeWarning, stacklevel=2)
    return StationaryState(rho, E_s, has_nodes=index > 0)


def _refined_potential(potential: PotentialSpec, grid: Grid1D) -> PotentialSpec:
    """The same potential on grid.refined(); tabulated values go through a cubic spline."""
    if isinstance(potential, Tabulated):
        spline = CubicSpline(grid.x, potential.evaluate(grid))
        return Tabulated(tuple(spline(grid.refined().x)))
    return potential
