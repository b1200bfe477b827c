"""Liapunov functional, dissipation inequality and second-variation analysis
around stationary states of the damped Madelung equations.

    L[rho, v] = int rho (m v^2/2 + U - E_s) + (hbar^2/2m) ((sqrt rho)')^2 dx

is minimal (zero) at a stationary state and decreases along trajectories at
the rate int rho v F_d(v) dx.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .core import (
    GUARD_FLOOR,
    RHO_FLOOR,
    ContractError,
    Grid1D,
    HydroState,
    Params,
    StationaryState,
    WaveState,
    derivative,
    edge_slice,
    integrate,
)
from .hydro import DampingSpec, LinearInV
from .madelung import to_hydro

EDGE_RHO_MAX = 1e-10
DISSIPATION_RTOL = 1e-12


class DecayWarning(UserWarning):
    """Density not negligible at the grid ends; dropped surface terms may matter."""


def _warn_edges(rho, grid: Grid1D):
    e = edge_slice(grid)
    edge = max(rho[:e].max(), rho[-e:].max())
    if edge >= EDGE_RHO_MAX:
        warnings.warn(f"density {edge:.3g} near the grid ends; surface terms are neglected",
                      DecayWarning, stacklevel=3)


def _sqrt_rho_gradient_sq(rho, grid: Grid1D) -> np.ndarray:
    return derivative(np.sqrt(np.maximum(rho, 0.0)), grid) ** 2


def energy_density(h: HydroState, grid: Grid1D, params: Params) -> np.ndarray:
    """rho (m v^2/2 + U) + (hbar^2/2m) ((sqrt rho)')^2, the gradient term in sqrt(rho) form."""
    h.check_grid(grid)
    U = params.potential.evaluate(grid)
    return (h.rho * (0.5 * params.m * h.v * h.v + U)
            + params.hbar**2 / (2 * params.m) * _sqrt_rho_gradient_sq(h.rho, grid))


def liapunov(h: HydroState, s: StationaryState, grid: Grid1D, params: Params) -> float:
    h.check_grid(grid)
    if s.rho_s.size != h.rho.size:
        raise ContractError("state and stationary state live on different grids")
    if np.any(h.rho < 0):
        raise ContractError("density must be non-negative")
    _warn_edges(h.rho, grid)
    return integrate(energy_density(h, grid, params) - s.E_s * h.rho, grid)


def liapunov_wavefn(w: WaveState, s: StationaryState, grid: Grid1D, params: Params) -> float:
    """L evaluated on the hydrodynamic fields of psi."""
    return liapunov(to_hydro(w, grid, params), s, grid, params)


def _damping(params: Optional[Params], damping: Optional[DampingSpec]) -> DampingSpec:
    if damping is not None:
        return damping
    if params is None:
        raise ContractError("give either params or a damping spec")
    return LinearInV(params.k)


def liapunov_rate(h: HydroState, grid: Grid1D, params: Params,
                  damping: Optional[DampingSpec] = None) -> float:
    """dL/dt = int rho v F_d(v) dx (defaults to the linear friction of params)."""
    h.check_grid(grid)
    f = _damping(params, damping).force(h.v)
    return integrate(h.rho * h.v * f, grid)


class DissipationResult(NamedTuple):
    value: float
    passed: bool
    degenerate: bool


def dissipation_check(h: HydroState, grid: Grid1D, damping: DampingSpec) -> DissipationResult:
    """Checks int rho v F_d <= 0.

    `degenerate` flags equality while the current rho v is not identically
    zero, i.e. the strict form of the inequality fails.
    """
    h.check_grid(grid)
    power = h.rho * h.v * damping.force(h.v)
    value = integrate(power, grid)
    tol = DISSIPATION_RTOL * integrate(np.abs(power), grid)
    moving = float(np.abs(h.rho * h.v).max()) > RHO_FLOOR
    return DissipationResult(value, value <= tol, moving and abs(value) <= tol)


@dataclass(frozen=True, eq=False)
class SecondVariationMinors:
    delta1: np.ndarray
    delta2: np.ndarray
    delta3: np.ndarray
    reliable: np.ndarray  # nodes with rho above the density floor


def _log_gradient(rho, grid: Grid1D) -> np.ndarray:
    return derivative(np.log(np.maximum(rho, GUARD_FLOOR)), grid)


def second_variation_minors(h: HydroState, grid: Grid1D,
                            rho_floor: float = RHO_FLOOR) -> SecondVariationMinors:
    """Leading principal minors of the second-variation kernel, per node.

    rho'/rho is taken as (ln rho)'; values at nodes below `rho_floor` are
    returned but marked unreliable.
    """
    h.check_grid(grid)
    rho, v = h.rho, h.v
    ell = _log_gradient(rho, grid)
    return SecondVariationMinors(
        delta1=rho.copy(),
        delta2=0.25 * ell**2 - v**2,
        delta3=-v**2 / (4 * np.maximum(rho, GUARD_FLOOR)),
        reliable=rho >= rho_floor,
    )


Perturbation = Tuple[np.ndarray, np.ndarray]  # (delta rho, delta v)


def _check_perturbation(p: Perturbation, grid: Grid1D, rtol: float = 1e-8):
    drho, dv = (np.asarray(a, dtype=float) for a in p)
    if drho.shape != (grid.n,) or dv.shape != (grid.n,):
        raise ContractError("perturbation fields must live on the grid")
    mass = integrate(drho, grid)
    if abs(mass) > rtol * max(integrate(np.abs(drho), grid), 1e-300):
        raise ContractError(f"density perturbation changes the mass by {mass:.3g}")
    return drho, dv


def second_variation_form(h: HydroState, grid: Grid1D, pert_a: Perturbation,
                          pert_b: Perturbation) -> float:
    """Bilinear second variation of L between two mass-preserving perturbations.

    Kernel on (dv, drho, drho'):
        [[rho, v,               0           ],
         [v,   rho'^2/(4rho^3), -rho'/(4rho^2)],
         [0,   -rho'/(4rho^2),  1/(4rho)     ]]
    """
    h.check_grid(grid)
    ra, va = _check_perturbation(pert_a, grid)
    rb, vb = _check_perturbation(pert_b, grid)
    rho, v = h.rho, h.v
    inv4 = 0.25 / np.maximum(rho, GUARD_FLOOR)
    ell = _log_gradient(rho, grid)
    dra, drb = derivative(ra, grid), derivative(rb, grid)
    dens = (rho * va * vb
            + v * (va * rb + ra * vb)
            + inv4 * ell**2 * ra * rb
            - inv4 * ell * (ra * drb + dra * rb)
            + inv4 * dra * drb)
    return integrate(dens, grid)


class MarginalityWitness(NamedTuple):
    ratio: float             # form(p, p) / ||p||^2
    perturbation: Perturbation
    samples: int


def marginality_witness(h: HydroState, grid: Grid1D, samples: int = 200,
                        rng: Optional[np.random.Generator] = None) -> MarginalityWitness:
    """Search for a nearly flat direction of the second variation.

    Samples velocity bumps of random centre and width (the density is left
    unperturbed) and returns the one with the smallest form / ||p||^2, with
    ||p||^2 = int (drho^2 + dv^2) dx.
    """
    rng = np.random.default_rng() if rng is None else rng
    x = grid.x
    zero = np.zeros(grid.n)
    best = None
    for _ in range(samples):
        c = rng.uniform(x[0], x[-1])
        w = rng.uniform(2, 20) * grid.dx
        dv = np.exp(-0.5 * ((x - c) / w) ** 2)
        p = (zero, dv)
        ratio = second_variation_form(h, grid, p, p) / integrate(dv * dv, grid)
        if best is None or ratio < best[0]:
            best = (ratio, p)
    return MarginalityWitness(best[0], best[1], samples)
