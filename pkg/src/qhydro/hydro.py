"""Time integration of the 1D dissipative Madelung equations.

    d rho/dt = -d(rho v)/dx
    m dv/dt  = -d/dx [m v^2/2 + U_q(rho) + U] + F_d(v)

The integrator is a staggered (kick-drift-kick) leapfrog:

    damping half step (exact for linear friction)
    v  <- v - dt/2 * G(rho, v)                 half kick
    rho <- rho - dt * d(rho_mid v)/dx          drift, rho_mid from a half-step predictor
    v  <- v - dt/2 * G(rho_new, v_extrap)      half kick, v_extrap = 2 v_half - v_old
    damping half step

so that the conservative part is second order and the fixed points v = 0,
U_q + U = const are preserved up to the truncation error of U_q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional

import numpy as np

from . import _kernels as _k
from .core import (
    RHO_FLOOR,
    TOL_NORM,
    ContractError,
    DivergenceError,
    Grid1D,
    HydroState,
    Params,
    SolverFailure,
    integrate,
)

DT_SAFETY = 0.1


class DampingSpec:
    """A velocity-dependent force F_d(v), evaluated per node.

    Subclasses implement `force`. `apply` advances m dv/dt = F_d(v) by dt on
    its own; the default is an explicit midpoint step.
    """

    def force(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, v: np.ndarray, dt: float, m: float) -> np.ndarray:
        v_mid = v + 0.5 * dt * self.force(v) / m
        return v + dt * self.force(v_mid) / m


@dataclass(frozen=True)
class LinearInV(DampingSpec):
    """Newtonian friction F_d = -k v."""
    k: float

    def __post_init__(self):
        if self.k < 0:
            raise ContractError("damping rate must be >= 0")

    def force(self, v):
        return -self.k * np.asarray(v)

    def apply(self, v, dt, m):
        if self.k == 0:
            return v
        return v * math.exp(-self.k * dt / m)


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    rho_floor: float = RHO_FLOOR
    tol_norm: float = TOL_NORM
    boundary: str = "extrapolate-velocity"
    damping: Optional[DampingSpec] = None
    override_dt: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ContractError("dt must be positive")
        if self.boundary != "extrapolate-velocity":
            raise ContractError(f"unknown boundary rule {self.boundary!r}")

    def damping_for(self, params: Params) -> DampingSpec:
        return self.damping if self.damping is not None else LinearInV(params.k)


def stable_dt(grid: Grid1D, params: Params) -> float:
    """Advisory step bound.

    0.1 dx^2 m/hbar for the dispersive quantum-potential term, combined
    harmonically with the friction rate k/m: 1 / (hbar/(0.1 m dx^2) + k/m).
    """
    base = DT_SAFETY * grid.dx**2 * params.m / params.hbar
    return 1.0 / (1.0 / base + params.k / params.m)


@lru_cache(maxsize=32)
def _potential_on(grid: Grid1D, potential) -> np.ndarray:
    U = potential.evaluate(grid)
    U.setflags(write=False)
    return U


class _Integrator:
    """Array-level stepper.

    Nodes with rho below the floor are vacuum. Their velocity is not evolved
    but extrapolated from the fluid, the same rule used at the two ends of the
    grid, and their density follows the log-form continuity equation
    d(ln rho)/dt = -v d(ln rho)/dx - dv/dx, which stays well conditioned in
    exponentially decaying tails. Fluid nodes use the conservative flux form.
    """

    def __init__(self, grid: Grid1D, params: Params, cfg: SolverConfig):
        self.h = grid.dx
        self.grid = grid
        self.m = params.m
        self.qcoef = -(params.hbar**2) / (2 * params.m)
        self.U = np.ascontiguousarray(_potential_on(grid, params.potential))
        self.cfg = cfg
        self.damping = cfg.damping_for(params)
        self.floor = cfg.rho_floor

    def potential_gradient(self, rho):
        """d/dx (U_q + U) / m, with U_q linearly extrapolated to the two end nodes."""
        out = np.empty_like(rho)
        _k.potential_gradient(rho, self.U, self.h, self.qcoef, self.m, out)
        return out

    def _kick(self, v, gq, v_adv, dt, rho):
        out = np.empty_like(v)
        if not _k.kick(v, gq, v_adv, 0.5 * dt, self.h, rho, self.floor, out):
            raise SolverFailure("fewer than two nodes above the density floor")
        return out

    def advance(self, rho, v, dt, gq=None):
        """One step. Returns (rho, v, gradient of U_q+U at the new density, clamped)."""
        if gq is None:
            gq = self.potential_gradient(rho)
        v0 = self.damping.apply(v, 0.5 * dt, self.m)
        v_half = self._kick(v0, gq, v0, dt, rho)
        rho_new = np.empty_like(rho)
        clamped = _k.drift(rho, v_half, dt, self.h, self.floor, rho_new)
        if clamped:
            rho_new = np.where(rho_new < 0, self.floor, rho_new)
            mass = integrate(rho_new, self.grid)
            if abs(mass - 1.0) > self.cfg.tol_norm:
                rho_new = rho_new / mass
        gq_new = self.potential_gradient(rho_new)
        v_new = self._kick(v_half, gq_new, 2 * v_half - v0, dt, rho_new)
        v_new = self.damping.apply(v_new, 0.5 * dt, self.m)
        return rho_new, v_new, gq_new, bool(clamped)


def _check_finite(rho, v, t):
    if not (np.isfinite(rho).all() and np.isfinite(v).all()):
        bad = np.flatnonzero(~(np.isfinite(rho) & np.isfinite(v)))[0]
        raise DivergenceError(f"non-finite field at node {bad}, t = {t:.6g}", node=int(bad), t=t)


def _check_config(grid: Grid1D, params: Params, cfg: SolverConfig):
    if not cfg.override_dt and cfg.dt > stable_dt(grid, params) * (1 + 1e-12):
        raise ContractError(
            f"dt = {cfg.dt:g} exceeds the stable bound {stable_dt(grid, params):g}; "
            "set override_dt=True to force it")


def step(h: HydroState, grid: Grid1D, params: Params, cfg: SolverConfig) -> HydroState:
    h.check_grid(grid)
    if np.any(h.rho < 0):
        raise ContractError("density must be non-negative")
    _check_config(grid, params, cfg)
    stepper = _Integrator(grid, params, cfg)
    rho, v, _, _ = stepper.advance(np.array(h.rho), np.array(h.v), cfg.dt)
    t = h.t + cfg.dt
    _check_finite(rho, v, t)
    return HydroState(t, rho, v)


@dataclass
class Trajectory:
    snapshots: List[HydroState] = field(default_factory=list)
    steps: int = 0
    clamp_events: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]

    def __iter__(self):
        return iter(self.snapshots)


def snapshot_steps(dt: float, t_end: float, snapshot_every: float) -> List[int]:
    """Step indices at which snapshots are recorded (nearest step to each cadence time)."""
    def nearest(x):
        # round half up, so the last cadence time and t_end land on the same step
        return int(math.floor(x + 0.5))

    n_total = nearest(t_end / dt)
    marks = []
    j = 0
    while True:
        target = j * snapshot_every
        if target > t_end + 1e-9 * max(1.0, t_end):
            break
        marks.append(min(nearest(target / dt), n_total))
        j += 1
    if marks[-1] != n_total:
        marks.append(n_total)
    return sorted(set(marks))


def run(initial: HydroState, grid: Grid1D, params: Params, cfg: SolverConfig,
        t_end: float, snapshot_every: float) -> Trajectory:
    if not t_end > 0 or not snapshot_every > 0:
        raise ContractError("t_end and snapshot_every must be positive")
    initial.check_grid(grid)
    _check_config(grid, params, cfg)
    dt = cfg.dt
    marks = snapshot_steps(dt, t_end, snapshot_every)
    stepper = _Integrator(grid, params, cfg)
    rho, v = np.array(initial.rho, dtype=float), np.array(initial.v, dtype=float)
    traj = Trajectory()
    gq = None
    done = 0
    t0 = initial.t
    for mark in marks:
        while done < mark:
            try:
                rho, v, gq, clamped = stepper.advance(rho, v, dt, gq)
            except SolverFailure as e:
                t = t0 + (done + 1) * dt
                raise DivergenceError(f"{e} at t = {t:.6g}", t=t) from e
            done += 1
            traj.clamp_events += clamped
            if not math.isfinite(rho.sum() + v.sum()):
                _check_finite(rho, v, t0 + done * dt)
        traj.snapshots.append(HydroState(t0 + done * dt, rho, v))
    traj.steps = done
    return traj
