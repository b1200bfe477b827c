"""Split-step Fourier integration of the damped (Schrödinger-Langevin) wave equation

    i hbar psi_t = -(hbar^2/2m) psi'' + U psi + hbar k S psi,    S = arg psi

The friction term acts as an extra real potential hbar k S, so every substep
is unitary. S is the unwrapped phase, recomputed before each potential half
step. The grid is treated as one period of a periodic domain for the kinetic
step, which requires psi to be negligible near both ends.

Within a potential substep the phase obeys S_t = -U/hbar - k S. With
phase_flow="exact" (default) that linear flow is applied exactly, so the
Strang step stays second order for k > 0. phase_flow="frozen" multiplies by
exp(-i (U + hbar k S) tau / hbar) with S held fixed over the substep, which is
first order in time when k > 0.
"""
from __future__ import annotations

import math
from typing import List

import numpy as np
from scipy import fft

from .core import (
    RHO_FLOOR,
    BoundaryDecayError,
    ContractError,
    DivergenceError,
    Grid1D,
    Params,
    WaveState,
    edge_slice,
)
from .hydro import snapshot_steps
from .madelung import unwrapped_phase

EDGE_TOL = 1e-6
PHASE_STEP_MAX = 0.5
PHASE_FLOWS = ("exact", "frozen")


def damping_potential(psi: np.ndarray, params: Params, rho_floor: float = RHO_FLOOR) -> np.ndarray:
    """hbar k S, with S held at its nearest reliable value where |psi|^2 < rho_floor."""
    if params.k == 0:
        return np.zeros(psi.size)
    return params.hbar * params.k * unwrapped_phase(psi, rho_floor)


def max_dt(w: WaveState, grid: Grid1D, params: Params, rho_floor: float = RHO_FLOOR) -> float:
    """Largest step keeping the potential phase increment below 0.5 rad."""
    V = params.potential.evaluate(grid) + damping_potential(w.psi, params, rho_floor)
    vmax = float(np.abs(V).max())
    return math.inf if vmax == 0 else PHASE_STEP_MAX * params.hbar / vmax


class _Propagator:
    def __init__(self, grid: Grid1D, params: Params, dt: float, rho_floor: float,
                 phase_flow: str = "exact"):
        if phase_flow not in PHASE_FLOWS:
            raise ContractError(f"phase_flow must be one of {PHASE_FLOWS}")
        self.phase_flow = phase_flow
        self.grid = grid
        self.params = params
        self.dt = dt
        self.rho_floor = rho_floor
        self.U = params.potential.evaluate(grid)
        kx = 2 * np.pi * fft.fftfreq(grid.n, d=grid.dx)
        self.kinetic = np.exp(-1j * params.hbar * kx**2 * dt / (2 * params.m))
        self.edge = edge_slice(grid)

    def check_edges(self, psi, t):
        e = self.edge
        a = max(np.abs(psi[:e]).max(), np.abs(psi[-e:]).max())
        if a >= EDGE_TOL:
            raise BoundaryDecayError(
                f"|psi| = {a:.3g} near the grid ends at t = {t:.6g}; the periodic kinetic step "
                f"needs |psi| < {EDGE_TOL:g} on the outermost {self.edge} nodes")

    def half_kick(self, psi):
        V = self.U + damping_potential(psi, self.params, self.rho_floor)
        vmax = np.abs(V).max()
        if self.dt * vmax > PHASE_STEP_MAX * self.params.hbar * (1 + 1e-12):
            raise ContractError(
                f"dt = {self.dt:g} exceeds the phase-increment bound "
                f"{PHASE_STEP_MAX * self.params.hbar / vmax:g}")
        tau = 0.5 * self.dt
        k = self.params.k
        if self.phase_flow == "exact" and k > 0:
            # phase lost over tau by the exact solution of S_t = -V/hbar with V = U + hbar k S
            tau = -math.expm1(-k * tau) / k
        return psi * np.exp(-1j * tau * V / self.params.hbar)

    def advance(self, psi):
        psi = self.half_kick(psi)
        psi = fft.ifft(self.kinetic * fft.fft(psi))
        return self.half_kick(psi)


def _check_finite(psi, t):
    ok = np.isfinite(psi)
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0])
        raise DivergenceError(f"non-finite wavefunction at node {bad}, t = {t:.6g}", node=bad, t=t)


def sl_step(w: WaveState, grid: Grid1D, params: Params, dt: float,
            rho_floor: float = RHO_FLOOR, phase_flow: str = "exact") -> WaveState:
    w.check_grid(grid)
    if not dt > 0:
        raise ContractError("dt must be positive")
    prop = _Propagator(grid, params, dt, rho_floor, phase_flow)
    prop.check_edges(w.psi, w.t)
    psi = prop.advance(np.array(w.psi))
    _check_finite(psi, w.t + dt)
    return WaveState(w.t + dt, psi)


def sl_run(initial: WaveState, grid: Grid1D, params: Params, dt: float, t_end: float,
           snapshot_every: float, rho_floor: float = RHO_FLOOR,
           phase_flow: str = "exact") -> List[WaveState]:
    initial.check_grid(grid)
    if not dt > 0 or not t_end > 0 or not snapshot_every > 0:
        raise ContractError("dt, t_end and snapshot_every must be positive")
    prop = _Propagator(grid, params, dt, rho_floor, phase_flow)
    psi = np.array(initial.psi, dtype=complex)
    t0 = initial.t
    out = []
    done = 0
    for mark in snapshot_steps(dt, t_end, snapshot_every):
        while done < mark:
            t = t0 + done * dt
            prop.check_edges(psi, t)
            psi = prop.advance(psi)
            done += 1
            if not math.isfinite(psi.real.sum() + psi.imag.sum()):
                _check_finite(psi, t0 + done * dt)
        out.append(WaveState(t0 + done * dt, psi))
    return out
