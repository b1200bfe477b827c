"""Grids, fields, physical parameters and the shared finite-difference primitives."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

RHO_FLOOR = 1e-12
TOL_NORM = 1e-6
# positivity guard for logs and divisions; far below any physically meaningful density
GUARD_FLOOR = 1e-300


class ContractError(ValueError):
    """Raised when an operation is called with arguments violating its preconditions."""


class DegenerateStateError(ValueError):
    pass


class BoundaryDecayError(ValueError):
    """The density does not decay to (numerical) zero at the edges of the grid."""


class NotFoundError(LookupError):
    pass


class SolverFailure(RuntimeError):
    pass


class DivergenceError(RuntimeError):
    """A field became NaN/Inf. Carries the first offending node and the time."""

    def __init__(self, message: str, node: int | None = None, t: float | None = None):
        super().__init__(message)
        self.node = node
        self.t = t


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ContractError(f"x_min ({self.x_min}) must be < x_max ({self.x_max})")
        if int(self.n) != self.n or self.n < 8:
            raise ContractError(f"node count must be an integer >= 8, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.dx

    def refined(self) -> "Grid1D":
        """Same extent with the spacing halved."""
        return Grid1D(self.x_min, self.x_max, 2 * self.n - 1)


# Potentials ---------------------------------------------------------------

@dataclass(frozen=True)
class Harmonic:
    D: float

    def __post_init__(self):
        if not self.D > 0:
            raise ContractError("harmonic stiffness D must be > 0")

    def evaluate(self, grid: Grid1D) -> np.ndarray:
        return 0.5 * self.D * grid.x**2


@dataclass(frozen=True)
class Uniform:
    """Constant force g, i.e. U = -g x."""
    g: float

    def evaluate(self, grid: Grid1D) -> np.ndarray:
        return -self.g * grid.x


@dataclass(frozen=True)
class Free:
    def evaluate(self, grid: Grid1D) -> np.ndarray:
        return np.zeros(grid.n)


@dataclass(frozen=True)
class Tabulated:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(u) for u in self.values))

    def evaluate(self, grid: Grid1D) -> np.ndarray:
        if len(self.values) != grid.n:
            raise ContractError(
                f"tabulated potential has {len(self.values)} values, grid has {grid.n} nodes")
        return np.asarray(self.values, dtype=float)


PotentialSpec = Union[Harmonic, Uniform, Free, Tabulated]


@dataclass(frozen=True)
class Params:
    hbar: float = 1.0
    m: float = 1.0
    k: float = 0.0
    potential: PotentialSpec = field(default_factory=Free)

    def __post_init__(self):
        if not self.hbar > 0 or not self.m > 0:
            raise ContractError("hbar and m must be positive")
        if not self.k >= 0:
            raise ContractError("damping rate k must be >= 0")

    @property
    def omega(self) -> float:
        """Oscillator angular frequency sqrt(D/m); only defined for harmonic potentials."""
        if not isinstance(self.potential, Harmonic):
            raise ContractError("omega is only defined for a harmonic potential")
        return float(np.sqrt(self.potential.D / self.m))


# States -------------------------------------------------------------------

def _frozen_array(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HydroState:
    t: float
    rho: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", _frozen_array(self.rho))
        object.__setattr__(self, "v", _frozen_array(self.v))
        if self.rho.shape != self.v.shape or self.rho.ndim != 1:
            raise ContractError("rho and v must be 1D arrays of equal length")

    def check_grid(self, grid: Grid1D) -> None:
        if self.rho.size != grid.n:
            raise ContractError(f"state has {self.rho.size} nodes, grid has {grid.n}")


@dataclass(frozen=True, eq=False)
class WaveState:
    t: float
    psi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "psi", _frozen_array(self.psi, complex))
        if self.psi.ndim != 1:
            raise ContractError("psi must be a 1D array")

    @property
    def rho(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def check_grid(self, grid: Grid1D) -> None:
        if self.psi.size != grid.n:
            raise ContractError(f"state has {self.psi.size} nodes, grid has {grid.n}")


@dataclass(frozen=True, eq=False)
class StationaryState:
    rho_s: np.ndarray
    E_s: float
    has_nodes: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rho_s", _frozen_array(self.rho_s))

    def as_hydro(self, t: float = 0.0) -> HydroState:
        return HydroState(t, self.rho_s, np.zeros_like(self.rho_s))


# Finite differences and quadrature -----------------------------------------

def _check(f, grid: Grid1D) -> np.ndarray:
    f = np.asarray(f)
    if f.ndim != 1 or f.size != grid.n:
        raise ContractError(f"field has shape {f.shape}, grid has {grid.n} nodes")
    return f


def derivative(f, grid: Grid1D) -> np.ndarray:
    """First derivative: central differences inside, second-order one-sided at both ends."""
    f = _check(f, grid)
    h = grid.dx
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    d[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    return d


def second_derivative(f, grid: Grid1D) -> np.ndarray:
    """Three-point second derivative inside, second-order four-point one-sided stencils at the ends."""
    f = _check(f, grid)
    h2 = grid.dx**2
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h2
    d[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h2
    d[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h2
    return d


def integrate(f, grid: Grid1D) -> float:
    f = _check(f, grid)
    return float(grid.dx * (f.sum() - 0.5 * (f[0] + f[-1])))


def cumulative_integral(f, grid: Grid1D) -> np.ndarray:
    """Running trapezoidal integral from x_min, starting at 0."""
    f = _check(f, grid)
    out = np.zeros(f.shape, dtype=np.result_type(f, float))
    out[1:] = np.cumsum(0.5 * grid.dx * (f[1:] + f[:-1]))
    return out


def edge_slice(grid: Grid1D, fraction: float = 0.02) -> int:
    """Number of nodes making up the outermost `fraction` of the grid on each side (at least 2)."""
    return max(2, int(round(fraction * grid.n)))
