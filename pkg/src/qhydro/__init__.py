"""One-dimensional quantum hydrodynamics with linear friction.

Madelung fields (rho, v), the damped hydrodynamic solver and a wavefunction
oracle, stationary states, and the Liapunov stability toolkit.
"""
from .core import (
    RHO_FLOOR,
    TOL_NORM,
    BoundaryDecayError,
    ContractError,
    DegenerateStateError,
    DivergenceError,
    Free,
    Grid1D,
    Harmonic,
    HydroState,
    NotFoundError,
    Params,
    SolverFailure,
    StationaryState,
    Tabulated,
    Uniform,
    WaveState,
    derivative,
    integrate,
    second_derivative,
)
from .madelung import PressureVariant, quantum_potential, quantum_pressure, to_hydro, to_wavefn
from .hydro import DampingSpec, LinearInV, SolverConfig, Trajectory, run, stable_dt, step
from .wavefn import sl_run, sl_step
from .stationary import NodeWarning, oscillator_eigenstate, solve_stationary
from .stability import (
    SecondVariationMinors,
    dissipation_check,
    liapunov,
    liapunov_rate,
    liapunov_wavefn,
    marginality_witness,
    second_variation_form,
    second_variation_minors,
)
from .diagnostics import energy_expectation, l2_distance, probability_current, sobolev_distance
from .scenario import (
    GaussianAtRest,
    Scenario,
    ScenarioError,
    emit_scenario,
    load_scenario,
    parse_scenario,
    run_scenario,
)

__version__ = "0.1.0"
