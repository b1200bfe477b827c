"""Scenario files, trajectory tables and run manifests.

A scenario file is INI-style text with the sections [scenario], [grid],
[params], [solver], [initial] and [outputs]; see README.md for the grammar.
Floats are written with repr() so that parse(emit(s)) == s exactly.
"""
from __future__ import annotations

import configparser
import json
import math
import re
import time
import warnings
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .core import (
    RHO_FLOOR,
    TOL_NORM,
    ContractError,
    DivergenceError,
    Free,
    Grid1D,
    Harmonic,
    HydroState,
    Params,
    PotentialSpec,
    SolverFailure,
    StationaryState,
    Tabulated,
    Uniform,
    integrate,
)
from . import diagnostics, hydro, stability, stationary, wavefn
from .madelung import to_wavefn

FIELD_OUTPUTS = ("density", "current")
SCALAR_OUTPUTS = ("l2_distance", "liapunov", "liapunov_rate", "energy", "norm", "sobolev_distance")
ALL_OUTPUTS = FIELD_OUTPUTS + SCALAR_OUTPUTS
CROSS_CHECK_T = 5.0
CROSS_CHECK_DT = 1e-3

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3


class ScenarioError(ContractError):
    """Invalid scenario text. Carries the 1-based line and column when known."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class GaussianAtRest:
    """rho proportional to exp(-a (x - center)^2), v = 0, normalized on the grid."""
    center: float
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ContractError("Gaussian coefficient a must be > 0")

    def build(self, grid: Grid1D) -> HydroState:
        rho = np.exp(-self.a * (grid.x - self.center) ** 2)
        return HydroState(0.0, rho / integrate(rho, grid), np.zeros(grid.n))


InitialSpec = GaussianAtRest


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: Grid1D
    params: Params
    t_end: float
    snapshot_every: float
    initial: InitialSpec
    outputs: Tuple[str, ...] = ALL_OUTPUTS
    dt: Optional[float] = None  # None: stable_dt
    rho_floor: float = RHO_FLOOR
    tol_norm: float = TOL_NORM
    boundary: str = "extrapolate-velocity"
    override_dt: bool = False

    def __post_init__(self):
        if not self.t_end > 0 or not self.snapshot_every > 0:
            raise ContractError("t_end and snapshot_every must be positive")
        unknown = [o for o in self.outputs if o not in ALL_OUTPUTS]
        if unknown:
            raise ContractError(f"unknown outputs {unknown}; choose from {list(ALL_OUTPUTS)}")
        object.__setattr__(self, "outputs", tuple(self.outputs))

    @property
    def solver(self) -> hydro.SolverConfig:
        dt = self.dt if self.dt is not None else hydro.stable_dt(self.grid, self.params)
        return hydro.SolverConfig(dt=dt, rho_floor=self.rho_floor, tol_norm=self.tol_norm,
                                  boundary=self.boundary, override_dt=self.override_dt)

    def validate(self) -> None:
        """Cross-field checks that need the resolved step."""
        cfg = self.solver
        hydro._check_config(self.grid, self.params, cfg)
        slots = self.t_end / self.snapshot_every
        if abs(self.t_end - round(slots) * self.snapshot_every) > cfg.dt * (1 + 1e-9):
            raise ContractError(
                f"snapshot_every = {self.snapshot_every!r} does not divide t_end = {self.t_end!r} "
                f"to within one step")


# Text format ---------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_scenario(s: Scenario) -> str:
    p = s.params
    pot = p.potential
    lines = ["[scenario]", f"name = {s.name}", f"t_end = {_fmt(s.t_end)}",
             f"snapshot_every = {_fmt(s.snapshot_every)}", "",
             "[grid]", f"x_min = {_fmt(s.grid.x_min)}", f"x_max = {_fmt(s.grid.x_max)}",
             f"n = {s.grid.n}", "",
             "[params]", f"hbar = {_fmt(p.hbar)}", f"m = {_fmt(p.m)}", f"k = {_fmt(p.k)}"]
    if isinstance(pot, Harmonic):
        lines += ["potential = harmonic", f"D = {_fmt(pot.D)}"]
    elif isinstance(pot, Uniform):
        lines += ["potential = uniform", f"g = {_fmt(pot.g)}"]
    elif isinstance(pot, Tabulated):
        lines += ["potential = tabulated", "values = " + " ".join(repr(u) for u in pot.values)]
    else:
        lines += ["potential = free"]
    lines += ["", "[solver]", f"dt = {'auto' if s.dt is None else _fmt(s.dt)}",
              f"rho_floor = {_fmt(s.rho_floor)}", f"tol_norm = {_fmt(s.tol_norm)}",
              f"boundary = {s.boundary}", f"override_dt = {_fmt(s.override_dt)}", "",
              "[initial]", "variant = gaussian-at-rest", f"center = {_fmt(s.initial.center)}",
              f"a = {_fmt(s.initial.a)}", "",
              "[outputs]", "quantities = " + " ".join(s.outputs), ""]
    return "\n".join(lines)


_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^(\s*)([^=:#;\s][^=:]*?)\s*[=:]\s*")


def _locate(text: str) -> Dict[Tuple[str, str], Tuple[int, int]]:
    """(section, key) -> (line, column of the value), both 1-based."""
    where = {}
    section = None
    for i, line in enumerate(text.splitlines(), 1):
        m = _SECTION.match(line)
        if m:
            section = m.group(1).strip()
            where[(section, "")] = (i, 1)
            continue
        m = _KEY.match(line)
        if m and section is not None:
            where[(section, m.group(2).strip().lower())] = (i, m.end() + 1)
    return where


class _Reader:
    def __init__(self, text: str):
        self.where = _locate(text)
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            cp.read_string(text)
        except configparser.DuplicateOptionError as e:
            raise ScenarioError(f"duplicate key {e.option!r} in [{e.section}]", e.lineno, 1) from None
        except configparser.DuplicateSectionError as e:
            raise ScenarioError(f"duplicate section [{e.section}]", e.lineno, 1) from None
        except configparser.MissingSectionHeaderError as e:
            raise ScenarioError("text before the first [section] header", e.lineno, 1) from None
        except configparser.ParsingError as e:
            lineno, _ = e.errors[0]
            raise ScenarioError("malformed line (expected key = value)", lineno, 1) from None
        self.cp = cp
        self.used = set()

    def pos(self, section, key=""):
        return self.where.get((section, key), self.where.get((section, ""), (None, None)))

    def raw(self, section, key, default=None):
        if not self.cp.has_section(section):
            if default is not None:
                return default
            raise ScenarioError(f"missing section [{section}]")
        self.used.add((section, key))
        if not self.cp.has_option(section, key):
            if default is not None:
                return default
            raise ScenarioError(f"missing key {key!r} in [{section}]", *self.pos(section))
        return self.cp.get(section, key).strip()

    def num(self, section, key, default=None, kind=float):
        s = self.raw(section, key, None if default is None else str(default))
        try:
            v = kind(s)
        except ValueError:
            raise ScenarioError(f"{key} = {s!r} is not a valid {kind.__name__}",
                                *self.pos(section, key)) from None
        if kind is float and not math.isfinite(v):
            raise ScenarioError(f"{key} must be finite", *self.pos(section, key))
        return v

    def flag(self, section, key, default):
        s = self.raw(section, key, "true" if default else "false").lower()
        if s not in ("true", "false"):
            raise ScenarioError(f"{key} must be true or false", *self.pos(section, key))
        return s == "true"

    def unused(self):
        for section in self.cp.sections():
            for key in self.cp.options(section):
                if (section, key) not in self.used:
                    raise ScenarioError(f"unknown key {key!r} in [{section}]", *self.pos(section, key))


def _potential(r: _Reader) -> PotentialSpec:
    kind = r.raw("params", "potential").lower()
    if kind == "harmonic":
        return Harmonic(r.num("params", "d"))
    if kind == "uniform":
        return Uniform(r.num("params", "g"))
    if kind == "free":
        return Free()
    if kind == "tabulated":
        vals = r.raw("params", "values").split()
        try:
            return Tabulated(tuple(float(v) for v in vals))
        except ValueError:
            raise ScenarioError("tabulated values must be numbers", *r.pos("params", "values")) from None
    raise ScenarioError(f"unknown potential {kind!r} (harmonic, uniform, free, tabulated)",
                        *r.pos("params", "potential"))


def parse_scenario(text: str) -> Scenario:
    r = _Reader(text)
    try:
        dt_raw = r.raw("solver", "dt", "auto")
        dt = None if dt_raw.lower() == "auto" else r.num("solver", "dt")
        variant = r.raw("initial", "variant", "gaussian-at-rest")
        if variant != "gaussian-at-rest":
            raise ScenarioError(f"unknown initial variant {variant!r}", *r.pos("initial", "variant"))
        s = Scenario(
            name=r.raw("scenario", "name"),
            grid=Grid1D(r.num("grid", "x_min"), r.num("grid", "x_max"), r.num("grid", "n", kind=int)),
            params=Params(hbar=r.num("params", "hbar", 1.0), m=r.num("params", "m", 1.0),
                          k=r.num("params", "k", 0.0), potential=_potential(r)),
            t_end=r.num("scenario", "t_end"),
            snapshot_every=r.num("scenario", "snapshot_every"),
            initial=GaussianAtRest(r.num("initial", "center"), r.num("initial", "a")),
            outputs=tuple(r.raw("outputs", "quantities", " ".join(ALL_OUTPUTS)).split()),
            dt=dt,
            rho_floor=r.num("solver", "rho_floor", RHO_FLOOR),
            tol_norm=r.num("solver", "tol_norm", TOL_NORM),
            boundary=r.raw("solver", "boundary", "extrapolate-velocity"),
            override_dt=r.flag("solver", "override_dt", False),
        )
        r.unused()
        hydro.SolverConfig(dt=1.0 if dt is None else dt, boundary=s.boundary)
    except ScenarioError:
        raise
    except ContractError as e:
        raise ScenarioError(str(e)) from None
    return s


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e.strerror}") from None
    return parse_scenario(text)


def bundled_scenarios() -> List[str]:
    root = resources.files("qhydro") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def bundled_path(name: str) -> Path:
    p = Path(str(resources.files("qhydro") / "scenarios" / f"{name}.ini"))
    if not p.exists():
        raise ScenarioError(f"no bundled scenario {name!r}; have {bundled_scenarios()}")
    return p


def resolve_path(arg: str) -> Path:
    """A file path, or the name of a bundled scenario."""
    p = Path(arg)
    if p.exists() or p.suffix:
        return p
    return bundled_path(arg)


# Running -------------------------------------------------------------------

def reference_state(s: Scenario) -> StationaryState:
    """Ground state of the scenario potential (analytic for the oscillator)."""
    if isinstance(s.params.potential, Harmonic):
        return stationary.oscillator_eigenstate(0, s.grid, s.params)
    U = s.params.potential.evaluate(s.grid)
    return stationary.solve_stationary(s.params.potential, float(U.min()), s.grid, s.params)


def scalar_series(traj, s: Scenario, ref: StationaryState) -> Dict[str, np.ndarray]:
    g, p = s.grid, s.params
    fns = {
        "l2_distance": lambda h: diagnostics.l2_distance(h.rho, ref.rho_s, g),
        "liapunov": lambda h: stability.liapunov(h, ref, g, p),
        "liapunov_rate": lambda h: stability.liapunov_rate(h, g, p),
        "energy": lambda h: diagnostics.energy_expectation(h, g, p),
        "norm": lambda h: diagnostics.norm(h, g),
        "sobolev_distance": lambda h: diagnostics.sobolev_distance(h, ref, g),
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", stability.DecayWarning)
        return {name: np.array([f(h) for h in traj]) for name, f in fns.items()}


def cross_check(s: Scenario, traj) -> np.ndarray:
    """Rows (t, max |rho_hydro - |psi|^2|) for hydro snapshots with t <= 5."""
    t_stop = min(s.t_end, CROSS_CHECK_T)
    times = [h.t for h in traj if h.t <= t_stop + 1e-9]
    h0 = traj[0]
    w0 = to_wavefn(h0, s.grid, s.params)
    dt = min(CROSS_CHECK_DT, wavefn.max_dt(w0, s.grid, s.params))
    cadence = times[1] - times[0] if len(times) > 1 else t_stop
    waves = wavefn.sl_run(w0, s.grid, s.params, dt, times[-1] if len(times) > 1 else t_stop, cadence)
    rows = []
    for h, w in zip(traj, waves):
        rows.append((h.t, float(np.abs(h.rho - w.rho).max()), w.t))
    return np.array(rows)


@dataclass
class RunResult:
    scenario: Scenario
    trajectory: hydro.Trajectory
    reference: StationaryState
    scalars: Dict[str, np.ndarray]
    files: List[Path] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)


def _write_table(path: Path, header: str, t: np.ndarray, cols: np.ndarray):
    data = np.column_stack([t, cols])
    np.savetxt(path, data, fmt="%.17g", delimiter=" ", header=header, comments="# ",
               encoding="utf-8")


def apply_overrides(s: Scenario, dt: Optional[float] = None, grid_n: Optional[int] = None) -> Scenario:
    if grid_n is not None:
        s = replace(s, grid=Grid1D(s.grid.x_min, s.grid.x_max, grid_n))
    if dt is not None:
        s = replace(s, dt=float(dt))
    return s


def run_scenario(s: Scenario, out_dir=None, do_cross_check: bool = False,
                 overrides: Optional[dict] = None) -> RunResult:
    """Run the hydrodynamic solver for `s` and, if out_dir is given, write the tables
    and manifest.json there. Raises ContractError/ScenarioError on bad config and
    DivergenceError/SolverFailure on numerical failure."""
    s.validate()
    cfg = s.solver
    caught: List[str] = []
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        ref = reference_state(s)
        traj = hydro.run(s.initial.build(s.grid), s.grid, s.params, cfg, s.t_end, s.snapshot_every)
        scalars = scalar_series(traj, s, ref)
        xc = cross_check(s, traj) if do_cross_check else None
    caught += [str(w.message) for w in wlist]
    if traj.clamp_events:
        caught.append(f"negative density clamped in {traj.clamp_events} step(s)")
    wall = time.perf_counter() - t0
    res = RunResult(s, traj, ref, scalars)
    res.manifest = {
        "scenario": s.name,
        "config": emit_scenario(s),
        "overrides": overrides or {},
        "dt": cfg.dt,
        "steps": traj.steps,
        "snapshots": len(traj),
        "wall_time_s": wall,
        "reference_energy": ref.E_s,
        "initial_interpretation": f"rho ~ exp(-a (x - center)^2) with a = {s.initial.a!r} "
                                  "(exponential coefficient, not a variance)",
        "warnings": caught,
    }
    if xc is not None:
        res.manifest["cross_check"] = {"t": xc[:, 0].tolist(), "max_abs_density_diff": xc[:, 1].tolist()}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        t = traj.times
        _write_table(out / "grid.dat", "x", np.arange(s.grid.n), s.grid.x)
        res.files.append(out / "grid.dat")
        for name in s.outputs:
            path = out / f"{name}.dat"
            if name == "density":
                _write_table(path, f"t density[0..{s.grid.n - 1}]", t, np.array([h.rho for h in traj]))
            elif name == "current":
                _write_table(path, f"t current[0..{s.grid.n - 1}]", t,
                             np.array([diagnostics.probability_current(h) for h in traj]))
            else:
                _write_table(path, f"t {name}", t, scalars[name])
            res.files.append(path)
        if xc is not None:
            _write_table(out / "cross_check.dat", "t max_abs_density_diff", xc[:, 0], xc[:, 1])
            res.files.append(out / "cross_check.dat")
        (out / "manifest.json").write_text(json.dumps(res.manifest, indent=2) + "\n", encoding="utf-8")
    return res


def failure_message(e: Exception) -> str:
    t = getattr(e, "t", None)
    return f"{e}" if t is None or f"{t:.6g}" in str(e) else f"{e} (t = {t:.6g})"


__all__ = [
    "ALL_OUTPUTS", "EXIT_OK", "EXIT_CONFIG", "EXIT_DIVERGENCE", "GaussianAtRest", "InitialSpec",
    "RunResult", "Scenario", "ScenarioError", "apply_overrides", "bundled_path",
    "bundled_scenarios", "emit_scenario", "load_scenario", "parse_scenario", "reference_state",
    "resolve_path", "run_scenario", "DivergenceError", "SolverFailure",
]
