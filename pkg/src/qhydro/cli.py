"""Command line: run, list-scenarios, validate.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import (
    BoundaryDecayError,
    ContractError,
    DegenerateStateError,
    DivergenceError,
    NotFoundError,
    SolverFailure,
)

# a grid too narrow for the state is a configuration problem
CONFIG_ERRORS = (ContractError, NotFoundError, BoundaryDecayError, DegenerateStateError)
from .scenario import (
    EXIT_CONFIG,
    EXIT_DIVERGENCE,
    EXIT_OK,
    apply_overrides,
    bundled_path,
    bundled_scenarios,
    failure_message,
    load_scenario,
    resolve_path,
    run_scenario,
)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhydro", description="Damped quantum hydrodynamics in 1D.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file (or bundled scenario name)")
    r.add_argument("scenario")
    r.add_argument("--out", default=None, help="output directory (default: ./<name>-out)")
    r.add_argument("--cross-check", action="store_true",
                   help="also integrate the wave equation up to t = 5 and compare densities")
    r.add_argument("--dt", type=float, default=None, help="time step, overrides the file")
    r.add_argument("--grid-n", type=int, default=None, help="node count, overrides the file")
    sub.add_parser("list-scenarios", help="list bundled scenarios")
    v = sub.add_parser("validate", help="parse and check a scenario file")
    v.add_argument("scenario")
    return ap


def _cmd_run(args) -> int:
    try:
        s = load_scenario(resolve_path(args.scenario))
        overrides = {k: val for k, val in (("dt", args.dt), ("grid_n", args.grid_n)) if val is not None}
        s = apply_overrides(s, **overrides)
        out = Path(args.out) if args.out else Path(f"{s.name}-out")
        res = run_scenario(s, out, do_cross_check=args.cross_check, overrides=overrides)
    except CONFIG_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, SolverFailure) as e:
        print(f"divergence: {failure_message(e)}", file=sys.stderr)
        return EXIT_DIVERGENCE
    m = res.manifest
    print(f"{s.name}: {m['steps']} steps, {m['snapshots']} snapshots, "
          f"{m['wall_time_s']:.1f} s -> {out}")
    for w in m["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        s = load_scenario(resolve_path(args.scenario))
        s.validate()
    except CONFIG_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{s.name}: ok (dt = {s.solver.dt:g}, {s.grid.n} nodes)")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-scenarios":
        for name in bundled_scenarios():
            print(f"{name}\t{bundled_path(name)}")
        return EXIT_OK
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
