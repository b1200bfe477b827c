# %% [markdown]
# # Hydrodynamic solver against the wave-function solver
#
# Both solvers start from the same packet. The split-step Fourier solution is
# spectrally accurate in space, so the density difference at t = 5 mostly
# measures the finite-difference error of the hydrodynamic scheme.

# %%
import time

import numpy as np

from qhydro import Grid1D, Harmonic, HydroState, Params, sl_run, to_wavefn
from qhydro import hydro
from qhydro.core import integrate


def difference(k, n, refine):
    g = Grid1D(-30.0, 30.0, n)
    p = Params(k=k, potential=Harmonic(0.02))
    rho = np.exp(-0.05 * (g.x + 2.0) ** 2)
    h0 = HydroState(0.0, rho / integrate(rho, g), np.zeros(n))
    dt = hydro.stable_dt(Grid1D(-30.0, 30.0, 1201), p) / refine
    h = hydro.run(h0, g, p, hydro.SolverConfig(dt=dt, override_dt=True), 5.0, 5.0)[-1]
    w = sl_run(to_wavefn(h0, g, p), g, p, 1e-3 / refine, 5.0, 5.0)[-1]
    return np.abs(h.rho - w.rho).max()


# %%
for k in (0.0, 1.0):
    t0 = time.perf_counter()
    coarse = difference(k, 1201, 1)
    fine = difference(k, 2401, 2)
    print(f"k = {k}: {coarse:.3e} -> {fine:.3e}, ratio {coarse / fine:.5f} "
          f"({time.perf_counter() - t0:.1f} s)")

# %% [markdown]
# The ratio sits just under 4. Both solvers are second order and the
# next term of the error expansion has the opposite sign, so a strict
# "at least 4x" reading is missed by a few parts in 1e5.
