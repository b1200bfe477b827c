# %% [markdown]
# # Marginal stability of the ground state
#
# At a stationary state the second variation of L is a quadratic form in
# (drho, dv). Its pointwise minors tell us it is positive semidefinite, and
# a velocity-only perturbation shows the zero direction is genuine.

# %%
import numpy as np

from qhydro import (
    Grid1D,
    Harmonic,
    HydroState,
    Params,
    dissipation_check,
    liapunov,
    marginality_witness,
    oscillator_eigenstate,
    second_variation_form,
    second_variation_minors,
)
from qhydro.core import integrate
from qhydro.hydro import LinearInV

grid = Grid1D(-20.0, 20.0, 801)
params = Params(k=1.0, potential=Harmonic(0.02))
ground = oscillator_eigenstate(0, grid, params)
h = ground.as_hydro()
print(f"E_s = {ground.E_s:.12f}  (omega / 2 = {np.sqrt(0.02) / 2:.12f})")

# %%
m = second_variation_minors(h, grid)
inner = slice(1, -1)
print("min delta1:", m.delta1[inner].min())
print("min delta2:", m.delta2[inner].min())
print("max |delta3|:", np.abs(m.delta3[inner]).max())

# %% [markdown]
# Random mass-preserving perturbations: the Rayleigh quotient stays >= 0.

# %%
rng = np.random.default_rng(1)
x = grid.x
quotients = []
for _ in range(100):
    c = rng.normal(size=(2, 5))
    drho = ground.rho_s * sum(c[0, j] * np.sin((j + 1) * np.pi * (x + 20) / 40) for j in range(5))
    drho -= integrate(drho, grid) * ground.rho_s
    dv = sum(c[1, j] * np.cos((j + 1) * np.pi * x / 40) for j in range(5))
    q = second_variation_form(h, grid, (drho, dv), (drho, dv))
    quotients.append(q / integrate(drho**2 + dv**2, grid))
print(f"Rayleigh quotient over 100 samples: min {min(quotients):.3e}, max {max(quotients):.3e}")

w = marginality_witness(h, grid, rng=rng)
print(f"marginal direction: quotient {w.ratio:.2e} from {w.samples} samples")

# %% [markdown]
# Linear friction dissipates, and L reads off the energy of simple displacements.

# %%
moving = HydroState(0.0, ground.rho_s, 0.2 * np.sin(x))
print(dissipation_check(moving, grid, LinearInV(1.0)))

for d in (0.5, 1.0, 2.0):
    rho = np.exp(-np.sqrt(0.02) * (x - d) ** 2)
    shifted = HydroState(0.0, rho / integrate(rho, grid), np.zeros(grid.n))
    print(f"shift {d}: L = {liapunov(shifted, ground, grid, params):.6f}  (0.01 d^2 = {0.01 * d * d:.6f})")
