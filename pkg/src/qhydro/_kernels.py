"""Compiled inner loops of the hydrodynamic stepper (numba, nopython)."""
import numpy as np
from numba import njit

TINY = 1e-300
FIT_NODES = 16


@njit(cache=True)
def ddx(f, h, out):
    n = f.size
    inv = 0.5 / h
    for i in range(1, n - 1):
        out[i] = (f[i + 1] - f[i - 1]) * inv
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv


@njit(cache=True)
def potential_gradient(rho, U, h, qcoef, m, out):
    """out = d/dx (U_q + U) / m; U_q from the three-point R''/R, extrapolated at the ends."""
    n = rho.size
    R = np.empty(n)
    for i in range(n):
        R[i] = np.sqrt(max(rho[i], TINY))
    Q = np.empty(n)
    c = qcoef / (h * h)
    for i in range(1, n - 1):
        Q[i] = c * (R[i + 1] - 2.0 * R[i] + R[i - 1]) / R[i]
    Q[0] = 2.0 * Q[1] - Q[2]
    Q[n - 1] = 2.0 * Q[n - 2] - Q[n - 3]
    for i in range(n):
        Q[i] += U[i]
    ddx(Q, h, out)
    for i in range(n):
        out[i] /= m


@njit(cache=True)
def _line(f, idx, start, stop):
    # least-squares line through (idx[j], f[idx[j]]) for j in [start, stop)
    w = stop - start
    sx = 0.0
    sy = 0.0
    for j in range(start, stop):
        sx += idx[j]
        sy += f[idx[j]]
    xm = sx / w
    ym = sy / w
    sxx = 0.0
    sxy = 0.0
    for j in range(start, stop):
        dx = idx[j] - xm
        sxx += dx * dx
        sxy += dx * (f[idx[j]] - ym)
    slope = sxy / sxx
    return ym - slope * xm, slope


@njit(cache=True)
def fill_linear(f, good):
    """Overwrite nodes where good is False. Returns False if fewer than two good nodes."""
    n = f.size
    idx = np.empty(n, np.int64)
    c = 0
    for i in range(n):
        if good[i]:
            idx[c] = i
            c += 1
    if c == n:
        return True
    if c < 2:
        return False
    for j in range(c - 1):
        a = idx[j]
        b = idx[j + 1]
        if b > a + 1:
            for i in range(a + 1, b):
                f[i] = f[a] + (f[b] - f[a]) * (i - a) / (b - a)
    w = min(FIT_NODES, c)
    if idx[0] > 0:
        c0, s = _line(f, idx, 0, w)
        for i in range(idx[0]):
            f[i] = c0 + s * i
    if idx[c - 1] < n - 1:
        c0, s = _line(f, idx, c - w, c)
        for i in range(idx[c - 1] + 1, n):
            f[i] = c0 + s * i
    return True


@njit(cache=True)
def kick(v, gq, v_adv, half_dt, h, rho, floor, out):
    """out = v - dt/2 (gq + d(v_adv^2/2)/dx) on fluid nodes, filled elsewhere."""
    n = v.size
    ke = np.empty(n)
    for i in range(n):
        ke[i] = 0.5 * v_adv[i] * v_adv[i]
    dke = np.empty(n)
    ddx(ke, h, dke)
    good = np.empty(n, np.bool_)
    for i in range(n):
        out[i] = v[i] - half_dt * (gq[i] + dke[i])
        good[i] = rho[i] >= floor
    good[0] = False
    good[n - 1] = False
    return fill_linear(out, good)


@njit(cache=True)
def divergence(rho, v, h, out):
    """d(rho v)/dx as a face-flux difference over trapezoidal cells."""
    n = rho.size
    prev = 0.5 * (rho[0] * v[0] + rho[1] * v[1])
    out[0] = (prev - rho[0] * v[0]) / (0.5 * h)
    for i in range(1, n - 1):
        nxt = 0.5 * (rho[i] * v[i] + rho[i + 1] * v[i + 1])
        out[i] = (nxt - prev) / h
        prev = nxt
    out[n - 1] = (rho[n - 1] * v[n - 1] - prev) / (0.5 * h)


@njit(cache=True)
def drift(rho, v, dt, h, floor, out):
    """Full density step with midpoint predictor: flux form on fluid nodes,
    log form on vacuum nodes. Returns True if a negative density appeared."""
    n = rho.size
    d = np.empty(n)
    divergence(rho, v, h, d)
    mid = np.empty(n)
    for i in range(n):
        mid[i] = rho[i] - 0.5 * dt * d[i]
    divergence(mid, v, h, d)
    vacuum = False
    for i in range(n):
        out[i] = rho[i] - dt * d[i]
        if rho[i] < floor:
            vacuum = True
    if vacuum:
        lnr = np.empty(n)
        for i in range(n):
            lnr[i] = np.log(max(rho[i], TINY))
        dv = np.empty(n)
        ddx(v, h, dv)
        g = np.empty(n)
        ddx(lnr, h, g)
        for i in range(n):
            mid[i] = lnr[i] - 0.5 * dt * (v[i] * g[i] + dv[i])
        ddx(mid, h, g)
        for i in range(n):
            if rho[i] < floor:
                out[i] = np.exp(lnr[i] - dt * (v[i] * g[i] + dv[i]))
    negative = False
    for i in range(n):
        if out[i] < 0.0:
            negative = True
    return negative
