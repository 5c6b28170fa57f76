"""Compiled per-trajectory integration core.

One source implementation serves two call modes: compiled with numba when
the smooth field's scalar form is jittable (expression-backed scenarios),
or plain Python otherwise (e.g. mollified fields, used at test scale).
Trajectories are fully independent and each writes to its own output
slots, so results are bitwise identical for any number of threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

# Fraction of the current distance to the singularity that a substep may
# traverse at the global field bound; keeps the local rotation per substep
# well under 0.1 rad.
CLAMP_FRACTION = 0.1


def jit_scalar_constant(u1: float, u2: float):
    u1 = float(u1)
    u2 = float(u2)

    @njit(cache=False)
    def _const(t, a, b):
        return u1, u2

    return _const


_ENGINES: dict = {}


def get_engine(scalar_velocity, use_jit: bool):
    key = (scalar_velocity, bool(use_jit))
    engine = _ENGINES.get(key)
    if engine is None:
        engine = _build_engine(scalar_velocity, use_jit)
        _ENGINES[key] = engine
    return engine


def _build_engine(scalar_velocity, use_jit: bool):
    deco = njit(cache=False) if use_jit else (lambda f: f)

    @deco
    def _one(i, x1, x2, horizon, dt_macro, out_times, out_pos, min_dist, max_rad,
             ptimes, pz1, pz2, uniform, inv_dtp, inv_n2, core, clamp):
        npath = ptimes.shape[0]

        def zat(tt):
            if npath == 1 or tt <= 0.0:
                return pz1[0], pz2[0]
            if tt >= ptimes[npath - 1]:
                return pz1[npath - 1], pz2[npath - 1]
            if uniform:
                k = int(tt * inv_dtp)
            else:
                k = np.searchsorted(ptimes, tt) - 1
            if k < 0:
                k = 0
            if k > npath - 2:
                k = npath - 2
            th = (tt - ptimes[k]) / (ptimes[k + 1] - ptimes[k])
            return pz1[k] + th * (pz1[k + 1] - pz1[k]), pz2[k] + th * (pz2[k + 1] - pz2[k])

        def vel(tt, a, b):
            z1, z2 = zat(tt)
            y1 = a - z1
            y2 = b - z2
            den = y1 * y1 + y2 * y2 + inv_n2
            u1, u2 = scalar_velocity(tt, a, b)
            return u1 - y2 / den, u2 + y1 / den

        z1, z2 = zat(0.0)
        d = np.sqrt((x1 - z1) ** 2 + (x2 - z2) ** 2)
        mind = d
        maxr = np.sqrt(x1 * x1 + x2 * x2)

        n_out = out_times.shape[0]
        oi = 0
        while oi < n_out and out_times[oi] <= 0.0:
            out_pos[i, oi, 0] = x1
            out_pos[i, oi, 1] = x2
            oi += 1

        t = 0.0
        while t < horizon:
            deff = d if d > core else core
            h = dt_macro
            hc = clamp * deff
            if hc < h:
                h = hc
            if h > horizon - t:
                h = horizon - t
            if h <= 0.0:
                break
            k11, k12 = vel(t, x1, x2)
            k21, k22 = vel(t + 0.5 * h, x1 + 0.5 * h * k11, x2 + 0.5 * h * k12)
            k31, k32 = vel(t + 0.5 * h, x1 + 0.5 * h * k21, x2 + 0.5 * h * k22)
            k41, k42 = vel(t + h, x1 + h * k31, x2 + h * k32)
            nx1 = x1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
            nx2 = x2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
            tn = t + h

            while oi < n_out and out_times[oi] <= tn:
                th = (out_times[oi] - t) / h
                out_pos[i, oi, 0] = x1 + th * (nx1 - x1)
                out_pos[i, oi, 1] = x2 + th * (nx2 - x2)
                oi += 1

            x1 = nx1
            x2 = nx2
            t = tn
            z1, z2 = zat(t if t < horizon else horizon)
            d = np.sqrt((x1 - z1) ** 2 + (x2 - z2) ** 2)
            if d < mind:
                mind = d
            r = np.sqrt(x1 * x1 + x2 * x2)
            if r > maxr:
                maxr = r

        while oi < n_out:
            out_pos[i, oi, 0] = x1
            out_pos[i, oi, 1] = x2
            oi += 1

        min_dist[i] = mind
        max_rad[i] = maxr

    if use_jit:
        @njit(cache=False, parallel=True)
        def _drive(xs, horizon, dt_macro, out_times, out_pos, min_dist, max_rad,
                   ptimes, pz1, pz2, uniform, inv_dtp, inv_n2, core, clamp):
            for i in prange(xs.shape[0]):
                _one(i, xs[i, 0], xs[i, 1], horizon, dt_macro, out_times, out_pos,
                     min_dist, max_rad, ptimes, pz1, pz2, uniform, inv_dtp,
                     inv_n2, core, clamp)
    else:
        def _drive(xs, horizon, dt_macro, out_times, out_pos, min_dist, max_rad,
                   ptimes, pz1, pz2, uniform, inv_dtp, inv_n2, core, clamp):
            for i in range(xs.shape[0]):
                _one(i, xs[i, 0], xs[i, 1], horizon, dt_macro, out_times, out_pos,
                     min_dist, max_rad, ptimes, pz1, pz2, uniform, inv_dtp,
                     inv_n2, core, clamp)

    return _drive


def run_ensemble(points, horizon, dt, out_times, path, level, sup_norm,
                 scalar_velocity, use_jit):
    """Integrate all trajectories; returns (positions, min_dist, max_rad)."""
    xs = np.ascontiguousarray(points, dtype=float)
    out_times = np.ascontiguousarray(out_times, dtype=float)
    n_pts = xs.shape[0]
    out_pos = np.empty((n_pts, out_times.shape[0], 2))
    min_dist = np.empty(n_pts)
    max_rad = np.empty(n_pts)

    ptimes = np.ascontiguousarray(path.times, dtype=float)
    pz1 = np.ascontiguousarray(path.positions[:, 0], dtype=float)
    pz2 = np.ascontiguousarray(path.positions[:, 1], dtype=float)
    if len(ptimes) > 1:
        steps = np.diff(ptimes)
        uniform = bool(np.all(np.abs(steps - steps[0]) < 1e-12 * steps[0]))
        inv_dtp = 1.0 / steps[0]
    else:
        uniform = True
        inv_dtp = 0.0

    n = int(level)
    inv_n2 = 1.0 / (n * n)
    core = 1.0 / n
    clamp = CLAMP_FRACTION / (n / 2.0 + sup_norm)

    drive = get_engine(scalar_velocity, use_jit)
    drive(xs, float(horizon), float(dt), out_times, out_pos, min_dist, max_rad,
          ptimes, pz1, pz2, uniform, inv_dtp, inv_n2, core, clamp)
    return out_pos, min_dist, max_rad
