"""Quantitative diagnostics: field distance, trajectory discrepancy
functionals, near-collision measures, compressibility, and the
convergence-rate harness.

Theoretical constants are not explicit, so the harness fits each constant
on the coarsest level pair and checks the bound *shape* on finer pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .fields import CompositeField, TimeVaryingField, composite_velocity
from .flow import (InitialEnsemble, TrajectorySet, confinement_radius,
                   integrate_flow, pushforward_density)

DEFAULT_TIME_SAMPLES = 64
DEFAULT_SPACE_CELLS = 128
COMPRESSIBILITY_SLACK = 0.05
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class ConvergenceReport:
    pairs: List[Tuple[int, int]]
    delta: np.ndarray
    g_value: np.ndarray
    flow_error: np.ndarray
    eps_star: np.ndarray           # |ln delta|^(-1/3), the coupling scale
    fitted_C_rate: float
    fitted_C_g: float
    bound_satisfied: List[bool]


@dataclass(frozen=True)
class CollisionReport:
    epsilons: np.ndarray           # decreasing
    measures: np.ndarray
    fitted_exponent: float
    reported_uncertainty: float    # min-distance sampling undershoot bound


def delta_l1(field_n: CompositeField, field_m: CompositeField, horizon: float,
             radius: float, time_samples: int = DEFAULT_TIME_SAMPLES,
             space_spacing: float | None = None) -> float:
    """L1 distance of the two composite fields over [0,T] x B_radius.

    Midpoint rule in time tensored with cell centers in space.
    """
    if field_n.path is not field_m.path and not (
            np.array_equal(field_n.path.times, field_m.path.times)
            and np.array_equal(field_n.path.positions, field_m.path.positions)):
        raise ValueError("delta_l1 requires both fields to share one path")
    if space_spacing is None:
        space_spacing = radius / DEFAULT_SPACE_CELLS
    m = int(np.ceil(radius / space_spacing))
    idx = np.arange(-m, m)
    gx, gy = np.meshgrid(idx, idx, indexing="ij")
    pts = np.stack(((gx + 0.5) * space_spacing, (gy + 0.5) * space_spacing),
                   axis=-1).reshape(-1, 2)
    pts = pts[np.linalg.norm(pts, axis=1) < radius]
    cell_area = space_spacing**2
    if field_n.level == field_m.level:
        return 0.0
    total = 0.0
    dt_w = horizon / time_samples
    for k in range(time_samples):
        t = (k + 0.5) * dt_w
        diff = composite_velocity(field_n, t, pts) - composite_velocity(field_m, t, pts)
        total += float(np.linalg.norm(diff, axis=1).sum()) * cell_area * dt_w
    return total


def _check_compatible(traj_n: TrajectorySet, traj_m: TrajectorySet):
    if not np.array_equal(traj_n.output_times, traj_m.output_times):
        raise ValueError("trajectory sets have different output times")
    if traj_n.positions.shape != traj_m.positions.shape or \
            not np.array_equal(traj_n.positions[:, 0, :], traj_m.positions[:, 0, :]):
        raise ValueError("trajectory sets have different initial ensembles")


def g_functional(traj_n: TrajectorySet, traj_m: TrajectorySet, delta: float,
                 ensemble: InitialEnsemble) -> float:
    """Integrated sup-in-time log trajectory discrepancy against scale delta."""
    _check_compatible(traj_n, traj_m)
    if delta <= 0:
        raise ValueError("delta must be positive")
    disp = np.linalg.norm(traj_n.positions - traj_m.positions, axis=2)
    sup = disp.max(axis=1)
    return float(np.log(sup / delta + 1.0).sum()) * ensemble.cell_weight


def flow_error(traj_n: TrajectorySet, traj_m: TrajectorySet,
               ensemble: InitialEnsemble) -> float:
    """integral over B_R of sup_t |X_n - X_m|."""
    _check_compatible(traj_n, traj_m)
    disp = np.linalg.norm(traj_n.positions - traj_m.positions, axis=2)
    return float(disp.max(axis=1).sum()) * ensemble.cell_weight


def near_collision_measure(traj: TrajectorySet, ensemble: InitialEnsemble,
                           epsilons: Sequence[float]) -> CollisionReport:
    """Empirical measure of initial points whose trajectory approaches the
    singularity closer than each epsilon."""
    epsilons = np.asarray(epsilons, dtype=float)
    if np.any(epsilons <= 0) or np.any(np.diff(epsilons) >= 0):
        raise ValueError("epsilons must be positive and strictly decreasing")
    measures = np.array([
        float((traj.min_distance < eps).sum()) * ensemble.cell_weight
        for eps in epsilons])
    nonzero = measures > 0
    if nonzero.sum() >= 2:
        slope = np.polyfit(np.log(epsilons[nonzero]), np.log(measures[nonzero]), 1)[0]
        fitted = float(slope)
    else:
        fitted = float("nan")
    uncertainty = traj.speed_bound * traj.dt
    return CollisionReport(epsilons=epsilons, measures=measures,
                           fitted_exponent=fitted,
                           reported_uncertainty=uncertainty)


def collision_epsilon_grid(radius: float, k_min: int = 3, k_max: int = 10) -> np.ndarray:
    """Geometric epsilon grid R * 2^-k, suited for log-log exponent fits."""
    return radius * 2.0 ** (-np.arange(k_min, k_max + 1, dtype=float))


def compressibility(traj: TrajectorySet, grid_spacing: float,
                    L0: float) -> Tuple[float, bool]:
    """Empirical pushforward-density bound against exp(L0)."""
    empirical = 0.0
    for k in range(len(traj.output_times)):
        _, peak = pushforward_density(traj, k, grid_spacing)
        empirical = max(empirical, peak)
    bound_ok = empirical <= math.exp(L0) * (1.0 + COMPRESSIBILITY_SLACK)
    return empirical, bound_ok


def rate_harness(smooth, path, ensemble: InitialEnsemble, horizon: float,
                 dt: float, output_times, levels: Sequence[int], reference: int,
                 time_samples: int = DEFAULT_TIME_SAMPLES,
                 space_cells: int = DEFAULT_SPACE_CELLS,
                 field_hash: str = "") -> ConvergenceReport:
    """Integrate all levels against one reference and test the bound shapes.

    The rate constant and the log-functional constant are fitted on the
    coarsest pair; every finer pair must satisfy the fitted bounds
    error <= C / |ln delta|^(1/3) and g <= C' |ln delta|^(2/3).
    """
    levels = [int(n) for n in levels]
    reference = int(reference)
    if any(n > reference for n in levels):
        raise ValueError("levels must not exceed the reference level")

    # ``smooth`` is either one field shared by all levels or a per-level
    # builder (the mollified v_n case).
    smooth_of = (lambda n: smooth) if isinstance(smooth, TimeVaryingField) else smooth
    fields = {n: CompositeField(smooth=smooth_of(n), path=path, level=n)
              for n in sorted(set(levels + [reference]))}
    r_tilde = confinement_radius(fields[reference], ensemble, horizon)

    trajs = {n: integrate_flow(fields[n], ensemble, horizon, dt, output_times,
                               field_hash=field_hash)
             for n in fields}

    pairs, deltas, gs, errs, eps_star = [], [], [], [], []
    for n in levels:
        pairs.append((n, reference))
        d = delta_l1(fields[n], fields[reference], horizon, r_tilde,
                     time_samples=time_samples,
                     space_spacing=r_tilde / space_cells)
        deltas.append(d)
        if d == 0.0:
            gs.append(0.0)
            errs.append(flow_error(trajs[n], trajs[reference], ensemble))
            eps_star.append(float("nan"))
        else:
            gs.append(g_functional(trajs[n], trajs[reference], d, ensemble))
            errs.append(flow_error(trajs[n], trajs[reference], ensemble))
            eps_star.append(abs(math.log(d)) ** (-1.0 / 3.0))

    deltas = np.asarray(deltas)
    gs = np.asarray(gs)
    errs = np.asarray(errs)
    eps_star = np.asarray(eps_star)

    # Fit both constants on the coarsest pair with a nonzero field distance.
    fit_idx = None
    order = np.argsort(levels)
    for i in order:
        if deltas[i] > 0:
            fit_idx = i
            break
    if fit_idx is None:
        c_rate = 0.0
        c_g = 0.0
    else:
        ln_d = abs(math.log(deltas[fit_idx]))
        c_rate = errs[fit_idx] * ln_d ** (1.0 / 3.0)
        c_g = gs[fit_idx] / ln_d ** (2.0 / 3.0) if ln_d > 0 else float("inf")

    ok = []
    for i in range(len(levels)):
        if deltas[i] == 0.0:
            ok.append(bool(errs[i] == 0.0))
            continue
        ln_d = abs(math.log(deltas[i]))
        rate_ok = errs[i] <= c_rate / ln_d ** (1.0 / 3.0) * (1.0 + BOUND_SLACK)
        g_ok = gs[i] <= c_g * ln_d ** (2.0 / 3.0) * (1.0 + BOUND_SLACK)
        ok.append(bool(rate_ok and g_ok))

    return ConvergenceReport(pairs=pairs, delta=deltas, g_value=gs,
                             flow_error=errs, eps_star=eps_star,
                             fitted_C_rate=float(c_rate), fitted_C_g=float(c_g),
                             bound_satisfied=ok)
