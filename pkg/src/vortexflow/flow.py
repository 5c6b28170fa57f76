"""Ensemble trajectory integration and pushforward diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from . import engine
from .fields import CompositeField, PointVortexPath

# Relative slack on the confinement-radius assertion; the analytic bound is
# not tight, the slack only absorbs fp rounding of the integrator.
CONFINEMENT_SLACK = 1e-9


class FlowConfigurationError(ValueError):
    """Invalid integration request (exact level, bad dt, bad output times)."""


class ConfinementError(AssertionError):
    """A trajectory left the a-priori confinement disk."""


@dataclass(frozen=True)
class InitialEnsemble:
    """Uniform cell-centered grid discretization of the disk B_R(center).

    Points sit at half-integer multiples of ``spacing`` so none lies on the
    boundary circle; boundary cells carry full weight, an O(h*R) area bias.
    """

    center: np.ndarray
    radius: float
    spacing: float
    points: np.ndarray
    cell_weight: float

    def __post_init__(self):
        if self.radius <= 0 or self.spacing <= 0:
            raise ValueError("ensemble radius and spacing must be positive")
        if len(self.points) < 1:
            raise ValueError("ensemble must contain at least one point")


def disk_ensemble(center, radius: float, spacing: float) -> InitialEnsemble:
    center = np.asarray(center, dtype=float)
    if radius <= 0 or spacing <= 0:
        raise ValueError("ensemble radius and spacing must be positive")
    m = int(np.ceil(radius / spacing)) + 1
    idx = np.arange(-m, m)
    gx, gy = np.meshgrid(idx, idx, indexing="ij")
    pts = np.stack(((gx + 0.5) * spacing, (gy + 0.5) * spacing), axis=-1).reshape(-1, 2)
    keep = np.linalg.norm(pts, axis=1) < radius
    pts = pts[keep] + center
    return InitialEnsemble(center=center, radius=float(radius),
                           spacing=float(spacing), points=pts,
                           cell_weight=float(spacing) ** 2)


@dataclass(frozen=True)
class TrajectorySet:
    """Ensemble of approximate trajectories with per-point singularity records.

    ``min_distance`` is the minimum of |X(t,x) - z(t)| over all integration
    substep endpoints (not only output times); the inter-sample undershoot is
    bounded by ``speed_bound * dt`` and reported by the diagnostics.
    """

    output_times: np.ndarray
    positions: np.ndarray          # (n_points, n_times, 2)
    min_distance: np.ndarray       # (n_points,)
    level: int
    field_hash: str
    cell_weight: float
    dt: float
    speed_bound: float             # sup|v| + ||z'||_inf


def confinement_radius(field: CompositeField, ensemble: InitialEnsemble,
                       horizon: float) -> float:
    """|X(t)| <= |center| + R + 2 sup|z| + (sup|v| + ||z'||) T, from the
    radial Lipschitz bound of the distance to the path."""
    path = field.path
    sup_v = field.smooth.sup_norm
    if sup_v is None:
        raise FlowConfigurationError("smooth field needs sup_norm metadata")
    return (float(np.linalg.norm(ensemble.center)) + ensemble.radius
            + 2.0 * path.max_norm + (sup_v + path.lipschitz_bound) * horizon)


def integrate_flow(field: CompositeField, ensemble: InitialEnsemble,
                   horizon: float, dt: float, output_times,
                   field_hash: str = "") -> TrajectorySet:
    """Classical RK4 integration of every grid trajectory.

    The macro step is adaptively clamped near the path so the local rotation
    per substep stays small; the exact (unregularized) level is refused since
    its right-hand side is unbounded.
    """
    if field.is_exact:
        raise FlowConfigurationError(
            "cannot integrate the exact singular field; use a finite level")
    if dt <= 0:
        raise FlowConfigurationError("dt must be positive")
    if horizon < 0:
        raise FlowConfigurationError("horizon must be nonnegative")
    output_times = np.asarray(output_times, dtype=float)
    if output_times.ndim != 1 or len(output_times) < 1:
        raise FlowConfigurationError("output_times must be a nonempty sequence")
    if output_times[0] != 0.0 or np.any(np.diff(output_times) <= 0):
        raise FlowConfigurationError("output_times must increase from 0")
    if output_times[-1] > horizon * (1 + 1e-12) + 1e-300:
        raise FlowConfigurationError("output_times must lie inside [0, horizon]")
    smooth = field.smooth
    if smooth.sup_norm is None:
        raise FlowConfigurationError("smooth field needs sup_norm metadata")
    if smooth.scalar_velocity is None:
        raise FlowConfigurationError("smooth field needs a scalar_velocity contract")

    positions, min_dist, max_rad = engine.run_ensemble(
        ensemble.points, horizon, dt, output_times, field.path, field.level,
        smooth.sup_norm, smooth.scalar_velocity, smooth.jit_ok)

    r_tilde = confinement_radius(field, ensemble, horizon)
    bad = max_rad > r_tilde * (1.0 + CONFINEMENT_SLACK)
    if np.any(bad):
        worst = int(np.argmax(max_rad))
        raise ConfinementError(
            f"{int(bad.sum())} trajectories left the confinement disk "
            f"(radius {r_tilde:.6g}, max |X| = {max_rad[worst]:.6g})")

    return TrajectorySet(
        output_times=output_times,
        positions=positions,
        min_distance=min_dist,
        level=int(field.level),
        field_hash=field_hash,
        cell_weight=ensemble.cell_weight,
        dt=float(dt),
        speed_bound=smooth.sup_norm + field.path.lipschitz_bound,
    )


def pushforward_density(traj: TrajectorySet, at_time_index: int,
                        grid_spacing: float) -> Tuple[Dict[Tuple[int, int], float], float]:
    """Cell histogram of X(t_k, .) as an empirical pushforward density.

    Each trajectory carries its initial cell weight h^2; densities divide by
    the histogram cell area.  Returns the cell map and its maximum (the
    empirical compressibility constant at that time).
    """
    if grid_spacing <= 0:
        raise ValueError("grid_spacing must be positive")
    pos = traj.positions[:, at_time_index, :]
    cells = np.floor(pos / grid_spacing).astype(np.int64)
    uniq, counts = np.unique(cells, axis=0, return_counts=True)
    scale = traj.cell_weight / grid_spacing**2
    density = {(int(i), int(j)): float(c) * scale
               for (i, j), c in zip(uniq, counts)}
    return density, float(counts.max()) * scale


def min_distance_profile(traj: TrajectorySet) -> np.ndarray:
    """Per-initial-point minimum distance to the singularity, ensemble order."""
    return traj.min_distance.copy()
