"""Vortex paths, smooth time-varying fields, mollification, composite fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import kernels

# Relative slack on the sampled-path Lipschitz invariant.
LIPSCHITZ_SLACK = 1e-9


class PathRangeError(ValueError):
    """Path evaluated outside its [0, T] sample window."""


class DivergenceUnavailableError(RuntimeError):
    """The smooth field declares no divergence contract."""


@dataclass(frozen=True)
class PointVortexPath:
    """Sampled Lipschitz trajectory z(t) of the point singularity.

    Evaluation between samples is piecewise linear, which preserves the
    Lipschitz bound exactly and assumes no extra smoothness.
    """

    times: np.ndarray
    positions: np.ndarray
    lipschitz_bound: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)
        if times.ndim != 1 or len(times) < 1:
            raise ValueError("path needs at least one sample time")
        if positions.shape != (len(times), 2):
            raise ValueError("positions must have shape (len(times), 2)")
        if times[0] != 0.0:
            raise ValueError("path samples must start at t = 0")
        dt = np.diff(times)
        if np.any(dt <= 0.0):
            raise ValueError("path sample times must be strictly increasing")
        if self.lipschitz_bound < 0.0:
            raise ValueError("lipschitz_bound must be >= 0")
        if len(times) > 1:
            seg = np.linalg.norm(np.diff(positions, axis=0), axis=1)
            if np.any(seg > self.lipschitz_bound * dt * (1.0 + LIPSCHITZ_SLACK)):
                raise ValueError("path samples violate the declared Lipschitz bound")

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def max_norm(self) -> float:
        """sup_t |z(t)| over the samples (attained at a sample by convexity)."""
        return float(np.linalg.norm(self.positions, axis=1).max())

    def at(self, t):
        """z(t) by linear interpolation; exact at sample times."""
        t = np.asarray(t, dtype=float)
        horizon = self.horizon
        slack = 1e-12 * max(horizon, 1.0)
        if np.any(t < -slack) or np.any(t > horizon + slack):
            raise PathRangeError(f"time {t} outside path window [0, {horizon}]")
        t = np.clip(t, 0.0, horizon)
        z1 = np.interp(t, self.times, self.positions[:, 0])
        z2 = np.interp(t, self.times, self.positions[:, 1])
        return np.stack((z1, z2), axis=-1)


def eval_path(path: PointVortexPath, t):
    """Piecewise-linear interpolation of the sampled vortex trajectory."""
    return path.at(t)


def constant_path(position, horizon: float) -> PointVortexPath:
    position = np.asarray(position, dtype=float)
    return PointVortexPath(
        times=np.array([0.0, float(horizon)]) if horizon > 0 else np.array([0.0]),
        positions=np.tile(position, (2 if horizon > 0 else 1, 1)),
        lipschitz_bound=0.0,
    )


def sampled_path(fn: Callable[[float], tuple], horizon: float, samples: int = 1025,
                 lipschitz_bound: Optional[float] = None) -> PointVortexPath:
    """Sample a closed-form trajectory on a uniform grid.

    When no Lipschitz bound is supplied, the observed maximum segment speed
    (with a small margin) is certified a posteriori.
    """
    times = np.linspace(0.0, float(horizon), samples)
    positions = np.array([fn(t) for t in times], dtype=float)
    if lipschitz_bound is None:
        if samples > 1:
            seg = np.linalg.norm(np.diff(positions, axis=0), axis=1)
            speed = seg / np.diff(times)
            lipschitz_bound = float(speed.max()) * (1.0 + 1e-9)
        else:
            lipschitz_bound = 0.0
    return PointVortexPath(times, positions, lipschitz_bound)


@dataclass(frozen=True, eq=False)
class TimeVaryingField:
    """The smooth part v of the drift: an evaluation contract plus norm metadata.

    ``velocity(t, xs)`` is vectorized over points of shape (..., 2).
    ``scalar_velocity(t, x1, x2) -> (u1, u2)`` is the same field in scalar
    form; when ``jit_ok`` it must be a numba dispatcher, which enables the
    compiled trajectory engine.
    """

    velocity: Callable
    div: Optional[Callable] = None
    sup_norm: Optional[float] = None
    div_sup_integral: Optional[float] = None
    grad_lp_norm: Optional[float] = None
    grad_lp_exponent: Optional[float] = None
    scalar_velocity: Optional[Callable] = None
    jit_ok: bool = False


def zero_field() -> TimeVaryingField:
    return constant_field((0.0, 0.0))


def constant_field(u) -> TimeVaryingField:
    u = np.asarray(u, dtype=float)
    u1, u2 = float(u[0]), float(u[1])

    def velocity(t, xs):
        xs = np.asarray(xs, dtype=float)
        out = np.empty_like(xs)
        out[..., 0] = u1
        out[..., 1] = u2
        return out

    def div(t, xs):
        xs = np.asarray(xs, dtype=float)
        return np.zeros(xs.shape[:-1])

    from .engine import jit_scalar_constant

    return TimeVaryingField(
        velocity=velocity,
        div=div,
        sup_norm=math.hypot(u1, u2),
        div_sup_integral=0.0,
        scalar_velocity=jit_scalar_constant(u1, u2),
        jit_ok=True,
    )


def add_fields(a: TimeVaryingField, b: TimeVaryingField) -> TimeVaryingField:
    """Pointwise sum; norm metadata combines subadditively."""

    def velocity(t, xs):
        return a.velocity(t, xs) + b.velocity(t, xs)

    div = None
    if a.div is not None and b.div is not None:
        def div(t, xs):  # noqa: E731 style kept as nested def
            return a.div(t, xs) + b.div(t, xs)

    def _sum(x, y):
        return None if x is None or y is None else x + y

    return TimeVaryingField(
        velocity=velocity,
        div=div,
        sup_norm=_sum(a.sup_norm, b.sup_norm),
        div_sup_integral=_sum(a.div_sup_integral, b.div_sup_integral),
    )


# --- Friedrichs mollification -------------------------------------------------

_MOLLIFY_NODES = 17  # tensor midpoint nodes per axis on the support square


def _bump_weights(n: int):
    """Midpoint nodes and normalized weights for rho_n on [-1/n, 1/n]^2."""
    h = 2.0 / (n * _MOLLIFY_NODES)
    c = (np.arange(_MOLLIFY_NODES) + 0.5) * h - 1.0 / n
    gx, gy = np.meshgrid(c, c, indexing="ij")
    r2 = (n * gx) ** 2 + (n * gy) ** 2
    w = np.zeros_like(r2)
    inside = r2 < 1.0
    w[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    w = w / w.sum()
    nodes = np.stack((gx.ravel(), gy.ravel()), axis=-1)
    return nodes, w.ravel()


def mollify(field: TimeVaryingField, n) -> TimeVaryingField:
    """Spatial convolution against the standard compactly supported bump.

    Approximated by a fixed midpoint tensor quadrature on the support disk;
    quadrature weights are renormalized to unit mass so constants (and the
    sup-norm bound) are preserved exactly.
    """
    n = kernels._check_level(n)
    nodes, weights = _bump_weights(n)

    def velocity(t, xs):
        xs = np.asarray(xs, dtype=float)
        out = np.zeros_like(xs, dtype=float)
        for node, w in zip(nodes, weights):
            out = out + w * field.velocity(t, xs - node)
        return out

    div = None
    if field.div is not None:
        def div(t, xs):
            xs = np.asarray(xs, dtype=float)
            acc = 0.0
            for node, w in zip(nodes, weights):
                acc = acc + w * field.div(t, xs - node)
            return acc

    def scalar_velocity(t, x1, x2):
        u = velocity(t, np.array([x1, x2]))
        return float(u[0]), float(u[1])

    return TimeVaryingField(
        velocity=velocity,
        div=div,
        sup_norm=field.sup_norm,
        div_sup_integral=field.div_sup_integral,
        grad_lp_norm=field.grad_lp_norm,
        grad_lp_exponent=field.grad_lp_exponent,
        scalar_velocity=scalar_velocity,
        jit_ok=False,
    )


# --- Composite field ----------------------------------------------------------

EXACT = "exact"

Level = Union[int, str]


@dataclass(frozen=True, eq=False)
class CompositeField:
    """b(t, x) = v(t, x) + K_level(x - z(t)).

    ``level`` is a positive integer for the regularized kernel or the
    string ``"exact"`` for the unbounded singular drift.
    """

    smooth: TimeVaryingField
    path: PointVortexPath
    level: Level

    def __post_init__(self):
        if self.level != EXACT:
            kernels._check_level(self.level)

    @property
    def is_exact(self) -> bool:
        return self.level == EXACT

    @property
    def velocity_bound(self) -> Optional[float]:
        """Global field bound sup |b_n| <= sup |v| + n/2 (finite levels only)."""
        if self.is_exact or self.smooth.sup_norm is None:
            return None
        return self.smooth.sup_norm + self.level / 2.0


def composite_velocity(field: CompositeField, t, x):
    x = np.asarray(x, dtype=float)
    smooth = field.smooth.velocity(t, x)
    if field.is_exact:
        drift = kernels.singular_drift(t, x, field.path)
    else:
        drift = kernels.regularized_drift(t, x, field.path, field.level)
    return smooth + drift


def composite_divergence(field: CompositeField, t, x):
    """Divergence of the composite; the kernel part contributes zero."""
    if field.smooth.div is None:
        raise DivergenceUnavailableError("smooth field has no divergence contract")
    return field.smooth.div(t, np.asarray(x, dtype=float))
