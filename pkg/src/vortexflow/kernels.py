"""Biot-Savart kernel, algebraic regularization, and singular drifts.

All functions are pure and accept either a single point of shape ``(2,)``
or a batch of shape ``(..., 2)``.  The kernel here is the unnormalized
``K(x) = x_perp / |x|^2``; the 1/(2 pi) physical normalization is applied
only by :mod:`vortexflow.vortexwave`.
"""

from __future__ import annotations

import numpy as np

# Exact-coincidence threshold on |x - z(t)|.  Callers that need a field
# defined everywhere use the regularized variants instead.
COINCIDENCE_TOL = 1e-30


class KernelSingularityError(ValueError):
    """Evaluation of the exact kernel at (or inside fp-noise of) its pole."""


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError(f"expected points of shape (..., 2), got {x.shape}")
    return x


def biot_savart_kernel(x):
    """K(x) = (-x2, x1) / |x|^2, defined away from the origin."""
    x = _as_points(x)
    r2 = x[..., 0] ** 2 + x[..., 1] ** 2
    if np.any(r2 < COINCIDENCE_TOL**2):
        raise KernelSingularityError("biot_savart_kernel evaluated at the origin")
    out = np.empty_like(x)
    out[..., 0] = -x[..., 1] / r2
    out[..., 1] = x[..., 0] / r2
    return out


def _check_level(n) -> int:
    if not float(n).is_integer() or n < 1:
        raise ValueError(f"regularization level must be a positive integer, got {n!r}")
    return int(n)


def regularized_kernel(x, n):
    """K_n(x) = (-x2, x1) / (|x|^2 + 1/n^2); bounded by n/2, smooth, div-free."""
    n = _check_level(n)
    x = _as_points(x)
    den = x[..., 0] ** 2 + x[..., 1] ** 2 + 1.0 / (n * n)
    out = np.empty_like(x)
    out[..., 0] = -x[..., 1] / den
    out[..., 1] = x[..., 0] / den
    return out


def singular_drift(t, x, path):
    """K(x - z(t)) for a vortex travelling along ``path``."""
    return biot_savart_kernel(_as_points(x) - path.at(t))


def regularized_drift(t, x, path, n):
    """K_n(x - z(t)); defined everywhere, bounded by n/2."""
    return regularized_kernel(_as_points(x) - path.at(t), n)


def multi_vortex_drift(t, x, paths, strengths):
    """Weighted superposition sum_i d_i K(x - z_i(t)).

    The caller is responsible for the path-separation condition
    min_{i != j} min_t |z_i(t) - z_j(t)| > 0 at path-construction time.
    """
    paths = list(paths)
    strengths = [float(d) for d in strengths]
    if len(paths) != len(strengths):
        raise ValueError("paths and strengths must have equal length")
    x = _as_points(x)
    out = np.zeros_like(x)
    for path, d in zip(paths, strengths):
        if d == 0.0:
            # Zero-strength vortices contribute nothing, even at coincidence.
            continue
        out += d * singular_drift(t, x, path)
    return out
