"""Pointwise properties of the singular and regularized kernels."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexflow import kernels

coords = st.floats(min_value=-100.0, max_value=100.0,
                   allow_nan=False, allow_infinity=False)
levels = st.integers(min_value=1, max_value=10**6)


def test_exact_kernel_known_values():
    np.testing.assert_allclose(kernels.biot_savart_kernel([1.0, 0.0]), [0.0, 1.0])
    np.testing.assert_allclose(kernels.biot_savart_kernel([0.0, 2.0]), [-0.5, 0.0])
    np.testing.assert_allclose(kernels.biot_savart_kernel([-3.0, 0.0]),
                               [0.0, -1.0 / 3.0])


def test_exact_kernel_rejects_origin():
    with pytest.raises(kernels.KernelSingularityError):
        kernels.biot_savart_kernel([0.0, 0.0])
    with pytest.raises(kernels.KernelSingularityError):
        kernels.biot_savart_kernel([[1.0, 0.0], [0.0, 0.0]])


def test_exact_kernel_batched_shape():
    pts = np.ones((4, 5, 2))
    assert kernels.biot_savart_kernel(pts).shape == (4, 5, 2)


def test_level_validation():
    for bad in (0, -1, 2.5, "exactly"):
        with pytest.raises(ValueError):
            kernels.regularized_kernel([1.0, 0.0], bad)


@given(x1=coords, x2=coords, n=levels)
def test_regularized_kernel_orthogonal_and_bounded(x1, x2, n):
    y = np.array([x1, x2])
    k = kernels.regularized_kernel(y, n)
    # Rotation by 90 degrees: K_n(y) is orthogonal to y up to fp cancellation.
    dot = abs(float(k @ y))
    assert dot <= 4.0 * np.finfo(float).eps * np.linalg.norm(k) * np.linalg.norm(y)
    # |y| / (|y|^2 + 1/n^2) is maximized at |y| = 1/n with value n/2.
    assert np.linalg.norm(k) <= n / 2.0 * (1.0 + 4.0 * np.finfo(float).eps)


@given(x1=coords, x2=coords, n=levels)
def test_regularized_kernel_odd(x1, x2, n):
    y = np.array([x1, x2])
    assert np.array_equal(kernels.regularized_kernel(-y, n),
                          -kernels.regularized_kernel(y, n))


@given(x1=coords, x2=coords)
def test_regularized_kernel_converges_pointwise(x1, x2):
    y = np.array([x1, x2])
    if np.linalg.norm(y) < 1e-3:
        return
    exact = kernels.biot_savart_kernel(y)
    errs = [np.linalg.norm(kernels.regularized_kernel(y, n) - exact)
            for n in (10, 100, 1000)]
    assert errs[0] >= errs[1] >= errs[2]
    assert errs[2] <= np.linalg.norm(exact) * 1e-3


def test_regularized_divergence_free_numerically():
    # Central finite differences on a smooth bounded field.
    h = 1e-6
    rng = np.random.default_rng(7)
    for _ in range(50):
        y = rng.uniform(-2, 2, 2)
        n = int(rng.integers(1, 50))
        dudx = (kernels.regularized_kernel(y + [h, 0], n)[0]
                - kernels.regularized_kernel(y - [h, 0], n)[0]) / (2 * h)
        dvdy = (kernels.regularized_kernel(y + [0, h], n)[1]
                - kernels.regularized_kernel(y - [0, h], n)[1]) / (2 * h)
        assert abs(dudx + dvdy) < 1e-5 * max(1.0, n)


def test_drifts_follow_the_path():
    from vortexflow.fields import constant_path
    path = constant_path((1.0, 1.0), horizon=2.0)
    x = np.array([2.0, 1.0])
    np.testing.assert_allclose(kernels.singular_drift(0.5, x, path),
                               kernels.biot_savart_kernel(x - [1.0, 1.0]))
    np.testing.assert_allclose(kernels.regularized_drift(0.5, x, path, 10),
                               kernels.regularized_kernel(x - [1.0, 1.0], 10))


def test_multi_vortex_superposition():
    from vortexflow.fields import constant_path
    p1 = constant_path((1.0, 0.0), 1.0)
    p2 = constant_path((-1.0, 0.0), 1.0)
    x = np.array([0.0, 1.0])
    both = kernels.multi_vortex_drift(0.0, x, [p1, p2], [2.0, -3.0])
    expect = (2.0 * kernels.singular_drift(0.0, x, p1)
              - 3.0 * kernels.singular_drift(0.0, x, p2))
    np.testing.assert_allclose(both, expect)


def test_multi_vortex_skips_zero_strength_at_coincidence():
    from vortexflow.fields import constant_path
    path = constant_path((0.0, 1.0), 1.0)
    out = kernels.multi_vortex_drift(0.0, np.array([0.0, 1.0]), [path], [0.0])
    np.testing.assert_array_equal(out, np.zeros(2))


def test_multi_vortex_length_mismatch():
    from vortexflow.fields import constant_path
    with pytest.raises(ValueError):
        kernels.multi_vortex_drift(0.0, np.zeros(2),
                                   [constant_path((1, 0), 1.0)], [1.0, 2.0])
