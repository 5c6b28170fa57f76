"""Blob-discretized vorticity coupled to a point vortex."""

import math

import numpy as np
import pytest

from vortexflow import kernels, vortexwave
from vortexflow.vortexwave import (BlobEnsemble, VortexWaveState,
                                   deposit_vorticity, induced_velocity,
                                   lattice_ensemble, linear_impulse, run, step)


class TestBlobEnsemble:
    def test_validation(self):
        with pytest.raises(ValueError):
            BlobEnsemble(np.zeros((2, 2)), np.zeros(3), 0.1)
        with pytest.raises(ValueError):
            BlobEnsemble(np.zeros((1, 2)), np.ones(1), 0.0)

    def test_circulation(self):
        ens = BlobEnsemble([[0, 0], [1, 0]], [2.0, -0.5], 0.1)
        assert ens.circulation == pytest.approx(1.5)


class TestInducedVelocity:
    def test_single_blob_matches_kernel(self, warm_engine):
        ens = BlobEnsemble([[0.0, 0.0]], [3.0], 0.2)
        x = np.array([1.0, 1.0])
        expect = 3.0 / (2 * math.pi) * kernels.regularized_kernel(x, 5)
        np.testing.assert_allclose(induced_velocity(ens, x), expect, rtol=1e-12)

    def test_symmetric_pair_cancels_at_midpoint(self, warm_engine):
        ens = BlobEnsemble([[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0], 0.1)
        v = induced_velocity(ens, np.array([0.0, 0.0]))
        np.testing.assert_allclose(v, [0.0, 0.0], atol=1e-15)

    def test_empty_ensemble(self):
        ens = BlobEnsemble(np.zeros((0, 2)), np.zeros(0), 0.1)
        np.testing.assert_array_equal(induced_velocity(ens, np.array([1.0, 0.0])),
                                      np.zeros(2))

    def test_batched_targets(self, warm_engine):
        ens = BlobEnsemble([[0.0, 0.0]], [1.0], 0.1)
        out = induced_velocity(ens, np.ones((3, 4, 2)))
        assert out.shape == (3, 4, 2)


class TestStep:
    def test_rejects_bad_dt(self, warm_engine):
        ens = BlobEnsemble([[1.0, 0.0]], [1.0], 0.1)
        state = VortexWaveState(vortex=(0, 0), strength=1.0, ensemble=ens)
        with pytest.raises(ValueError):
            step(state, 0.0)

    def test_weights_bitwise_conserved(self, warm_engine):
        rng = np.random.default_rng(11)
        ens = BlobEnsemble(rng.uniform(-1, 1, (20, 2)), rng.uniform(-1, 1, 20),
                           0.05)
        state = VortexWaveState(vortex=(0.2, 0.1), strength=0.7, ensemble=ens)
        for _ in range(5):
            state = step(state, 0.01)
        np.testing.assert_array_equal(state.ensemble.weights, ens.weights)
        assert state.ensemble.circulation == ens.circulation

    def test_zero_vorticity_keeps_vortex_fixed(self, warm_engine):
        ens = BlobEnsemble(np.array([[1.0, 0.0]]), np.array([0.0]), 0.1)
        state = VortexWaveState(vortex=(0.3, -0.2), strength=1.0, ensemble=ens)
        out = step(state, 0.1)
        np.testing.assert_array_equal(out.vortex, [0.3, -0.2])

    def test_linear_impulse_conserved(self, warm_engine):
        rng = np.random.default_rng(4)
        ens = BlobEnsemble(rng.uniform(-1, 1, (10, 2)),
                           rng.uniform(0.1, 1.0, 10), 0.2)
        state = VortexWaveState(vortex=(1.5, 0.0), strength=2.0, ensemble=ens)
        before = linear_impulse(state)
        for _ in range(50):
            state = step(state, 0.005)
        after = linear_impulse(state)
        np.testing.assert_allclose(after, before, atol=1e-8)


class TestRun:
    def test_zero_vorticity_constant_path(self, warm_engine):
        ens = BlobEnsemble(np.array([[1.0, 0.0]]), np.array([0.0]), 0.1)
        state = VortexWaveState(vortex=(0.5, 0.5), strength=1.0, ensemble=ens)
        path, snaps = run(state, 1.0, 0.1, [0.0, 1.0])
        assert path.horizon == pytest.approx(1.0)
        np.testing.assert_array_equal(path.positions,
                                      np.tile([0.5, 0.5], (11, 1)))
        assert len(snaps) == 2

    def test_lipschitz_bound_certifies_observed_speed(self, warm_engine):
        ens = BlobEnsemble([[0.5, 0.0]], [1.0], 0.1)
        state = VortexWaveState(vortex=(0.0, 0.0), strength=0.0, ensemble=ens)
        path, _ = run(state, 0.5, 0.01, [])
        speeds = (np.linalg.norm(np.diff(path.positions, axis=0), axis=1)
                  / np.diff(path.times))
        assert speeds.max() <= path.lipschitz_bound

    def test_rejects_snapshot_outside_window(self, warm_engine):
        ens = BlobEnsemble([[1.0, 0.0]], [1.0], 0.1)
        state = VortexWaveState(vortex=(0, 0), strength=1.0, ensemble=ens)
        with pytest.raises(ValueError):
            run(state, 1.0, 0.1, [2.0])


class TestLatticeAndDeposit:
    def test_lattice_weights(self):
        ens = lattice_ensemble(lambda x1, x2: np.ones_like(x1),
                               (-1, 1, -1, 1), 0.25, 0.5)
        assert len(ens.weights) == 64
        np.testing.assert_allclose(ens.weights, 0.0625)
        assert ens.circulation == pytest.approx(4.0)

    def test_lattice_cell_centers(self):
        ens = lattice_ensemble(lambda x1, x2: x1, (0, 1, 0, 1), 0.5, 0.1)
        np.testing.assert_allclose(sorted(set(ens.positions[:, 0])),
                                   [0.25, 0.75])

    def test_deposit_conserves_circulation_exactly(self):
        rng = np.random.default_rng(2)
        ens = BlobEnsemble(rng.uniform(-2, 2, (100, 2)),
                           rng.uniform(-1, 1, 100), 0.1)
        grid = deposit_vorticity(ens, 0.5, (-1, 1, -1, 1))
        assert grid.sum() * 0.25 == pytest.approx(ens.circulation, rel=1e-12)

    def test_deposit_identity_on_lattice(self):
        ens = lattice_ensemble(lambda x1, x2: x1 + 2.0, (-1, 1, -1, 1), 0.25, 0.1)
        grid = deposit_vorticity(ens, 0.25, (-1, 1, -1, 1))
        np.testing.assert_allclose(grid[0, 0], -0.875 + 2.0)


def test_two_blob_corotation(warm_engine):
    # Two equal blobs rotate rigidly about their midpoint.
    d, delta = 1.0, 0.01
    ens = BlobEnsemble([[d / 2, 0.0], [-d / 2, 0.0]],
                       [2 * math.pi, 2 * math.pi], delta)
    state = VortexWaveState(vortex=(5.0, 5.0), strength=0.0, ensemble=ens)
    for _ in range(200):
        state = step(state, 0.005)
    r = np.linalg.norm(state.ensemble.positions, axis=1)
    np.testing.assert_allclose(r, d / 2, rtol=1e-9)
