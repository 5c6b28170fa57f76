"""Shared fixtures: scenario directory access and one-time engine warmup.

The trajectory engine compiles per smooth-field instance, so timed tests
must reuse the session-scoped field objects provided here after the
warmup fixture has triggered compilation.
"""

import os

import numpy as np
import pytest

from vortexflow.fields import CompositeField, constant_path, zero_field
from vortexflow.flow import InitialEnsemble, integrate_flow
from vortexflow import vortexwave

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                            "..", "scenarios")


def scenario_path(name: str) -> str:
    return os.path.join(SCENARIO_DIR, name)


def single_point_ensemble(point, radius: float = 2.0) -> InitialEnsemble:
    """One-trajectory ensemble for closed-form oracles."""
    point = np.asarray(point, dtype=float)
    return InitialEnsemble(center=np.zeros(2), radius=radius, spacing=1.0,
                           points=point.reshape(1, 2), cell_weight=1.0)


@pytest.fixture(scope="session")
def shared_zero_field():
    """One zero smooth field reused by every pure-kernel oracle test."""
    return zero_field()


@pytest.fixture(scope="session")
def warm_engine(shared_zero_field):
    """Compile the trajectory and blob engines before any timed region."""
    field = CompositeField(smooth=shared_zero_field,
                           path=constant_path((0.0, 0.0), 1.0), level=4)
    integrate_flow(field, single_point_ensemble((1.0, 0.0)), 1.0, 0.25,
                   [0.0, 1.0])
    blob = vortexwave.BlobEnsemble([[1.0, 0.0]], [1.0], 0.1)
    state = vortexwave.VortexWaveState(vortex=(0.0, 0.0), strength=1.0,
                                       ensemble=blob)
    vortexwave.step(state, 0.1)
