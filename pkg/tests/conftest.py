import numpy as np
import pytest

import trapml as tm
from trapml.presets import DEFAULT_INTERVAL, reference_field


@pytest.fixture(scope="session")
def reference_path():
    """4000-step evolution of the four-harmonic reference field."""
    return tm.integrate_evolution(reference_field(), DEFAULT_INTERVAL[0],
                                  DEFAULT_INTERVAL[1], steps=4000)


@pytest.fixture(scope="session")
def unit_field_dataset():
    """Identifiable regression dataset: constant field 1, q0=(1,1), 10% noise."""
    ds, traj = tm.make_trajectory_dataset(tm.constant_field(1.0), (1.0, 1.0),
                                          DEFAULT_INTERVAL, 500, 0.1, seed=7)
    ds = tm.split_dataset(ds, 0.8, seed=7)
    return ds, traj
