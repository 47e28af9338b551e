import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import pilotwave as pw

warnings.simplefilter("ignore", pw.StepSizeWarning)


@pytest.fixture(scope="session")
def grid1d():
    return pw.SpatialGrid(512, (-20.0, 20.0))


@pytest.fixture(scope="session")
def free_gaussian_run(grid1d):
    """Free sigma=1 packet propagated to T=2, shared across modules."""
    psi0 = pw.gaussian_packet(grid1d, 0.0, 1.0)
    cfg = pw.PropagatorConfig(dt=1e-3, steps=2000, snapshot_stride=20)
    return pw.propagate(psi0, pw.FreePotential(), cfg)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
