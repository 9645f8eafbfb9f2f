import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from herglotz.annulus import Annulus


@pytest.fixture(scope="session")
def ann():
    """The reference annulus: q = 0.5, t0 = sqrt(q), M = 64, 256 nodes."""
    return Annulus(0.5, np.sqrt(0.5), modes=64, grid=256)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
