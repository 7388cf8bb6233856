import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _synth import counting_tensor, make_tensor  # noqa: E402


@pytest.fixture
def tiny_tensor():
    return counting_tensor()


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def small_tensor(rng):
    return make_tensor(rng, 6, 7, 4, name="small")
