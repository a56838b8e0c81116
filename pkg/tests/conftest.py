import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parent))

from bbmlab.sampling import sobolev_ball_state, substream
from bbmlab.spectral import TrigState


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(seed, n_modes, reg=0.5, radius=1.0, decay=None):
    """Deterministic random mean-zero state for loop-style tests."""
    return sobolev_ball_state(substream(seed, "test"), n_modes, reg, radius, decay=decay)


@st.composite
def trig_states(draw, max_modes=8):
    n = draw(st.integers(1, max_modes))
    coef = st.floats(-2.0, 2.0, allow_nan=False)
    a = draw(st.lists(coef, min_size=n, max_size=n))
    b = draw(st.lists(coef, min_size=n, max_size=n))
    return TrigState.mean_zero(a, b)
