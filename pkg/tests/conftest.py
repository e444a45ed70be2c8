import math

import numpy as np
import pytest
from hypothesis import strategies as st

from neqlifshitz.material import BathModel, Material


@pytest.fixture
def lorentz_ohmic():
    """The workhorse lossy material (omega0 = lambda0 = 1, gamma = 0.1)."""
    return Material(omega0=1.0, lambda0=1.0, bath=BathModel(kind="ohmic", gamma=0.1))


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


def lossy_materials(min_gamma=0.01, kinds=("ohmic", "ohmic_lorentz_cutoff")):
    """Hypothesis strategy for dissipative materials in a sane numeric range."""

    def build(kind, omega0, lambda0, gamma, cutoff, beta):
        bath = BathModel(kind=kind, gamma=gamma, cutoff=cutoff if kind == "ohmic_lorentz_cutoff" else math.inf)
        return Material(omega0=omega0, lambda0=lambda0, bath=bath, beta_bath=beta)

    return st.builds(
        build,
        kind=st.sampled_from(kinds),
        omega0=st.floats(0.3, 3.0),
        lambda0=st.floats(0.1, 2.0),
        gamma=st.floats(min_gamma, 1.0),
        cutoff=st.floats(5.0, 200.0),
        beta=st.one_of(st.just(math.inf), st.floats(0.1, 50.0)),
    )


def frequencies(lo=1e-3, hi=50.0):
    return st.floats(lo, hi)
