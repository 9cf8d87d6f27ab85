import os

import hypothesis
import numpy as np
import pytest

from bubblewaves import fields, spectral

np.seterr(all="warn", under="ignore")

hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def transform():
    return spectral.build_transform()


@pytest.fixture(scope="session")
def witten_spectra():
    return fields.tower_spectra("witten", 1.0, (0, 1), count=6)


@pytest.fixture(scope="session")
def wormhole_spectra():
    return fields.tower_spectra("wormhole", 1.0, (0,), count=6)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
