import os

import numpy as np
import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def codec_gray():
    return np.load(os.path.join(FIXTURES, "codec_gray.npz"))


@pytest.fixture(scope="session")
def codec_color():
    return np.load(os.path.join(FIXTURES, "codec_color.npz"))


def fixture_path(name):
    return os.path.join(FIXTURES, name)
