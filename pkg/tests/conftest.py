import pytest

from smw.model import Potential
from smw.quad import AuxKernels


@pytest.fixture(scope="session")
def gauss():
    return AuxKernels(Potential.gaussian())


@pytest.fixture(scope="session")
def quartic():
    return AuxKernels(Potential.quartic())


def rel(x, y):
    x, y = complex(x), complex(y)
    s = max(abs(x), abs(y))
    return abs(x - y) / s if s else 0.0
