import numpy as np
import pytest

from corrwitness.sampling import haar_unitary, random_amplitudes
from corrwitness.types import CorrelatedStateSpec, DephasingParams


def random_spec(rng: np.random.Generator, lam: float | None = None) -> CorrelatedStateSpec:
    b1, b2 = random_amplitudes(rng)
    lam = float(rng.uniform()) if lam is None else lam
    return CorrelatedStateSpec(b1, b2, lam, haar_unitary(rng))


@pytest.fixture
def params():
    return DephasingParams()


@pytest.fixture
def equal_weights():
    b = 1 / np.sqrt(2)
    return complex(b), complex(b)
