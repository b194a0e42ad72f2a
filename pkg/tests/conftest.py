import random

import pytest

from growthlab.algebra import A, K, cyclic, symmetric3
from growthlab.omega import OmegaSequence


def as_word(letters):
    return tuple(A if x == "a" else K(*x) for x in letters)


@pytest.fixture
def z2():
    return cyclic(2)


@pytest.fixture
def sym3():
    return symmetric3()


@pytest.fixture
def seq012():
    return OmegaSequence.periodic([0, 1, 2])


@pytest.fixture
def seq001122():
    return OmegaSequence.periodic([0, 0, 1, 1, 2, 2])


@pytest.fixture
def rng():
    return random.Random(20240611)
