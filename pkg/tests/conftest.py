"""Shared fixtures"""
import numpy as np
import pytest
from click.testing import CliRunner

from tcentre.spin_core import BUILTIN_TENSORS, HyperfineTensor, get_constants


@pytest.fixture
def measured():
    return BUILTIN_TENSORS['measured']


@pytest.fixture
def dft():
    return BUILTIN_TENSORS['dft']


@pytest.fixture
def zero_tensor():
    return BUILTIN_TENSORS['zero']


@pytest.fixture
def isotropic():
    return HyperfineTensor((2.0, 2.0, 2.0), name='isotropic')


@pytest.fixture
def constants():
    return get_constants()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def runner():
    return CliRunner()


def random_unit(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_rotation(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
