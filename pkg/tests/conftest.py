import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stringfock.basis import enumerate_basis
from stringfock.config import euclidean_metric, minkowski_metric


@pytest.fixture(scope="session")
def small_cov_basis():
    return enumerate_basis(4, 4)


@pytest.fixture(scope="session")
def small_cov_metric():
    return minkowski_metric(4)


@pytest.fixture(scope="session")
def small_lc_basis():
    return enumerate_basis(2, 4)


@pytest.fixture(scope="session")
def small_lc_metric():
    return euclidean_metric(2)


@pytest.fixture(scope="session")
def cov26_basis_n2():
    return enumerate_basis(26, 2)


@pytest.fixture(scope="session")
def cov26_metric():
    return minkowski_metric(26)
