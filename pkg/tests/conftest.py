import numpy as np
import pytest

from svcm.data import Dataset, SpatialDomain, grid_domain
from svcm.kernel import KernelParams, EigenSystem


@pytest.fixture(scope="session")
def kp2d():
    return KernelParams(a=0.25, b=30.0, d=2)


@pytest.fixture(scope="session")
def kp1d():
    return KernelParams(a=1.0, b=1.0, d=1)


@pytest.fixture(scope="session")
def small_domain():
    return grid_domain(6)  # 36 locations, 2x2 regions


@pytest.fixture(scope="session")
def small_eig(kp2d):
    return EigenSystem.build(kp2d, 4)  # L = 15


@pytest.fixture()
def small_dataset(small_domain):
    rng = np.random.default_rng(99)
    m, p = 12, 2
    X = np.column_stack([rng.normal(0, 1, m), rng.uniform(-1, 1, m)])
    beta = np.zeros((p, small_domain.n))
    beta[0, small_domain.region_labels == 1] = 2.0
    beta[1, small_domain.region_labels == 4] = -1.5
    Y = X @ beta + rng.normal(0, 0.5, (m, small_domain.n))
    return Dataset(Y=Y, X=X, domain=small_domain), beta


def batch_mean_se(draws, n_batches=25):
    """Monte Carlo standard error of the mean via batch means."""
    draws = np.asarray(draws, dtype=float)
    T = draws.shape[0]
    k = max(T // n_batches, 1)
    usable = (T // k) * k
    batches = draws[:usable].reshape(T // k, k, *draws.shape[1:]).mean(axis=1)
    return batches.std(axis=0, ddof=1) / np.sqrt(batches.shape[0])
