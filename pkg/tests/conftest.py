import numpy as np
import pytest

from copula_lab import GridCopula


def sinkhorn_grid(rng: np.random.Generator, n: int) -> GridCopula:
    """Random valid grid: positive matrix balanced to uniform marginals."""
    m = rng.uniform(0.1, 1.0, size=(n, n))
    for _ in range(10_000):
        m /= m.sum(axis=1, keepdims=True) * n
        m /= m.sum(axis=0, keepdims=True) * n
        if (
            np.abs(m.sum(axis=1) - 1.0 / n).max() < 1e-14
            and np.abs(m.sum(axis=0) - 1.0 / n).max() < 1e-14
        ):
            break
    return GridCopula(resolution=n, masses=m)


@pytest.fixture
def grid_factory():
    return sinkhorn_grid
