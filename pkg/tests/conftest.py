import numpy as np
import pytest

from jflow import RunConfig, model_from_values

GRID = (8, 8, 8, 8)
G_VALUES = (1.0, 1.0, 0.0, 0.0, 0.0, 0.0)
H_VALUES = (2.0, 2.0, 0.0, 0.0, 0.0, 0.0)
PSI0_MODES = ((1, 0, 0, 0, 0.05, 0.0),)


@pytest.fixture(scope="session")
def standard_model():
    """G = I, H = 2I, psi0 = 0.05 cos(2 pi x1) on the 8^4 grid."""
    return model_from_values(GRID, G_VALUES, H_VALUES, PSI0_MODES)


@pytest.fixture(scope="session")
def constant_model():
    """Constant background G = I, H = 2I; an exact fixed point."""
    return model_from_values(GRID, G_VALUES, H_VALUES)


def make_config(**kwargs):
    base = dict(grid=GRID, g_values=G_VALUES, h_values=H_VALUES,
                psi0_modes=PSI0_MODES)
    base.update(kwargs)
    return RunConfig(**base)


def random_pd(rng, n):
    """n random positive definite Herm2 entries as stacked arrays."""
    from jflow import Herm2
    a11 = np.exp(rng.uniform(-1.0, 1.0, n))
    a22 = np.exp(rng.uniform(-1.0, 1.0, n))
    r = rng.uniform(0.0, 0.95, n)
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    a12 = r * np.sqrt(a11 * a22) * np.exp(1j * theta)
    return Herm2(a11, a22, a12)


def random_hermitian(rng, n):
    from jflow import Herm2
    return Herm2(rng.normal(size=n), rng.normal(size=n),
                 rng.normal(size=n) + 1j * rng.normal(size=n))
