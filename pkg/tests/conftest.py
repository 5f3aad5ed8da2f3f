import pytest

from zeeman_analog.model import ModelParams


@pytest.fixture
def atom137():
    """Hydrogen-like analog at alpha = 1/137 in a weak field."""
    return ModelParams(alpha=1.0 / 137.0, m_p=1.0, sigma=0.1, B=1e-5, u0=1.0)


@pytest.fixture
def toy_atom():
    """Toy atom alpha = 1/3, zero field."""
    return ModelParams(alpha=1.0 / 3.0, m_p=1.0, sigma=0.1, B=0.0, u0=1.0)
