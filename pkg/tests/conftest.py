import numpy as np
import pytest

from carmagen import build_system

PI = np.pi


@pytest.fixture(scope="session")
def sys_levy():
    """Single pole at the origin (running-integral system)."""
    return build_system([0.0])


@pytest.fixture(scope="session")
def sys_double_levy():
    """Double pole at the origin (twice-integrated system)."""
    return build_system([0.0, 0.0])


@pytest.fixture(scope="session")
def sys_oscillator():
    """Marginally stable conjugate pair at +-3*pi/4."""
    return build_system([0.75j * PI, -0.75j * PI])


@pytest.fixture(scope="session")
def sys_car2():
    """Stationary second-order system, poles -0.05 +- j*pi/2."""
    return build_system([complex(-0.05, 0.5 * PI), complex(-0.05, -0.5 * PI)])


@pytest.fixture(scope="session")
def sys_ou():
    """First-order stationary system with pole -1."""
    return build_system([-1.0])
