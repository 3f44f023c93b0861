"""Shared fixtures for the anwsim test suite."""
import numpy as np
import pytest

from anwsim import ArrayConfig, PumpProfile


@pytest.fixture
def cfg5():
    """Five-guide homogeneous array at the reference working point."""
    return ArrayConfig(n=5, coupling=0.24, length=30.0)


@pytest.fixture
def flat_pump5():
    """Flat pump at the reference amplitude, phase -pi/2 (squeezes y)."""
    return PumpProfile.flat(5, 0.015, -np.pi / 2)
