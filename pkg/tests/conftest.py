import pytest

from multibump.ground_state import solve_ground_state


@pytest.fixture(scope="session")
def profile1():
    """mu = 1 ground state, shared across the suite (solve takes ~1 s)."""
    return solve_ground_state(1.0)


@pytest.fixture(scope="session")
def profile4():
    return solve_ground_state(4.0)
