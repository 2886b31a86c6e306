"""
Shared fixtures for the ancilla_cz test suite.
"""

import numpy as np
import pytest


@pytest.fixture
def rng():
    """Seeded generator so property checks are repeatable."""
    return np.random.default_rng(20240611)
