"""
Global pytest configuration and fixtures for rank2sim testing.

This module provides shared test fixtures, pytest configuration, and
test utilities used across unit, integration, and E2E tests.
"""

import numpy as np
import pytest

from rank2sim.params import ModelSpec


# ============================================================
# PYTEST CONFIGURATION
# ============================================================

def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line(
        "markers",
        "unit: unit tests (deterministic or small Monte Carlo, single module)"
    )
    config.addinivalue_line(
        "markers",
        "integration: cross-module Monte Carlo identities"
    )
    config.addinivalue_line(
        "markers",
        "e2e: end-to-end tests through the rank2sim CLI"
    )
    config.addinivalue_line(
        "markers",
        "slow: large-n acceptance experiments taking minutes"
    )
    config.addinivalue_line(
        "markers",
        "regression: seeded snapshot baselines"
    )


# ============================================================
# RANDOMNESS
# ============================================================

@pytest.fixture
def rng() -> np.random.Generator:
    """Fresh seeded generator per test."""
    return np.random.default_rng(20240611)


# ============================================================
# MODEL FIXTURES
# ============================================================

@pytest.fixture
def er_spec() -> ModelSpec:
    """Erdos-Renyi embedded classic spec, 2000 vertices per type."""
    from tests.fixtures.model_specs import er_embedded_spec
    return er_embedded_spec(2000)


@pytest.fixture
def interacting_spec() -> ModelSpec:
    """K = I, lambda12 = 1, 2000 vertices per type."""
    from tests.fixtures.model_specs import interacting_spec as build
    return build(2000)


@pytest.fixture
def bipartite_spec() -> ModelSpec:
    """Light bipartite ER spec, n = 500, m = 5000."""
    from tests.fixtures.model_specs import light_bipartite_spec
    return light_bipartite_spec(500, 5000)


@pytest.fixture
def tiny_spec() -> ModelSpec:
    """2 + 1 vertices with edge probabilities 0.5 (type 1 pair) and 0.3 (across)."""
    from tests.fixtures.model_specs import tiny_spec as build
    return build()


@pytest.fixture
def duality_spec() -> ModelSpec:
    """5 + 5 vertices, constant weights per type, positive Q."""
    from tests.fixtures.model_specs import duality_spec as build
    return build()


# ============================================================
# DATA GENERATOR FIXTURES
# ============================================================

@pytest.fixture
def path_generator():
    """
    Random path / field generator fixture.

    Provides access to the lattice path generators and brute-force oracles.
    """
    from tests.fixtures.path_generators import (
        lattice_field,
        lattice_jump_path,
        oracle_excursion_lengths,
        oracle_field_minimum,
        oracle_tau,
    )

    class PathGenerator:
        jump_path = staticmethod(lattice_jump_path)
        field = staticmethod(lattice_field)
        excursion_lengths = staticmethod(oracle_excursion_lengths)
        field_minimum = staticmethod(oracle_field_minimum)
        tau = staticmethod(oracle_tau)

    return PathGenerator()
