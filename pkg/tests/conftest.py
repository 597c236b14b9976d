"""Shared scene builders for the test suite."""

import numpy as np
import pytest

from holoray import (
    Direction,
    MultipoleSpectrum,
    RadiatingField,
    WaveVector,
    intensity_function,
)


@pytest.fixture
def wave_z() -> WaveVector:
    return WaveVector((0.0, 0.0, 1.0))


@pytest.fixture
def monopole() -> RadiatingField:
    return RadiatingField(MultipoleSpectrum({(0, 0): 1.0}), 1.0)


@pytest.fixture
def dipole() -> RadiatingField:
    return RadiatingField(MultipoleSpectrum({(1, 0): 1.0}), 1.0)


@pytest.fixture
def zero_field() -> RadiatingField:
    return RadiatingField(MultipoleSpectrum({}), 1.0)


@pytest.fixture
def monopole_measure(monopole, wave_z):
    return intensity_function(monopole, wave_z)


def random_field(rng: np.random.Generator, max_degree: int, kappa: float = 1.0) -> RadiatingField:
    entries = {}
    for l in range(max_degree + 1):
        for m in range(-l, l + 1):
            entries[(l, m)] = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
    return RadiatingField(MultipoleSpectrum(entries), kappa)


def random_direction(rng: np.random.Generator) -> Direction:
    v = rng.normal(size=3)
    while np.linalg.norm(v) < 1e-6:
        v = rng.normal(size=3)
    return Direction(v)
