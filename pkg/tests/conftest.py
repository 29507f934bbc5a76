"""Shared fixtures: grids, packets, structure fields, and random operators."""

from __future__ import annotations

import numpy as np
import pytest

from qgrkit import (
    Grid,
    Operator,
    build_structure,
    gaussian_packet,
    make_grid,
    operator,
)
from qgrkit.operators import DerivativeScheme


@pytest.fixture(scope="session")
def periodic_grid() -> Grid:
    return make_grid(-20.0, 20.0, 256, "periodic")


@pytest.fixture(scope="session")
def dirichlet_grid() -> Grid:
    return make_grid(-20.0, 20.0, 256, "dirichlet")


@pytest.fixture(scope="session")
def fine_grid() -> Grid:
    return make_grid(-20.0, 20.0, 512, "periodic")


@pytest.fixture(scope="session")
def packet(periodic_grid):
    return gaussian_packet(periodic_grid)


@pytest.fixture(scope="session")
def fine_packet(fine_grid):
    return gaussian_packet(fine_grid)


@pytest.fixture(scope="session")
def sine_structure(periodic_grid):
    return build_structure(periodic_grid, "sine", amplitude=0.1, wavenumber=1.0)


@pytest.fixture(scope="session")
def linear_structure(periodic_grid):
    return build_structure(periodic_grid, "linear", amplitude=0.2)


@pytest.fixture(scope="session")
def fd4():
    return DerivativeScheme("fd4")


@pytest.fixture(scope="session")
def fd2():
    return DerivativeScheme("fd2")


@pytest.fixture(scope="session")
def spectral():
    return DerivativeScheme("spectral")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def random_hermitian(rng):
    """Factory for seeded random Hermitian operators on a given grid."""

    def _build(grid: Grid, label: str = "H_rand") -> Operator:
        raw = rng.uniform(-1.0, 1.0, (grid.n, grid.n)) + 1j * rng.uniform(
            -1.0, 1.0, (grid.n, grid.n)
        )
        return operator((raw + raw.conj().T) / 2.0, label, grid)

    return _build


@pytest.fixture
def random_operator(rng):
    """Factory for seeded random dense complex operators (no symmetry)."""

    def _build(grid: Grid, label: str = "M_rand") -> Operator:
        raw = rng.uniform(-1.0, 1.0, (grid.n, grid.n)) + 1j * rng.uniform(
            -1.0, 1.0, (grid.n, grid.n)
        )
        return operator(raw, label, grid)

    return _build
