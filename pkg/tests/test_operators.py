"""Dense operator builders: derivatives, momenta, composition, adjoints."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qgrkit import (
    DimensionMismatchError,
    SchemeBoundaryError,
    adjoint,
    build_derivative,
    build_geomentum,
    build_identity,
    build_momentum_classical,
    build_multiplication,
    build_position,
    commutator_cr,
    anticommutator_ir,
    compose,
    expectation,
    gaussian_packet,
    interior_mask,
    linear_combine,
    make_grid,
    operator,
    scale,
    second_moment_bound,
)
from qgrkit.operators import DerivativeScheme


def test_scheme_order_and_validation():
    assert DerivativeScheme("fd2").p == 2.0
    assert DerivativeScheme("fd4").p == 4.0
    assert DerivativeScheme("spectral").p == np.inf
    with pytest.raises(SchemeBoundaryError):
        DerivativeScheme("fd6")


@pytest.mark.parametrize("kind", ["fd2", "fd4", "spectral"])
def test_derivative_exactly_antisymmetric(periodic_grid, kind):
    d = build_derivative(periodic_grid, DerivativeScheme(kind))
    assert_allclose(d.matrix, -d.matrix.T, rtol=0.0, atol=0.0)


def test_fd2_exact_on_quadratics_interior(dirichlet_grid):
    d = build_derivative(dirichlet_grid, DerivativeScheme("fd2"))
    x = dirichlet_grid.points
    samples = 3.0 * x**2 - 2.0 * x + 1.0
    exact = 6.0 * x - 2.0
    interior = slice(2, -2)
    assert_allclose((d.matrix @ samples)[interior], exact[interior], atol=1e-10)


def test_fd4_exact_on_quartics_interior(dirichlet_grid):
    d = build_derivative(dirichlet_grid, DerivativeScheme("fd4"))
    x = dirichlet_grid.points
    samples = x**4 - x**3
    exact = 4.0 * x**3 - 3.0 * x**2
    interior = slice(4, -4)
    assert_allclose((d.matrix @ samples)[interior], exact[interior], atol=1e-8)


def test_spectral_derivative_on_commensurate_wave():
    # Wavenumber chosen so an integer number of periods fits the domain.
    grid = make_grid(-np.pi, np.pi, 64, "periodic")
    d = build_derivative(grid, DerivativeScheme("spectral"))
    k = 3.0
    assert_allclose(
        d.matrix @ np.sin(k * grid.points),
        k * np.cos(k * grid.points),
        atol=1e-11,
    )


def test_spectral_requires_periodic(dirichlet_grid):
    with pytest.raises(SchemeBoundaryError):
        build_derivative(dirichlet_grid, DerivativeScheme("spectral"))


def test_classical_momentum_mean_on_boosted_packet(fine_grid):
    p = build_momentum_classical(fine_grid, DerivativeScheme("spectral"))
    psi = gaussian_packet(fine_grid, p0=2.0)
    assert expectation(p, psi).real == pytest.approx(2.0, abs=1e-6)
    assert abs(expectation(p, psi).imag) < 1e-10


def test_momentum_variance_of_gaussian(fine_grid):
    p = build_momentum_classical(fine_grid, DerivativeScheme("spectral"))
    psi = gaussian_packet(fine_grid, width=1.0)
    from qgrkit import variance

    var, _ = variance(p, psi)
    # sigma_p^2 = hbar^2 / (2 w^2) for this packet convention.
    assert var.real == pytest.approx(0.5, rel=1e-8)


def test_geomentum_reduces_to_classical_on_zero_shift(periodic_grid, fd4):
    p_classical = build_momentum_classical(periodic_grid, fd4)
    p_geo = build_geomentum(periodic_grid, fd4, np.zeros(periodic_grid.n))
    assert_allclose(p_geo.matrix, p_classical.matrix, atol=0.0)


def test_geomentum_adds_imaginary_diagonal_shift(periodic_grid, fd4, sine_structure):
    p_classical = build_momentum_classical(periodic_grid, fd4)
    p_geo = build_geomentum(periodic_grid, fd4, sine_structure.s1)
    correction = p_geo.matrix - p_classical.matrix
    assert_allclose(correction, np.diag(-1j * sine_structure.s1), atol=1e-15)


def test_geomentum_is_not_hermitian(periodic_grid, fd4, sine_structure):
    p_geo = build_geomentum(periodic_grid, fd4, sine_structure.s1)
    defect = np.max(np.abs(p_geo.matrix - p_geo.matrix.conj().T))
    assert defect > 1e-3


def test_adjoint_is_conjugate_transpose(periodic_grid, random_operator):
    m = random_operator(periodic_grid)
    assert_allclose(adjoint(m).matrix, m.matrix.conj().T, atol=0.0)


def test_compose_matches_dense_product(periodic_grid, random_operator):
    a = random_operator(periodic_grid)
    b = random_operator(periodic_grid)
    assert_allclose(compose(a, b).matrix, a.matrix @ b.matrix, atol=0.0)


def test_compose_diagonal_fast_path(periodic_grid, random_operator):
    f = build_multiplication(periodic_grid, np.cos(periodic_grid.points))
    m = random_operator(periodic_grid)
    assert_allclose(
        compose(f, m).matrix, np.diag(np.cos(periodic_grid.points)) @ m.matrix, atol=0.0
    )
    assert_allclose(
        compose(m, f).matrix, m.matrix @ np.diag(np.cos(periodic_grid.points)), atol=0.0
    )
    g = build_multiplication(periodic_grid, periodic_grid.points)
    fg = compose(f, g)
    assert fg.is_diagonal
    assert_allclose(
        np.diag(fg.matrix), np.cos(periodic_grid.points) * periodic_grid.points, atol=0.0
    )


def test_commutators_and_linear_combine(periodic_grid, random_operator):
    a = random_operator(periodic_grid)
    b = random_operator(periodic_grid)
    assert_allclose(
        commutator_cr(a, b).matrix, a.matrix @ b.matrix - b.matrix @ a.matrix, atol=0.0
    )
    assert_allclose(
        anticommutator_ir(a, b).matrix,
        a.matrix @ b.matrix + b.matrix @ a.matrix,
        atol=0.0,
    )
    combo = linear_combine([(2.0, a), (-1j, b)])
    assert_allclose(combo.matrix, 2.0 * a.matrix - 1j * b.matrix, atol=0.0)
    assert_allclose(scale(3.0, a).matrix, 3.0 * a.matrix, atol=0.0)


def test_position_and_identity_are_diagonal(periodic_grid):
    x = build_position(periodic_grid)
    eye = build_identity(periodic_grid)
    assert x.is_diagonal and eye.is_diagonal
    assert_allclose(np.diag(x.matrix), periodic_grid.points, atol=0.0)
    assert_allclose(eye.matrix, np.eye(periodic_grid.n), atol=0.0)


def test_operator_shape_validation(periodic_grid):
    with pytest.raises(DimensionMismatchError):
        operator(np.eye(periodic_grid.n + 1), "bad", periodic_grid)


def test_second_moment_bound_on_hermitian_pair(periodic_grid, packet, random_hermitian):
    a = random_hermitian(periodic_grid)
    b = random_hermitian(periodic_grid)
    check = second_moment_bound(a, b, packet)
    # <A^2><B^2> >= (<C>^2 + <D>^2)/4 with C = -i[A,B], D = {A,B}.
    assert check.slack >= -1e-10
    assert check.lhs >= check.rhs - 1e-10
