"""Dense operators on a grid and the basic product algebra.

Operators are dense complex matrices acting on sampled wave functions.
Derivative matrices come in three flavors: second- and fourth-order central
differences (``fd2``, ``fd4``) and a Fourier spectral matrix (``spectral``,
periodic grids only).  All three are exactly antisymmetric, which makes the
classical momentum exactly Hermitian in the uniform-weight metric.

Diagonal operators remember their diagonal so that products against them
take an O(n^2) scaling path; the result is bit-identical to the dense
matrix product because the skipped terms are exact zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    GridMismatchError,
    HermitianInputError,
    SchemeBoundaryError,
)
from .grid import Grid, PhysicalConstants, WaveFunction, expectation

__all__ = [
    "SCHEME_KINDS",
    "HERMITIAN_TOL",
    "DerivativeScheme",
    "Operator",
    "operator",
    "build_multiplication",
    "build_identity",
    "build_position",
    "build_derivative",
    "build_momentum_classical",
    "build_geomentum",
    "adjoint",
    "compose",
    "scale",
    "linear_combine",
    "commutator_cr",
    "anticommutator_ir",
    "MomentBoundCheck",
    "second_moment_bound",
]

SCHEME_KINDS = ("fd2", "fd4", "spectral")

#: Max-norm threshold below which a matrix counts as Hermitian.
HERMITIAN_TOL = 1e-12

_FD_STENCILS = {
    "fd2": {1: 0.5, -1: -0.5},
    "fd4": {2: -1.0 / 12.0, 1: 8.0 / 12.0, -1: -8.0 / 12.0, -2: 1.0 / 12.0},
}


@dataclass(frozen=True)
class DerivativeScheme:
    """Discretization scheme for the first derivative.

    Attributes
    ----------
    kind : str
        One of ``"fd2"``, ``"fd4"``, ``"spectral"``.
    p : float
        Formal order of accuracy: 2, 4, or ``inf`` for spectral.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise SchemeBoundaryError(
                f"scheme must be one of {SCHEME_KINDS}, got {self.kind!r}"
            )

    @property
    def p(self) -> float:
        if self.kind == "fd2":
            return 2.0
        if self.kind == "fd4":
            return 4.0
        return math.inf

    @classmethod
    def from_name(cls, name: str) -> "DerivativeScheme":
        return cls(str(name))


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense linear operator on a grid.

    Attributes
    ----------
    matrix : numpy.ndarray
        Complex matrix of shape ``(grid.n, grid.n)``, read-only.
    label : str
        Short human-readable tag carried through the algebra.
    grid : Grid
        The grid the operator acts on.
    hermitian_hint : bool or None
        ``True`` when the builder knows the matrix is Hermitian (this is
        validated at construction: max-norm defect must not exceed
        :data:`HERMITIAN_TOL`), ``False`` when the builder knows it is not,
        ``None`` when no claim is made.  :meth:`is_hermitian` always
        measures the actual matrix.
    """

    matrix: np.ndarray = field(repr=False)
    label: str
    grid: Grid
    hermitian_hint: bool | None = None
    diagonal: np.ndarray | None = field(default=None, repr=False)
    _defect: float | None = field(default=None, repr=False)

    def __post_init__(self):
        matrix = np.ascontiguousarray(np.asarray(self.matrix, dtype=complex))
        if matrix.shape != (self.grid.n, self.grid.n):
            raise DimensionMismatchError(
                f"operator matrix has shape {matrix.shape} for a grid of "
                f"{self.grid.n} points"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.diagonal is not None:
            diag = np.ascontiguousarray(np.asarray(self.diagonal, dtype=complex))
            diag.setflags(write=False)
            object.__setattr__(self, "diagonal", diag)
        if self.hermitian_hint is True and self.hermitian_defect() > HERMITIAN_TOL:
            raise HermitianInputError(
                f"operator {self.label!r} was declared Hermitian but its "
                f"defect is {self.hermitian_defect():.3e}"
            )

    def hermitian_defect(self) -> float:
        """Max-norm of ``M - M^dagger``, cached after the first call."""
        if self._defect is None:
            defect = float(np.max(np.abs(self.matrix - self.matrix.conj().T)))
            object.__setattr__(self, "_defect", defect)
        return self._defect

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermitian_defect() <= tol

    @property
    def is_diagonal(self) -> bool:
        return self.diagonal is not None

    def apply(self, psi: WaveFunction) -> np.ndarray:
        """Raw action on a state's samples (no re-wrapping)."""
        self.grid.require_same(psi.grid, "operator and state")
        return self.matrix @ psi.amplitudes

    def expectation(self, psi: WaveFunction) -> complex:
        return expectation(self, psi)


def operator(
    matrix: np.ndarray,
    label: str,
    grid: Grid,
    hermitian_hint: bool | None = None,
) -> Operator:
    """Wrap a raw matrix as an :class:`Operator` (no diagonal fast path)."""
    return Operator(matrix, label, grid, hermitian_hint)


def build_multiplication(grid: Grid, values: np.ndarray, label: str = "f(x)") -> Operator:
    """Diagonal multiplication operator from pointwise samples.

    Parameters
    ----------
    grid : Grid
    values : array_like
        Samples of the multiplying function, length ``grid.n``.
    label : str

    Returns
    -------
    Operator
        Diagonal operator; Hermitian exactly when the samples are real.
    """
    values = np.asarray(values, dtype=complex)
    if values.shape != (grid.n,):
        raise DimensionMismatchError(
            f"multiplication samples have shape {values.shape} for a grid "
            f"of {grid.n} points"
        )
    hermitian = bool(np.max(np.abs(values.imag)) == 0.0) if grid.n else True
    return Operator(np.diag(values), label, grid, hermitian, diagonal=values)


def build_identity(grid: Grid) -> Operator:
    """Identity operator."""
    return build_multiplication(grid, np.ones(grid.n), label="1")


def build_position(grid: Grid) -> Operator:
    """Multiplication by the coordinate."""
    return build_multiplication(grid, grid.points, label="x")


def _fd_matrix(grid: Grid, kind: str) -> np.ndarray:
    n = grid.n
    stencil = _FD_STENCILS[kind]
    width = max(abs(k) for k in stencil)
    if n < 2 * width + 1:
        raise SchemeBoundaryError(
            f"{kind} stencil needs at least {2 * width + 1} grid points, got {n}"
        )
    matrix = np.zeros((n, n))
    if grid.boundary == "dirichlet":
        # Central stencil truncated at the edges: off-domain samples are
        # implicitly zero, which keeps the matrix exactly antisymmetric.
        for offset, weight in stencil.items():
            matrix += weight * np.eye(n, k=offset)
    else:
        rows = np.arange(n)
        for offset, weight in stencil.items():
            matrix[rows, (rows + offset) % n] += weight
    return matrix / grid.h


def _spectral_matrix(grid: Grid) -> np.ndarray:
    n = grid.n
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.h)
    if n % 2 == 0:
        # The unpaired Nyquist mode has no well-defined odd derivative;
        # zeroing it keeps the matrix real and antisymmetric.
        k[n // 2] = 0.0
    spectrum = np.fft.fft(np.eye(n), axis=0)
    matrix = np.fft.ifft(1j * k[:, None] * spectrum, axis=0).real
    return 0.5 * (matrix - matrix.T)


def build_derivative(grid: Grid, scheme: DerivativeScheme) -> Operator:
    """First-derivative matrix for the given scheme.

    The matrix is exactly antisymmetric for every scheme.  The spectral
    scheme requires a periodic grid and raises
    :class:`SchemeBoundaryError` otherwise.
    """
    if scheme.kind == "spectral":
        if grid.boundary != "periodic":
            raise SchemeBoundaryError(
                "spectral differentiation requires a periodic grid"
            )
        matrix = _spectral_matrix(grid)
    else:
        matrix = _fd_matrix(grid, scheme.kind)
    return Operator(matrix, f"D[{scheme.kind}]", grid, hermitian_hint=False)


def build_momentum_classical(
    grid: Grid,
    scheme: DerivativeScheme,
    constants: PhysicalConstants = PhysicalConstants(),
) -> Operator:
    """Flat-space momentum ``-i hbar D``.

    Exactly Hermitian because the derivative matrix is exactly
    antisymmetric and real.
    """
    deriv = build_derivative(grid, scheme)
    return Operator(-1j * constants.hbar * deriv.matrix, "p", grid, hermitian_hint=True)


def build_geomentum(
    grid: Grid,
    scheme: DerivativeScheme,
    s1: np.ndarray,
    constants: PhysicalConstants = PhysicalConstants(),
) -> Operator:
    """Geometric momentum ``-i hbar (D + diag(s'))``.

    Parameters
    ----------
    grid : Grid
    scheme : DerivativeScheme
    s1 : array_like
        Samples of the structure-function gradient ``s'``, length ``grid.n``.
    constants : PhysicalConstants

    Returns
    -------
    Operator
        Generally non-Hermitian: the added drift ``-i hbar diag(s')`` is
        anti-Hermitian for real ``s'``, so the Hermitian hint is True only
        when ``s'`` vanishes identically.
    """
    s1 = np.asarray(s1, dtype=float)
    if s1.shape != (grid.n,):
        raise DimensionMismatchError(
            f"gradient samples have shape {s1.shape} for a grid of {grid.n} points"
        )
    deriv = build_derivative(grid, scheme)
    matrix = -1j * constants.hbar * (deriv.matrix + np.diag(s1))
    hermitian = bool(np.max(np.abs(s1)) == 0.0)
    return Operator(matrix, "p_s", grid, hermitian_hint=hermitian)


def adjoint(a: Operator) -> Operator:
    """Conjugate transpose, which is the exact adjoint in this metric."""
    diag = a.diagonal.conj() if a.diagonal is not None else None
    return Operator(
        a.matrix.conj().T,
        f"adj({a.label})",
        a.grid,
        a.hermitian_hint,
        diagonal=diag,
    )


def compose(a: Operator, b: Operator) -> Operator:
    """Operator product ``a @ b`` with diagonal fast paths.

    When either factor is diagonal the product is formed by row or column
    scaling; the result is bit-identical to the dense matrix product.
    """
    a.grid.require_same(b.grid, "operators")
    if a.diagonal is not None and b.diagonal is not None:
        prod = a.diagonal * b.diagonal
        return Operator(
            np.diag(prod), f"({a.label}.{b.label})", a.grid, None, diagonal=prod
        )
    if a.diagonal is not None:
        matrix = a.diagonal[:, None] * b.matrix
    elif b.diagonal is not None:
        matrix = a.matrix * b.diagonal[None, :]
    else:
        matrix = a.matrix @ b.matrix
    return Operator(matrix, f"({a.label}.{b.label})", a.grid, None)


def scale(c: complex, a: Operator, label: str | None = None) -> Operator:
    """Scalar multiple ``c * a``."""
    diag = c * a.diagonal if a.diagonal is not None else None
    return Operator(
        c * a.matrix,
        label if label is not None else f"({c}*{a.label})",
        a.grid,
        None,
        diagonal=diag,
    )


def linear_combine(
    terms: Iterable[tuple[complex, Operator]], label: str | None = None
) -> Operator:
    """Linear combination ``sum(c_k * A_k)`` over a common grid."""
    terms = list(terms)
    if not terms:
        raise DimensionMismatchError("linear_combine needs at least one term")
    grid = terms[0][1].grid
    matrix = np.zeros((grid.n, grid.n), dtype=complex)
    all_diag = all(op.diagonal is not None for _, op in terms)
    pieces = []
    for c, op in terms:
        grid.require_same(op.grid, "operators")
        matrix = matrix + c * op.matrix
        pieces.append(f"{c}*{op.label}")
    diag = None
    if all_diag:
        diag = np.zeros(grid.n, dtype=complex)
        for c, op in terms:
            diag = diag + c * op.diagonal
    return Operator(
        matrix,
        label if label is not None else "(" + " + ".join(pieces) + ")",
        grid,
        None,
        diagonal=diag,
    )


def commutator_cr(a: Operator, b: Operator) -> Operator:
    """Product-difference bracket ``ab - ba``."""
    ab = compose(a, b)
    ba = compose(b, a)
    diag = None
    if ab.diagonal is not None and ba.diagonal is not None:
        diag = ab.diagonal - ba.diagonal
    return Operator(
        ab.matrix - ba.matrix, f"[{a.label},{b.label}]", a.grid, None, diagonal=diag
    )


def anticommutator_ir(a: Operator, b: Operator) -> Operator:
    """Product-sum bracket ``ab + ba``."""
    ab = compose(a, b)
    ba = compose(b, a)
    diag = None
    if ab.diagonal is not None and ba.diagonal is not None:
        diag = ab.diagonal + ba.diagonal
    return Operator(
        ab.matrix + ba.matrix, f"{{{a.label},{b.label}}}", a.grid, None, diagonal=diag
    )


@dataclass(frozen=True)
class MomentBoundCheck:
    """Second-moment product bound for a Hermitian pair.

    ``lhs = <A^2><B^2>`` must dominate
    ``rhs = (<C>^2 + <D>^2)/4`` where ``C = -i(AB - BA)`` and
    ``D = AB + BA``; ``slack = lhs - rhs``.
    """

    lhs: float
    rhs: float
    slack: float


def second_moment_bound(a: Operator, b: Operator, psi: WaveFunction) -> MomentBoundCheck:
    """Evaluate the second-moment product bound for Hermitian ``a``, ``b``.

    Raises
    ------
    HermitianInputError
        When either operator fails the Hermiticity test, since the bound
        is only guaranteed for Hermitian pairs.
    """
    for op in (a, b):
        if not op.is_hermitian():
            raise HermitianInputError(
                f"second_moment_bound needs Hermitian input, {op.label!r} has "
                f"defect {op.hermitian_defect():.3e}"
            )
    a2 = expectation(compose(a, a), psi).real
    b2 = expectation(compose(b, b), psi).real
    c_mean = (-1j * expectation(commutator_cr(a, b), psi)).real
    d_mean = expectation(anticommutator_ir(a, b), psi).real
    lhs = a2 * b2
    rhs = 0.25 * (c_mean**2 + d_mean**2)
    return MomentBoundCheck(lhs=lhs, rhs=rhs, slack=lhs - rhs)
