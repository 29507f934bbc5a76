"""Uniform 1-D grids, wave functions, and sampled inner products.

The discretization is deliberately plain: a uniform grid on ``[x_min, x_max]``
with either ``dirichlet`` endpoints (both endpoints are grid points, functions
are implicitly zero outside) or ``periodic`` wrap-around (the right endpoint
is identified with the left one and not stored).  All inner products are
Riemann sums with uniform weight ``h``, so the matrix adjoint of an operator
is exactly its conjugate transpose in this metric.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import (
    BoundaryAmplitudeWarning,
    DimensionMismatchError,
    GridMismatchError,
    GridRangeError,
    GridSizeError,
    NonpositiveWidthError,
    NormalizationWarning,
)

if TYPE_CHECKING:  # pragma: no cover - typing only
    from .operators import Operator

__all__ = [
    "BOUNDARY_KINDS",
    "MIN_GRID_POINTS",
    "PhysicalConstants",
    "Grid",
    "WaveFunction",
    "make_grid",
    "as_wavefunction",
    "gaussian_packet",
    "inner_product",
    "norm",
    "expectation",
    "variance",
    "interior_mask",
]

BOUNDARY_KINDS = ("dirichlet", "periodic")

#: Smallest supported grid; below this the wide finite-difference stencils
#: and the interior margin stop making sense.
MIN_GRID_POINTS = 8

#: Relative tolerance used when deciding whether a state counts as normalized.
_NORMALIZATION_TOL = 1e-8

#: Boundary amplitude above this fraction of the peak triggers a warning.
_BOUNDARY_AMPLITUDE_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants threaded through operator builders.

    Parameters
    ----------
    hbar : float
        Reduced Planck constant; must be positive.
    mass : float
        Particle mass; must be positive.
    """

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise NonpositiveWidthError(f"hbar must be positive, got {self.hbar}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise NonpositiveWidthError(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform 1-D spatial grid.

    Attributes
    ----------
    x_min, x_max : float
        Domain endpoints.
    n : int
        Number of stored grid points.
    boundary : str
        ``"dirichlet"`` or ``"periodic"``.
    h : float
        Grid spacing: ``(x_max - x_min) / (n - 1)`` for dirichlet grids,
        ``(x_max - x_min) / n`` for periodic ones.
    points : numpy.ndarray
        The sample positions, read-only, shape ``(n,)``.
    """

    x_min: float
    x_max: float
    n: int
    boundary: str
    h: float = field(init=False)
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise GridRangeError(
                f"grid endpoints must be finite, got [{self.x_min}, {self.x_max}]"
            )
        if self.x_max <= self.x_min:
            raise GridRangeError(
                f"grid range is empty or inverted: [{self.x_min}, {self.x_max}]"
            )
        if int(self.n) != self.n or self.n < MIN_GRID_POINTS:
            raise GridSizeError(
                f"grid needs at least {MIN_GRID_POINTS} points, got {self.n}"
            )
        if self.boundary not in BOUNDARY_KINDS:
            raise GridRangeError(
                f"boundary must be one of {BOUNDARY_KINDS}, got {self.boundary!r}"
            )
        length = self.x_max - self.x_min
        if self.boundary == "dirichlet":
            h = length / (self.n - 1)
        else:
            h = length / self.n
        points = self.x_min + h * np.arange(self.n, dtype=float)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "points", _readonly(points))

    def same_as(self, other: "Grid") -> bool:
        """True when two grids describe the identical discretization."""
        return (
            self.x_min == other.x_min
            and self.x_max == other.x_max
            and self.n == other.n
            and self.boundary == other.boundary
        )

    def require_same(self, other: "Grid", what: str = "objects") -> None:
        """Raise :class:`GridMismatchError` unless ``other`` matches."""
        if not self.same_as(other):
            raise GridMismatchError(
                f"{what} live on different grids: "
                f"[{self.x_min}, {self.x_max}] n={self.n} {self.boundary} vs "
                f"[{other.x_min}, {other.x_max}] n={other.n} {other.boundary}"
            )


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex state vector sampled on a grid.

    Attributes
    ----------
    grid : Grid
        The grid the samples live on.
    amplitudes : numpy.ndarray
        Complex samples, read-only, shape ``(grid.n,)``.
    normalized : bool
        Whether ``<psi|psi>`` equals 1 within a small relative tolerance,
        recorded at construction time.
    """

    grid: Grid
    amplitudes: np.ndarray = field(repr=False)
    normalized: bool = field(init=False)

    def __post_init__(self):
        values = np.asarray(self.amplitudes, dtype=complex)
        if values.shape != (self.grid.n,):
            raise DimensionMismatchError(
                f"state has {values.shape} samples for a grid of {self.grid.n} points"
            )
        object.__setattr__(self, "amplitudes", _readonly(values))
        nrm2 = self.grid.h * float(np.sum(np.abs(values) ** 2))
        object.__setattr__(self, "normalized", abs(nrm2 - 1.0) <= _NORMALIZATION_TOL)


def make_grid(x_min: float, x_max: float, n: int, boundary: str = "dirichlet") -> Grid:
    """Build a uniform grid on ``[x_min, x_max]``.

    Parameters
    ----------
    x_min, x_max : float
        Domain endpoints; ``x_min < x_max`` is required.
    n : int
        Number of stored points, at least :data:`MIN_GRID_POINTS`.
    boundary : str
        ``"dirichlet"`` (default) or ``"periodic"``.

    Returns
    -------
    Grid
    """
    return Grid(float(x_min), float(x_max), int(n), boundary)


def as_wavefunction(grid: Grid, values: np.ndarray, normalize: bool = False) -> WaveFunction:
    """Wrap raw samples as a :class:`WaveFunction`, optionally normalizing.

    Parameters
    ----------
    grid : Grid
    values : array_like
        Complex samples of length ``grid.n``.
    normalize : bool
        When True, rescale so the Riemann-sum norm is exactly 1.
    """
    values = np.asarray(values, dtype=complex)
    if values.shape != (grid.n,):
        raise DimensionMismatchError(
            f"got {values.shape} samples for a grid of {grid.n} points"
        )
    if normalize:
        nrm = math.sqrt(grid.h * float(np.sum(np.abs(values) ** 2)))
        if nrm == 0.0:
            raise NonpositiveWidthError("cannot normalize the zero vector")
        values = values / nrm
    return WaveFunction(grid, values)


def gaussian_packet(
    grid: Grid,
    x0: float = 0.0,
    p0: float = 0.0,
    width: float = 1.0,
    constants: PhysicalConstants = PhysicalConstants(),
) -> WaveFunction:
    """Normalized Gaussian wave packet ``exp(-(x-x0)^2/(2 w^2)) exp(i p0 x / hbar)``.

    The packet is normalized in the grid's Riemann-sum norm.  When its
    amplitude at the domain edge exceeds ``1e-10`` of the peak a
    :class:`BoundaryAmplitudeWarning` is emitted, because boundary-truncation
    error then pollutes moments that are otherwise spectrally accurate.

    Parameters
    ----------
    grid : Grid
    x0 : float
        Center position.
    p0 : float
        Mean momentum imprinted as a phase gradient.
    width : float
        Gaussian width ``w``; must be positive.
    constants : PhysicalConstants
        Supplies ``hbar`` for the phase factor.

    Returns
    -------
    WaveFunction
        Normalized packet (position spread ``w^2/2``, momentum mean ``p0``).
    """
    if not (math.isfinite(width) and width > 0):
        raise NonpositiveWidthError(f"packet width must be positive, got {width}")
    x = grid.points
    envelope = np.exp(-((x - x0) ** 2) / (2.0 * width**2))
    phase = np.exp(1j * p0 * x / constants.hbar)
    values = envelope * phase
    edge = max(abs(values[0]), abs(values[-1]))
    peak = float(np.max(np.abs(values)))
    if peak == 0.0 or edge / peak > _BOUNDARY_AMPLITUDE_TOL:
        warnings.warn(
            f"packet amplitude at the boundary is {edge / max(peak, 1e-300):.3e} "
            "of the peak; moments will carry truncation error",
            BoundaryAmplitudeWarning,
            stacklevel=2,
        )
    return as_wavefunction(grid, values, normalize=True)


def inner_product(phi: WaveFunction, psi: WaveFunction) -> complex:
    """Riemann-sum inner product ``h * sum(conj(phi_i) * psi_i)``.

    Conjugate-linear in the first argument.  Raises
    :class:`GridMismatchError` when the states live on different grids.
    """
    phi.grid.require_same(psi.grid, "states")
    return complex(phi.grid.h * np.vdot(phi.amplitudes, psi.amplitudes))


def norm(psi: WaveFunction) -> float:
    """Riemann-sum norm ``sqrt(<psi|psi>)``."""
    return math.sqrt(psi.grid.h * float(np.sum(np.abs(psi.amplitudes) ** 2)))


def _matrix_of(op) -> np.ndarray:
    matrix = getattr(op, "matrix", op)
    return np.asarray(matrix)


def expectation(op: "Operator | np.ndarray", psi: WaveFunction) -> complex:
    """Expectation value ``<psi| A |psi>`` in the Riemann-sum metric.

    Parameters
    ----------
    op : Operator or (n, n) array_like
        The observable.  An :class:`~qgrkit.operators.Operator` is checked
        against the state's grid; a bare matrix only against its dimension.
    psi : WaveFunction
        The state.  When it is not normalized a
        :class:`NormalizationWarning` is emitted and the raw (unrescaled)
        value is still returned; ``psi.normalized`` carries the flag.

    Returns
    -------
    complex
        The expectation value, complex for general (non-Hermitian) ``op``.
    """
    matrix = _matrix_of(op)
    if matrix.shape != (psi.grid.n, psi.grid.n):
        raise DimensionMismatchError(
            f"operator has shape {matrix.shape} for a grid of {psi.grid.n} points"
        )
    grid = getattr(op, "grid", None)
    if grid is not None:
        grid.require_same(psi.grid, "operator and state")
    if not psi.normalized:
        warnings.warn(
            "expectation taken in a state that is not normalized; "
            "returning the raw sesquilinear form",
            NormalizationWarning,
            stacklevel=2,
        )
    return complex(psi.grid.h * np.vdot(psi.amplitudes, matrix @ psi.amplitudes))


def variance(op: "Operator | np.ndarray", psi: WaveFunction) -> tuple[complex, complex]:
    """Variance ``<A^2> - <A>^2`` and its square root.

    Both returned values are complex: for non-Hermitian operators the
    variance genuinely carries an imaginary part and no real cast is taken.
    The square root is the principal branch.

    Returns
    -------
    (complex, complex)
        ``(variance, std_dev)``.
    """
    matrix = _matrix_of(op)
    if matrix.shape != (psi.grid.n, psi.grid.n):
        raise DimensionMismatchError(
            f"operator has shape {matrix.shape} for a grid of {psi.grid.n} points"
        )
    apsi = matrix @ psi.amplitudes
    mean = complex(psi.grid.h * np.vdot(psi.amplitudes, apsi))
    second = complex(psi.grid.h * np.vdot(psi.amplitudes, matrix @ apsi))
    var = second - mean * mean
    return var, complex(np.sqrt(complex(var)))


def interior_mask(grid: Grid, margin: float = 0.05) -> np.ndarray:
    """Boolean mask selecting points away from the domain edges.

    Pointwise (state-level) identity checks that rely on continuum calculus
    are evaluated only on this interior, a ``margin`` fraction of the domain
    in from each edge, so one-sided truncation effects do not count against
    identities that hold in the interior.

    Parameters
    ----------
    grid : Grid
    margin : float
        Fraction of the domain length excluded at each edge, in ``[0, 0.5)``.

    Returns
    -------
    numpy.ndarray of bool, shape ``(grid.n,)``
    """
    if not (0.0 <= margin < 0.5):
        raise GridRangeError(f"margin must lie in [0, 0.5), got {margin}")
    length = grid.x_max - grid.x_min
    lo = grid.x_min + margin * length
    hi = grid.x_max - margin * length
    return (grid.points >= lo) & (grid.points <= hi)
