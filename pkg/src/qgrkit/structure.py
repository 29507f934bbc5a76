"""Structure functions: the scalar field that deforms the bracket algebra.

A structure function is a real scalar field sampled on the grid together
with its first two derivatives.  The deformed brackets and the geometric
momentum consume these samples; nothing downstream differentiates again,
so the provenance of the derivative samples is recorded explicitly:
``"analytic"`` when closed forms were evaluated, ``"numeric-differentiated"``
when the derivative matrix was applied to tabulated samples.

The field is assumed smooth, real, and bounded on the domain; the named
families below all satisfy this by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigValidationError, DimensionMismatchError
from .grid import Grid
from .operators import DerivativeScheme, build_derivative
from .residuals import IdentityResidual, residual_from_arrays

__all__ = [
    "STRUCTURE_FAMILIES",
    "StructureFunction",
    "build_structure",
    "structure_from_samples",
    "structure_from_callables",
    "zero_structure",
    "verify_gradient_consistency",
]

STRUCTURE_FAMILIES = ("zero", "constant", "linear", "quadratic", "gauss_bump", "sine")

PROVENANCE_KINDS = ("analytic", "numeric-differentiated")


def _readonly_real(a: np.ndarray, n: int, what: str) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    if a.shape != (n,):
        raise DimensionMismatchError(
            f"{what} samples have shape {a.shape} for a grid of {n} points"
        )
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StructureFunction:
    """Real scalar field with first and second derivative samples.

    Attributes
    ----------
    grid : Grid
    s : numpy.ndarray
        Field samples, read-only.
    s1 : numpy.ndarray
        First-derivative samples.
    s2 : numpy.ndarray
        Second-derivative samples.
    provenance : str
        ``"analytic"`` or ``"numeric-differentiated"``.
    family : str
        The named family this field came from, or ``"custom"``.
    """

    grid: Grid
    s: np.ndarray = field(repr=False)
    s1: np.ndarray = field(repr=False)
    s2: np.ndarray = field(repr=False)
    provenance: str
    family: str = "custom"

    def __post_init__(self):
        n = self.grid.n
        object.__setattr__(self, "s", _readonly_real(self.s, n, "structure"))
        object.__setattr__(self, "s1", _readonly_real(self.s1, n, "gradient"))
        object.__setattr__(self, "s2", _readonly_real(self.s2, n, "curvature"))
        if self.provenance not in PROVENANCE_KINDS:
            raise ConfigValidationError(
                "structure.provenance", f"must be one of {PROVENANCE_KINDS}"
            )

    @property
    def is_zero(self) -> bool:
        """True when the field and both derivatives vanish identically."""
        return (
            float(np.max(np.abs(self.s))) == 0.0
            and float(np.max(np.abs(self.s1))) == 0.0
            and float(np.max(np.abs(self.s2))) == 0.0
        )


def structure_from_callables(
    grid: Grid,
    f: Callable[[np.ndarray], np.ndarray],
    f1: Callable[[np.ndarray], np.ndarray],
    f2: Callable[[np.ndarray], np.ndarray],
    family: str = "custom",
) -> StructureFunction:
    """Sample a field and its analytic derivatives on the grid."""
    x = grid.points
    zeros = np.zeros(grid.n)
    return StructureFunction(
        grid,
        np.asarray(f(x), dtype=float) + zeros,
        np.asarray(f1(x), dtype=float) + zeros,
        np.asarray(f2(x), dtype=float) + zeros,
        provenance="analytic",
        family=family,
    )


def structure_from_samples(
    grid: Grid, s: np.ndarray, scheme: DerivativeScheme
) -> StructureFunction:
    """Build a field from tabulated samples, differentiating numerically.

    The derivative matrix of ``scheme`` supplies ``s'`` and ``s''``; the
    provenance is recorded as ``"numeric-differentiated"`` so downstream
    reports can distinguish exact gradients from O(h^p) ones.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (grid.n,):
        raise DimensionMismatchError(
            f"structure samples have shape {s.shape} for a grid of {grid.n} points"
        )
    deriv = build_derivative(grid, scheme).matrix.real
    s1 = deriv @ s
    s2 = deriv @ s1
    return StructureFunction(grid, s, s1, s2, provenance="numeric-differentiated")


def zero_structure(grid: Grid) -> StructureFunction:
    """The vanishing field, under which every deformation collapses."""
    z = np.zeros(grid.n)
    return StructureFunction(grid, z, z, z, provenance="analytic", family="zero")


def build_structure(
    grid: Grid,
    family: str,
    amplitude: float = 1.0,
    wavenumber: float = 1.0,
    width: float = 1.0,
) -> StructureFunction:
    """Build a named structure-function family analytically.

    Families (with amplitude ``a``, wavenumber ``k``, width ``w``):

    - ``zero``:       ``s = 0``
    - ``constant``:   ``s = a``
    - ``linear``:     ``s = a x``
    - ``quadratic``:  ``s = a x^2 / 2``
    - ``gauss_bump``: ``s = a exp(-x^2 / w^2)``
    - ``sine``:       ``s = a sin(k x)``
    """
    if family not in STRUCTURE_FAMILIES:
        raise ConfigValidationError(
            "structure.family", f"must be one of {STRUCTURE_FAMILIES}, got {family!r}"
        )
    a = float(amplitude)
    k = float(wavenumber)
    w = float(width)
    if family == "zero":
        return zero_structure(grid)
    if family == "constant":
        return structure_from_callables(
            grid, lambda x: a + 0 * x, lambda x: 0 * x, lambda x: 0 * x, family
        )
    if family == "linear":
        return structure_from_callables(
            grid, lambda x: a * x, lambda x: a + 0 * x, lambda x: 0 * x, family
        )
    if family == "quadratic":
        return structure_from_callables(
            grid, lambda x: 0.5 * a * x**2, lambda x: a * x, lambda x: a + 0 * x, family
        )
    if family == "gauss_bump":
        if w <= 0:
            raise ConfigValidationError("structure.width", "must be positive")

        def bump(x):
            return a * np.exp(-(x**2) / w**2)

        return structure_from_callables(
            grid,
            bump,
            lambda x: (-2.0 * x / w**2) * bump(x),
            lambda x: (-2.0 / w**2 + 4.0 * x**2 / w**4) * bump(x),
            family,
        )
    return structure_from_callables(
        grid,
        lambda x: a * np.sin(k * x),
        lambda x: a * k * np.cos(k * x),
        lambda x: -a * k**2 * np.sin(k * x),
        family,
    )


def verify_gradient_consistency(
    sf: StructureFunction,
    scheme: DerivativeScheme,
    tolerance: float,
    mask: np.ndarray | None = None,
) -> IdentityResidual:
    """Cross-check analytic gradients against numeric re-differentiation.

    Applies the scheme's derivative matrix to the field samples and
    compares with the stored ``s1`` on the (optionally masked) grid; the
    agreement is O(h^p), so this is a continuum-kind check.
    """
    deriv = build_derivative(sf.grid, scheme).matrix.real
    return residual_from_arrays(
        "structure_gradient_consistency",
        deriv @ sf.s,
        sf.s1,
        tolerance,
        kind="continuum",
        mask=mask,
    )
