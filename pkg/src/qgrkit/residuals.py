"""Uniform bookkeeping for identity checks.

Every verified identity, whether an exact algebraic rearrangement or a
continuum statement that only holds under grid refinement, is reduced to a
single :class:`IdentityResidual` record.  The pass rule is shared: the
relative residual must not exceed the tolerance, except that when both
sides are numerically zero the absolute residual is used instead, so
identities between vanishing quantities are not failed on 0/0 noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

__all__ = [
    "RESIDUAL_KINDS",
    "ZERO_SCALE",
    "IdentityResidual",
    "residual_from_arrays",
    "residual_from_values",
    "residual_from_operators",
    "residual_from_slack",
    "residual_from_zero",
]

RESIDUAL_KINDS = ("algebraic", "continuum")

#: Below this max-norm both sides count as zero and the absolute residual
#: is compared against the tolerance directly.
ZERO_SCALE = 1e-14


@dataclass(frozen=True)
class IdentityResidual:
    """Outcome of a single identity check.

    Attributes
    ----------
    name : str
        Stable snake_case identifier of the check.
    lhs_norm, rhs_norm : float
        Max-norms of the two sides (for inequality checks: the slack and
        the reference scale, see :func:`residual_from_slack`).
    abs_residual : float
        Max-norm of the difference (or of the bound violation).
    rel_residual : float
        ``abs_residual`` divided by the larger side norm, or the absolute
        residual itself when both sides are below :data:`ZERO_SCALE`.
        Checks whose sides are sums of large terms that nearly cancel may
        supply an explicit problem scale instead, since rounding error in
        such a sum is proportional to the terms, not to the total.
    tolerance : float
        The budget the relative residual is compared against.
    kind : str
        ``"algebraic"`` for exact rearrangements expected at machine
        precision, ``"continuum"`` for statements that converge under grid
        refinement.
    passed : bool
        ``rel_residual <= tolerance``.  Serialized under the key ``"pass"``.
    """

    name: str
    lhs_norm: float
    rhs_norm: float
    abs_residual: float
    rel_residual: float
    tolerance: float
    kind: str
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "lhs_norm": self.lhs_norm,
            "rhs_norm": self.rhs_norm,
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "tolerance": self.tolerance,
            "kind": self.kind,
            "pass": self.passed,
        }


def _finish(
    name: str,
    lhs_norm: float,
    rhs_norm: float,
    abs_residual: float,
    tolerance: float,
    kind: str,
    scale_floor: float = 0.0,
) -> IdentityResidual:
    if kind not in RESIDUAL_KINDS:
        raise ValueError(f"kind must be one of {RESIDUAL_KINDS}, got {kind!r}")
    scale = max(lhs_norm, rhs_norm, float(scale_floor))
    if scale < ZERO_SCALE:
        rel = abs_residual
    else:
        rel = abs_residual / scale
    return IdentityResidual(
        name=name,
        lhs_norm=float(lhs_norm),
        rhs_norm=float(rhs_norm),
        abs_residual=float(abs_residual),
        rel_residual=float(rel),
        tolerance=float(tolerance),
        kind=kind,
        passed=bool(rel <= tolerance),
    )


def residual_from_arrays(
    name: str,
    lhs: np.ndarray,
    rhs: np.ndarray,
    tolerance: float,
    kind: str = "algebraic",
    mask: np.ndarray | None = None,
) -> IdentityResidual:
    """Check ``lhs == rhs`` elementwise in the max-norm.

    Parameters
    ----------
    mask : array of bool, optional
        Restrict the comparison (and the side norms) to these entries;
        used for interior-only continuum checks.
    """
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    if mask is not None:
        lhs = lhs[mask]
        rhs = rhs[mask]
    lhs_norm = float(np.max(np.abs(lhs))) if lhs.size else 0.0
    rhs_norm = float(np.max(np.abs(rhs))) if rhs.size else 0.0
    abs_residual = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
    return _finish(name, lhs_norm, rhs_norm, abs_residual, tolerance, kind)


def residual_from_values(
    name: str,
    lhs: complex,
    rhs: complex,
    tolerance: float,
    kind: str = "algebraic",
    scale_floor: float = 0.0,
) -> IdentityResidual:
    """Check equality of two scalars.

    Parameters
    ----------
    scale_floor : float, optional
        Lower bound on the denominator of the relative residual.  Pass the
        magnitude of the largest term entering either side when the sides
        are differences of large quantities that nearly cancel; rounding
        noise is then judged against the terms rather than the cancelled
        total.
    """
    return _finish(
        name,
        abs(complex(lhs)),
        abs(complex(rhs)),
        abs(complex(lhs) - complex(rhs)),
        tolerance,
        kind,
        scale_floor=scale_floor,
    )


def residual_from_operators(
    name: str,
    lhs,
    rhs,
    tolerance: float,
    kind: str = "algebraic",
) -> IdentityResidual:
    """Check equality of two operators (or raw matrices) in the max-norm."""
    lhs_matrix = getattr(lhs, "matrix", lhs)
    rhs_matrix = getattr(rhs, "matrix", rhs)
    return residual_from_arrays(name, lhs_matrix, rhs_matrix, tolerance, kind)


def residual_from_zero(
    name: str,
    value,
    tolerance: float,
    kind: str = "algebraic",
) -> IdentityResidual:
    """Check that a quantity vanishes, in absolute terms.

    Unlike :func:`residual_from_values` with a zero right side, the
    comparison is absolute by construction: a quantity of size 1e-13 with
    tolerance 1e-12 passes even though its relative distance from zero is
    undefined.  ``value`` may be a scalar or an array (max-norm).
    """
    arr = np.asarray(value)
    magnitude = float(np.max(np.abs(arr))) if arr.size else 0.0
    if kind not in RESIDUAL_KINDS:
        raise ValueError(f"kind must be one of {RESIDUAL_KINDS}, got {kind!r}")
    return IdentityResidual(
        name=name,
        lhs_norm=magnitude,
        rhs_norm=0.0,
        abs_residual=magnitude,
        rel_residual=magnitude,
        tolerance=float(tolerance),
        kind=kind,
        passed=bool(magnitude <= tolerance),
    )


def residual_from_slack(
    name: str,
    slack: float,
    scale: float,
    tolerance: float,
    kind: str = "algebraic",
) -> IdentityResidual:
    """Check a one-sided bound with slack ``slack >= 0`` expected.

    The violation ``max(0, -slack)`` plays the role of the absolute
    residual; ``lhs_norm`` records the slack itself and ``rhs_norm`` the
    reference scale used for the relative comparison.
    """
    violation = max(0.0, -float(slack))
    scale = float(abs(scale))
    rel = violation if scale < ZERO_SCALE else violation / scale
    if kind not in RESIDUAL_KINDS:
        raise ValueError(f"kind must be one of {RESIDUAL_KINDS}, got {kind!r}")
    return IdentityResidual(
        name=name,
        lhs_norm=float(slack),
        rhs_norm=scale,
        abs_residual=violation,
        rel_residual=float(rel),
        tolerance=float(tolerance),
        kind=kind,
        passed=bool(rel <= tolerance),
    )
